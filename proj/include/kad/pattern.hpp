#pragma once

#include "kad/entity.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kad {

// ---- rule DSL ---------------------------------------------------------------

struct Word {
    std::string text; // lowercase, punctuation-stripped
    bool operator==(const Word &) const = default;
};
struct Wildcard {
    bool operator==(const Wildcard &) const = default;
};
struct VarSlot {
    std::string name;
    bool operator==(const VarSlot &) const = default;
};

using PatternElement = std::variant<Word, Wildcard, VarSlot>;
using Pattern = std::vector<PatternElement>;

enum class VarKind { entity_name, entity_address, text, focus };

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::text;
    std::string focus_type; // only for VarKind::focus

    bool is_entity() const { return kind == VarKind::entity_name || kind == VarKind::entity_address; }
};

// KDP terms: a variable, a literal value, or the session's focus entity of a type.
struct VarTerm {
    std::string name;
    bool operator==(const VarTerm &) const = default;
};
struct ValueTerm {
    std::string text;
    bool operator==(const ValueTerm &) const = default;
};
struct FocusTerm {
    std::string type;
    bool operator==(const FocusTerm &) const = default;
};
using Term = std::variant<VarTerm, ValueTerm, FocusTerm>;

struct KdpTriple {
    Term subject;
    std::string relation;
    Term object;
    bool operator==(const KdpTriple &) const = default;
};

struct Belief {
    KdpTriple main;
    std::vector<KdpTriple> aux;
};

struct RuleDef {
    std::string id;
    Pattern pattern;
    std::vector<VarDecl> vars;
    std::string response;
    std::vector<KdpTriple> facts;
    std::vector<Belief> beliefs;
    int line = 0;

    const VarDecl *var(std::string_view name) const;
    std::size_t literal_count() const;
    std::size_t wildcard_count() const;
};

/// Parses the rule DSL. Throws ParseError on syntax errors, duplicate ids and
/// undeclared variables.
std::vector<RuleDef> parse_rules(std::string_view source);

/// True for names usable as rule variables: [A-Z][A-Z0-9_]*.
bool is_var_name(std::string_view s);

// ---- matching ---------------------------------------------------------------

struct BoundValue {
    std::string text;
    std::optional<EntitySpan> span; // set for entity-kind vars
    bool operator==(const BoundValue &) const = default;
};

using Bindings = std::map<std::string, BoundValue>;

/// Matches a pattern (with an implicit trailing wildcard) against the whole
/// utterance. Wildcards and text vars take the shortest spans, earlier
/// elements first; an entity var may absorb one preceding determiner.
std::optional<Bindings> match(const Pattern &pattern, const std::vector<VarDecl> &vars,
                              const AnnotatedUtterance &u);

struct Selection {
    const RuleDef *rule = nullptr;
    Bindings bindings;
};

/// Most literals wins, then fewest wildcards, then file order.
std::optional<Selection> select_rule(const std::vector<RuleDef> &rules, const AnnotatedUtterance &u);

bool is_determiner(std::string_view norm);

} // namespace kad

#pragma once

#include "kad/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kad {

// ---- relation registry ------------------------------------------------------

enum class RelationKind { property, type, other };

enum class RangeKind { type, entity, address, name, text, yesno };

struct Range {
    RangeKind kind = RangeKind::text;
    std::string entity_type; // for RangeKind::entity
};

struct RelationDef {
    std::string name;
    RelationKind kind = RelationKind::other;
    std::string domain;
    Range range;
    bool identifying = false;
    std::string qf;
    std::string qv;
    std::optional<std::string> qf_later;
    std::optional<std::string> qv_later;
};

class RelationRegistry {
public:
    /// `relation <name>` blocks with indented `key: value` lines.
    static RelationRegistry parse(std::string_view source);

    void add(RelationDef def);
    const RelationDef *find(std::string_view name) const;
    const std::vector<RelationDef> &all() const { return defs_; }

private:
    std::vector<RelationDef> defs_;
};

// ---- type schemas -----------------------------------------------------------

struct PropertyDecl {
    std::string relation;
    bool identifying = false;
};

struct TypeSchema {
    std::string name;
    std::optional<std::string> parent;
    std::vector<PropertyDecl> properties;
};

class TypeSchemas {
public:
    /// `type <name> [parent <name>]` followed by `prop <relation> [identifying]`.
    static TypeSchemas parse(std::string_view source);

    void add(TypeSchema schema);
    const TypeSchema *find(std::string_view name) const;
    const std::vector<TypeSchema> &all() const { return schemas_; }

    /// `type` first, then its ancestors. Stops on unknown parents.
    std::vector<const TypeSchema *> chain(std::string_view type) const;
    bool is_a(std::string_view type, std::string_view ancestor) const;

private:
    std::vector<TypeSchema> schemas_;
};

// ---- inference rules (evaluated by the reasoner) ----------------------------

struct RuleVar {
    std::string name; // without the leading '?'
    bool operator==(const RuleVar &) const = default;
};
struct RuleConst {
    std::string text;
    bool operator==(const RuleConst &) const = default;
};
using RuleTerm = std::variant<RuleVar, RuleConst>;

struct RuleAtom {
    RuleTerm subject;
    std::string relation;
    RuleTerm object;
    bool operator==(const RuleAtom &) const = default;
};

struct HornRule {
    std::vector<RuleAtom> body;
    RuleAtom head;
    int line = 0;
};

// ---- candidate knowledge ----------------------------------------------------

enum class Origin { fact, belief_main, belief_aux };

/// An entity named in text, optionally already resolved (focus terms).
struct EntityRef {
    std::string name;
    std::optional<EntityId> id;
    bool operator==(const EntityRef &) const = default;
};

struct CandidateTriple {
    EntityRef subject;
    std::string relation;
    EntityRef object; // name holds the literal/type text when the range is not an entity
    Origin origin = Origin::fact;
    std::size_t group = 0; // KDP index; aux triples share their main's group
    std::string provenance;
    bool operator==(const CandidateTriple &) const = default;
};

// ---- knowledge base ---------------------------------------------------------

struct EntityNode {
    EntityId id;
    std::string canonical;
    std::set<std::string> types;
    std::set<std::string> aliases;
    bool operator==(const EntityNode &) const = default;
};

enum class Effect { added, status_upgraded, merged_noop };

struct AliasProposal {
    EntityId provisional;
    EntityId existing;
};

struct Registration {
    EntityId id;
    bool created = false;
    std::optional<AliasProposal> alias;
};

struct Grounded {
    TripleKey key;
    std::vector<AliasProposal> aliases;
};

/// A single stored-state change; `status == nullopt` means removal.
struct Delta {
    TripleKey key;
    std::optional<Status> status;
};

/// Typed triple store. Only verified and inferred triples are visible to
/// query(); pending ones still take part in dedup. Not internally locked:
/// the owner serializes mutations.
class KnowledgeBase {
public:
    KnowledgeBase() = default;
    KnowledgeBase(RelationRegistry relations, TypeSchemas schemas, std::vector<HornRule> rules = {});

    const RelationRegistry &relations() const { return relations_; }
    const TypeSchemas &schemas() const { return schemas_; }
    const std::vector<HornRule> &inference_rules() const { return rules_; }

    // entities
    Registration register_entity(std::string_view name, std::string_view type);
    std::optional<EntityId> find_entity(std::string_view name, std::string_view type) const;
    std::vector<EntityId> find_by_name(std::string_view name) const;
    const EntityNode *entity(EntityId id) const;
    std::vector<EntityNode> entities() const;
    /// Registration types plus objects of verified type-kind triples.
    std::set<std::string> instance_types(EntityId id) const;
    /// Folds `from` into `into`: names become aliases, triples are re-pointed.
    void merge_entities(EntityId from, EntityId into);

    // candidates
    std::string subject_type(const CandidateTriple &c) const;
    Grounded ground(const CandidateTriple &c);
    std::optional<TripleKey> resolve(const CandidateTriple &c) const;

    // triples
    Effect incorporate(const TripleKey &key, Status status, std::string provenance);
    struct CandidateResult {
        Effect effect;
        Grounded grounded;
    };
    CandidateResult incorporate(const CandidateTriple &c, Status status);

    std::vector<Triple> query(std::optional<EntityId> subject = std::nullopt,
                              std::optional<std::string> relation = std::nullopt,
                              std::optional<Node> object = std::nullopt) const;
    /// Removes a stored triple at any status. Returns false when absent.
    bool remove(const TripleKey &key);

    std::optional<Status> stored_status(const TripleKey &key) const;
    const Triple *stored(const TripleKey &key) const;
    /// Verified or inferred.
    bool known(const TripleKey &key) const;
    bool has_value(EntityId subject, std::string_view relation, Status at_least) const;

    std::vector<std::string> missing_properties(EntityId id) const;
    bool is_property_of(std::string_view relation, EntityId subject) const;
    bool is_identifying(std::string_view relation, EntityId subject) const;
    /// Verified values of identifying properties, in schema order.
    std::vector<std::string> identifying_values(EntityId id) const;

    std::string display(const Node &n) const;
    std::string display(const TripleKey &k) const;

    std::vector<Triple> triples() const; // stored, insertion order
    const std::vector<Triple> &inferred() const { return inferred_; }
    std::size_t size() const { return by_seq_.size(); }

    std::vector<Delta> take_journal();

    std::uint64_t next_entity_id() const { return next_entity_; }
    void restore(std::vector<EntityNode> entities, std::vector<Triple> triples, std::uint64_t next_entity);

    /// Re-derives inferred triples from the verified set.
    void recompute_inferred();

private:
    void check_domain_range(const TripleKey &key) const;
    std::vector<std::string> property_order(EntityId id) const;

    RelationRegistry relations_;
    TypeSchemas schemas_;
    std::vector<HornRule> rules_;

    std::map<EntityId, EntityNode> entities_;
    std::uint64_t next_entity_ = 1;

    std::map<std::uint64_t, Triple> by_seq_;
    std::map<TripleKey, std::uint64_t> index_;
    std::uint64_t next_seq_ = 1;
    std::vector<Triple> inferred_;

    std::vector<Delta> journal_;
};

/// Substitutes {E1}, {E2} and {ID}. Throws RenderError on a {ID} with no value
/// or an unknown placeholder.
std::string render_template(std::string_view tmpl, std::string_view e1, std::string_view e2,
                            std::string_view id);
/// Placeholders a question template may use.
bool template_is_valid(std::string_view tmpl, std::string *bad = nullptr);

std::string to_string(RelationKind k);
std::string to_string(RangeKind k);

} // namespace kad

#pragma once

#include "kad/types.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kad {

struct Token {
    std::string text; // punctuation-stripped, original casing
    std::string norm; // lowercase of text
    bool sentence_initial = false;
};

enum class SpanKind { name, address };

struct EntitySpan {
    std::size_t start = 0;
    std::size_t end = 0; // exclusive
    std::string surface;
    SpanKind kind = SpanKind::name;
    std::string type_tag; // gazetteer tag, "unknown" for heuristic names, "address"

    bool operator==(const EntitySpan &) const = default;
};

struct AnnotatedUtterance {
    std::vector<Token> tokens;
    std::vector<EntitySpan> spans; // non-overlapping, sorted by start

    const EntitySpan *span_at(std::size_t start) const;
};

/// Surface-form dictionary plus the street-suffix lexicon used for addresses.
/// Immutable once loaded; lookups are case-insensitive.
class Gazetteer {
public:
    Gazetteer();

    /// `<surface form><TAB><type-tag>` per line; blank lines and `#` comments ignored.
    static Gazetteer parse(std::string_view source);

    void add(std::string_view surface, std::string_view type_tag);
    void set_street_suffixes(std::vector<std::string> suffixes);

    std::optional<std::string> type_of(std::string_view surface) const;
    bool is_street_suffix(std::string_view word) const;
    std::size_t size() const { return entries_.size(); }

    /// Longest entry whose tokens match `tokens` at `pos`: (length, type-tag).
    std::optional<std::pair<std::size_t, std::string>> longest_at(const std::vector<Token> &tokens,
                                                                  std::size_t pos) const;

private:
    struct Entry {
        std::vector<std::string> norms;
        std::string type_tag;
    };
    std::map<std::string, std::vector<Entry>> by_first_; // each list sorted longest first
    std::map<std::string, std::string> entries_;         // lowercase surface -> tag
    std::set<std::string> suffixes_;                     // lowercase
};

std::vector<Token> tokenize(std::string_view text);

/// Tokenizes and marks entity spans: gazetteer (longest match) first, then
/// addresses (number + capitalized words ending in a street suffix), then runs
/// of capitalized non-sentence-initial tokens as names of type "unknown".
AnnotatedUtterance annotate(std::string_view text, const Gazetteer &gazetteer);

/// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

enum class NameVerdict { identical, candidate_alias, distinct };

/// Case-insensitive equality, else alias when one name's words are a
/// sub-multiset of the other's or edit distance / longer length <= 1/3.
NameVerdict name_similarity(std::string_view incoming, std::string_view existing);

/// Most recently salient entity per type for one session.
class FocusMap {
public:
    void update(const std::string &type, EntityId id) { focus_[type] = id; }
    std::optional<EntityId> get(std::string_view type) const;
    bool contains_entity(EntityId id) const;
    void replace_entity(EntityId from, EntityId to);
    const std::map<std::string, EntityId, std::less<>> &entries() const { return focus_; }

private:
    std::map<std::string, EntityId, std::less<>> focus_;
};

std::optional<EntityId> resolve_focus(const FocusMap &focus, std::string_view type);

} // namespace kad

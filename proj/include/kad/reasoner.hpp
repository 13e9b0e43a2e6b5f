#pragma once

#include "kad/kb.hpp"

#include <string_view>
#include <vector>

namespace kad {

/// One rule per line: `(t, rel, t) [& (t, rel, t)]* => (t, rel, t)`.
/// Variables are `?name`; `#` starts a comment line. Rejects unsafe heads.
std::vector<HornRule> parse_inference_rules(std::string_view source);

/// Least fixpoint of `rules` over `verified`. Returns only the derived
/// triples that are not already in `verified`, in derivation order.
/// Constants match type names and literals by text; head constants become
/// type names when the head relation's range is a type, literals otherwise.
/// Heads whose subject is not an entity are skipped.
std::vector<Triple> closure(const std::vector<Triple> &verified, const std::vector<HornRule> &rules,
                            const RelationRegistry &relations);

} // namespace kad

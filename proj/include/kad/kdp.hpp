#pragma once

#include "kad/entity.hpp"
#include "kad/kb.hpp"
#include "kad/pattern.hpp"

#include <string>
#include <vector>

namespace kad {

/// A belief awaiting the current user's answer, with its rendered q^f.
struct Confirmation {
    CandidateTriple main;
    std::vector<CandidateTriple> aux;
    std::string question;
};

struct LearningPlan {
    std::vector<CandidateTriple> to_verify;
    std::vector<Confirmation> to_confirm;
    std::vector<CandidateTriple> noops;
};

/// Grounds a rule's facts and beliefs with `bindings`. Focus terms resolve
/// through `focus`; a KDP with an unresolved focus term is dropped (a belief
/// main takes its aux triples with it). Throws ConfigError for relations the
/// KB does not know.
std::vector<CandidateTriple> instantiate(const RuleDef &rule, const Bindings &bindings, const FocusMap &focus,
                                         const KnowledgeBase &kb, const std::string &provenance);

/// Splits candidates into known no-ops, facts to cross-verify, and beliefs
/// whose main needs confirmation first. Pure with respect to `kb`.
LearningPlan plan(const std::vector<CandidateTriple> &candidates, const KnowledgeBase &kb);

std::string provenance_for(std::string_view rule_id, std::string_view session, std::int64_t turn);

} // namespace kad

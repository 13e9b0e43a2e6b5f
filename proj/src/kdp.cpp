#include "kad/kdp.hpp"

#include "kad/error.hpp"

#include <map>

namespace kad {

namespace {

std::optional<EntityRef> resolve_term(const Term &term, const RuleDef &rule, const Bindings &bindings,
                                      const FocusMap &focus, const KnowledgeBase &kb) {
    auto from_focus = [&](const std::string &type) -> std::optional<EntityRef> {
        auto id = resolve_focus(focus, type);
        if (!id) return std::nullopt;
        const auto *node = kb.entity(*id);
        if (!node) return std::nullopt;
        return EntityRef{node->canonical, *id};
    };
    if (const auto *v = std::get_if<VarTerm>(&term)) {
        const auto *decl = rule.var(v->name);
        if (decl && decl->kind == VarKind::focus) return from_focus(decl->focus_type);
        auto it = bindings.find(v->name);
        if (it == bindings.end()) return std::nullopt;
        return EntityRef{it->second.text, std::nullopt};
    }
    if (const auto *c = std::get_if<ValueTerm>(&term)) return EntityRef{c->text, std::nullopt};
    return from_focus(std::get<FocusTerm>(term).type);
}

std::optional<CandidateTriple> ground_kdp(const KdpTriple &k, Origin origin, std::size_t group, const RuleDef &rule,
                                          const Bindings &bindings, const FocusMap &focus, const KnowledgeBase &kb,
                                          const std::string &provenance) {
    if (!kb.relations().find(k.relation))
        throw ConfigError("rule " + rule.id + " uses unregistered relation '" + k.relation + "'");
    auto s = resolve_term(k.subject, rule, bindings, focus, kb);
    auto o = resolve_term(k.object, rule, bindings, focus, kb);
    if (!s || !o || s->name.empty() || o->name.empty()) return std::nullopt;
    return CandidateTriple{*s, k.relation, *o, origin, group, provenance};
}

bool already_stored(const CandidateTriple &c, const KnowledgeBase &kb) {
    auto key = kb.resolve(c);
    return key && (kb.stored_status(*key) || kb.known(*key));
}

} // namespace

std::vector<CandidateTriple> instantiate(const RuleDef &rule, const Bindings &bindings, const FocusMap &focus,
                                         const KnowledgeBase &kb, const std::string &provenance) {
    std::vector<CandidateTriple> out;
    std::size_t group = 0;
    for (const auto &f : rule.facts) {
        if (auto c = ground_kdp(f, Origin::fact, group, rule, bindings, focus, kb, provenance)) out.push_back(*c);
        ++group;
    }
    for (const auto &b : rule.beliefs) {
        auto main = ground_kdp(b.main, Origin::belief_main, group, rule, bindings, focus, kb, provenance);
        if (main) {
            out.push_back(*main);
            for (const auto &a : b.aux)
                if (auto c = ground_kdp(a, Origin::belief_aux, group, rule, bindings, focus, kb, provenance))
                    out.push_back(*c);
        }
        ++group;
    }
    return out;
}

LearningPlan plan(const std::vector<CandidateTriple> &candidates, const KnowledgeBase &kb) {
    LearningPlan p;
    std::map<std::size_t, std::size_t> open_belief; // group -> index into to_confirm
    std::map<std::size_t, bool> main_known;
    for (const auto &c : candidates) {
        switch (c.origin) {
        case Origin::fact: (already_stored(c, kb) ? p.noops : p.to_verify).push_back(c); break;
        case Origin::belief_main:
            if (already_stored(c, kb)) {
                p.noops.push_back(c);
                main_known[c.group] = true;
            } else {
                const auto *rel = kb.relations().find(c.relation);
                auto question = render_template(rel->qf, c.subject.name, c.object.name, {});
                open_belief[c.group] = p.to_confirm.size();
                p.to_confirm.push_back(Confirmation{c, {}, std::move(question)});
            }
            break;
        case Origin::belief_aux:
            if (main_known[c.group]) {
                (already_stored(c, kb) ? p.noops : p.to_verify).push_back(c);
            } else if (auto it = open_belief.find(c.group); it != open_belief.end()) {
                p.to_confirm[it->second].aux.push_back(c);
            }
            break;
        }
    }
    return p;
}

std::string provenance_for(std::string_view rule_id, std::string_view session, std::int64_t turn) {
    return std::string(rule_id) + "@" + std::string(session) + "#" + std::to_string(turn);
}

} // namespace kad

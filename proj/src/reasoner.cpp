#include "kad/reasoner.hpp"

#include "kad/error.hpp"
#include "kad/text.hpp"

#include <map>
#include <set>
#include <sstream>

namespace kad {

namespace {

RuleTerm to_rule_term(const text::RawTerm &t, int line) {
    using K = text::RawTerm::Kind;
    switch (t.kind) {
    case K::variable: return RuleVar{t.text};
    case K::quoted:
    case K::bare: return RuleConst{t.text};
    case K::focus: break;
    }
    throw ParseError(line, "focus terms are not allowed in inference rules");
}

RuleAtom parse_atom(std::string_view s, std::size_t &pos, int line) {
    auto raw = text::parse_raw_triple(s, pos, line);
    return {to_rule_term(raw.subject, line), raw.relation.text, to_rule_term(raw.object, line)};
}

void skip_space(std::string_view s, std::size_t &pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

void collect_vars(const RuleTerm &t, std::set<std::string> &out) {
    if (const auto *v = std::get_if<RuleVar>(&t)) out.insert(v->name);
}

} // namespace

std::vector<HornRule> parse_inference_rules(std::string_view source) {
    std::vector<HornRule> rules;
    std::istringstream in{std::string(source)};
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        HornRule rule;
        rule.line = line_no;
        std::size_t pos = 0;
        std::string_view s = line;
        for (;;) {
            skip_space(s, pos);
            rule.body.push_back(parse_atom(s, pos, line_no));
            skip_space(s, pos);
            if (pos < s.size() && s[pos] == '&') {
                ++pos;
                continue;
            }
            if (s.substr(pos, 2) == "=>") {
                pos += 2;
                break;
            }
            throw ParseError(line_no, "expected '&' or '=>'");
        }
        skip_space(s, pos);
        rule.head = parse_atom(s, pos, line_no);
        skip_space(s, pos);
        if (pos != s.size()) throw ParseError(line_no, "trailing text after rule head");

        std::set<std::string> body_vars, head_vars;
        for (const auto &a : rule.body) {
            collect_vars(a.subject, body_vars);
            collect_vars(a.object, body_vars);
        }
        collect_vars(rule.head.subject, head_vars);
        collect_vars(rule.head.object, head_vars);
        for (const auto &v : head_vars)
            if (!body_vars.count(v)) throw ParseError(line_no, "head variable ?" + v + " does not occur in the body");
        rules.push_back(std::move(rule));
    }
    return rules;
}

namespace {

using Env = std::map<std::string, Node>;

bool const_matches(const RuleConst &c, const Node &n) {
    if (const auto *t = std::get_if<TypeName>(&n)) return t->name == c.text;
    if (const auto *l = std::get_if<Literal>(&n)) return l->text == c.text;
    return false;
}

bool unify(const RuleTerm &term, const Node &n, Env &env, std::vector<std::string> &bound) {
    if (const auto *c = std::get_if<RuleConst>(&term)) return const_matches(*c, n);
    const auto &name = std::get<RuleVar>(term).name;
    if (auto it = env.find(name); it != env.end()) return it->second == n;
    env.emplace(name, n);
    bound.push_back(name);
    return true;
}

class Evaluator {
public:
    Evaluator(const std::vector<Triple> &verified, const RelationRegistry &relations) : relations_(relations) {
        for (const auto &t : verified) add(t.key(), false);
    }

    void run(const std::vector<HornRule> &rules) {
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto &rule : rules) {
                std::vector<TripleKey> heads;
                Env env;
                join(rule, 0, env, heads);
                for (auto &h : heads) changed = add(std::move(h), true) || changed;
            }
        }
    }

    std::vector<Triple> derived() const {
        std::vector<Triple> out;
        for (auto i : derived_) {
            const auto &k = facts_[i];
            out.push_back(Triple{k.subject, k.relation, k.object, Status::inferred, "inferred"});
        }
        return out;
    }

private:
    bool add(TripleKey k, bool derived) {
        if (!seen_.insert(k).second) return false;
        by_relation_[k.relation].push_back(facts_.size());
        if (derived) derived_.push_back(facts_.size());
        facts_.push_back(std::move(k));
        return true;
    }

    void join(const HornRule &rule, std::size_t i, Env &env, std::vector<TripleKey> &heads) const {
        if (i == rule.body.size()) {
            if (auto h = instantiate_head(rule.head, env)) heads.push_back(std::move(*h));
            return;
        }
        const auto &atom = rule.body[i];
        auto it = by_relation_.find(atom.relation);
        if (it == by_relation_.end()) return;
        for (auto idx : it->second) {
            const auto &f = facts_[idx];
            std::vector<std::string> bound;
            if (unify(atom.subject, Node{f.subject}, env, bound) && unify(atom.object, f.object, env, bound))
                join(rule, i + 1, env, heads);
            for (const auto &b : bound) env.erase(b);
        }
    }

    std::optional<TripleKey> instantiate_head(const RuleAtom &head, const Env &env) const {
        const auto *sv = std::get_if<RuleVar>(&head.subject);
        if (!sv) return std::nullopt;
        const auto *subject = std::get_if<EntityId>(&env.at(sv->name));
        if (!subject) return std::nullopt;
        Node object;
        if (const auto *ov = std::get_if<RuleVar>(&head.object)) {
            object = env.at(ov->name);
        } else {
            const auto &text = std::get<RuleConst>(head.object).text;
            const auto *rel = relations_.find(head.relation);
            if (rel && rel->range.kind == RangeKind::type) object = TypeName{text};
            else object = Literal{text};
        }
        return TripleKey{*subject, head.relation, std::move(object)};
    }

    const RelationRegistry &relations_;
    std::vector<TripleKey> facts_;
    std::set<TripleKey> seen_;
    std::map<std::string, std::vector<std::size_t>> by_relation_;
    std::vector<std::size_t> derived_;
};

} // namespace

std::vector<Triple> closure(const std::vector<Triple> &verified, const std::vector<HornRule> &rules,
                            const RelationRegistry &relations) {
    Evaluator ev(verified, relations);
    ev.run(rules);
    return ev.derived();
}

} // namespace kad

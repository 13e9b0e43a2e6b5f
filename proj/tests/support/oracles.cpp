#include "oracles.hpp"

#include <algorithm>
#include <map>

namespace kad::oracle {

std::size_t levenshtein(const std::string &a, const std::string &b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

namespace {

struct Choice {
    std::size_t key;
    std::string var;
    BoundValue value;
};

struct Enumerator {
    const Pattern &pattern;
    const std::vector<VarDecl> &vars;
    const AnnotatedUtterance &u;
    std::vector<Choice> current;
    std::optional<std::vector<Choice>> best;

    VarKind kind_of(const std::string &name) const {
        for (const auto &v : vars)
            if (v.name == name) return v.kind;
        return VarKind::text;
    }

    static std::vector<std::size_t> keys(const std::vector<Choice> &cs) {
        std::vector<std::size_t> k;
        for (const auto &c : cs) k.push_back(c.key);
        return k;
    }

    void consider() {
        if (!best || keys(current) < keys(*best)) best = current;
    }

    std::string words(std::size_t b, std::size_t e) const {
        std::string out;
        for (auto i = b; i < e; ++i) out += (i > b ? " " : "") + u.tokens[i].text;
        return out;
    }

    void go(std::size_t e, std::size_t pos) {
        const auto m = u.tokens.size();
        if (e == pattern.size()) {
            consider(); // the trailing wildcard takes whatever is left
            return;
        }
        const auto &el = pattern[e];
        if (std::holds_alternative<Wildcard>(el)) {
            for (std::size_t len = 0; pos + len <= m; ++len) {
                current.push_back({len, {}, {}});
                go(e + 1, pos + len);
                current.pop_back();
            }
            return;
        }
        if (const auto *w = std::get_if<Word>(&el)) {
            if (pos < m && u.tokens[pos].norm == w->text) {
                current.push_back({0, {}, {}});
                go(e + 1, pos + 1);
                current.pop_back();
            }
            return;
        }
        const auto &name = std::get<VarSlot>(el).name;
        auto kind = kind_of(name);
        if (kind == VarKind::text) {
            for (std::size_t len = 1; pos + len <= m; ++len) {
                current.push_back({len, name, {words(pos, pos + len), std::nullopt}});
                go(e + 1, pos + len);
                current.pop_back();
            }
            return;
        }
        auto want = kind == VarKind::entity_address ? SpanKind::address : SpanKind::name;
        for (int det = 0; det < 2; ++det) {
            auto at = pos + (det == 0 ? 1 : 0);
            if (det == 0) {
                auto n = pos < m ? u.tokens[pos].norm : std::string{};
                if (n != "a" && n != "an" && n != "the") continue;
            }
            for (const auto &s : u.spans) {
                if (s.start != at || s.kind != want) continue;
                current.push_back({static_cast<std::size_t>(det), name, {s.surface, s}});
                go(e + 1, s.end);
                current.pop_back();
            }
        }
    }
};

} // namespace

std::optional<Bindings> match(const Pattern &pattern, const std::vector<VarDecl> &vars, const AnnotatedUtterance &u) {
    Enumerator en{pattern, vars, u, {}, std::nullopt};
    en.go(0, 0);
    if (!en.best) return std::nullopt;
    Bindings b;
    for (const auto &c : *en.best)
        if (!c.var.empty()) b[c.var] = c.value;
    return b;
}

namespace {

using Subst = std::map<std::string, Node>;

bool unify(const RuleTerm &t, const Node &n, Subst &s) {
    if (const auto *c = std::get_if<RuleConst>(&t)) {
        if (const auto *tn = std::get_if<TypeName>(&n)) return tn->name == c->text;
        if (const auto *l = std::get_if<Literal>(&n)) return l->text == c->text;
        return false;
    }
    const auto &v = std::get<RuleVar>(t).name;
    auto it = s.find(v);
    if (it == s.end()) {
        s[v] = n;
        return true;
    }
    return it->second == n;
}

void tuples(const HornRule &r, std::size_t i, const std::vector<TripleKey> &facts, Subst s,
            std::vector<Subst> &out) {
    if (i == r.body.size()) {
        out.push_back(s);
        return;
    }
    for (const auto &f : facts) {
        if (f.relation != r.body[i].relation) continue;
        auto next = s;
        if (unify(r.body[i].subject, Node{f.subject}, next) && unify(r.body[i].object, f.object, next))
            tuples(r, i + 1, facts, next, out);
    }
}

} // namespace

std::set<TripleKey> closure(const std::vector<Triple> &verified, const std::vector<HornRule> &rules,
                            const RelationRegistry &relations) {
    std::set<TripleKey> all;
    for (const auto &t : verified) all.insert(t.key());
    std::set<TripleKey> base = all;
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<TripleKey> facts(all.begin(), all.end());
        for (const auto &r : rules) {
            std::vector<Subst> found;
            tuples(r, 0, facts, {}, found);
            for (const auto &s : found) {
                const auto *sv = std::get_if<RuleVar>(&r.head.subject);
                if (!sv) continue;
                const auto *subject = std::get_if<EntityId>(&s.at(sv->name));
                if (!subject) continue;
                Node object;
                if (const auto *ov = std::get_if<RuleVar>(&r.head.object)) {
                    object = s.at(ov->name);
                } else {
                    const auto *rel = relations.find(r.head.relation);
                    const auto &text = std::get<RuleConst>(r.head.object).text;
                    if (rel && rel->range.kind == RangeKind::type) object = TypeName{text};
                    else object = Literal{text};
                }
                if (all.insert(TripleKey{*subject, r.head.relation, object}).second) changed = true;
            }
        }
    }
    std::set<TripleKey> derived;
    std::set_difference(all.begin(), all.end(), base.begin(), base.end(), std::inserter(derived, derived.end()));
    return derived;
}

} // namespace kad::oracle

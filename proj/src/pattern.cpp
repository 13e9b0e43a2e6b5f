#include "kad/pattern.hpp"

#include "kad/error.hpp"
#include "kad/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace kad {

bool is_var_name(std::string_view s) {
    if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c) || std::isdigit(c) || c == '_'; });
}

bool is_determiner(std::string_view norm) { return norm == "a" || norm == "an" || norm == "the"; }

const VarDecl *RuleDef::var(std::string_view name) const {
    for (const auto &v : vars)
        if (v.name == name) return &v;
    return nullptr;
}

std::size_t RuleDef::literal_count() const {
    return std::count_if(pattern.begin(), pattern.end(), [](const auto &e) { return std::holds_alternative<Word>(e); });
}

std::size_t RuleDef::wildcard_count() const {
    return std::count_if(pattern.begin(), pattern.end(),
                         [](const auto &e) { return std::holds_alternative<Wildcard>(e); });
}

// ---- parsing ------------------------------------------------------------------

namespace {

struct RawKdp {
    text::RawTriple triple;
    int line;
};

struct RawBelief {
    std::optional<RawKdp> main;
    std::vector<RawKdp> aux;
    int line;
};

struct RuleDraft {
    RuleDef rule;
    int pattern_line = 0;
    int response_line = 0;
    bool has_pattern = false;
    std::map<std::string, int> var_lines;
    std::vector<RawKdp> facts;
    std::vector<RawBelief> beliefs;
};

VarDecl parse_var(std::string_view rest, int line) {
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParseError(line, "expected 'var <NAME>: <kind>'");
    VarDecl d;
    d.name = text::trim(rest.substr(0, colon));
    if (!is_var_name(d.name)) throw ParseError(line, "bad variable name '" + d.name + "' (use [A-Z][A-Z0-9_]*)");
    auto kind = text::trim(rest.substr(colon + 1));
    auto k = text::lower(kind);
    if (k == "entity(name)") {
        d.kind = VarKind::entity_name;
    } else if (k == "entity(address)") {
        d.kind = VarKind::entity_address;
    } else if (k == "text") {
        d.kind = VarKind::text;
    } else if (k.rfind("focus(", 0) == 0 && k.back() == ')') {
        d.kind = VarKind::focus;
        d.focus_type = text::trim(kind.substr(6, kind.size() - 7));
        if (d.focus_type.empty()) throw ParseError(line, "focus() needs a type");
    } else {
        throw ParseError(line, "unknown variable kind '" + kind + "'");
    }
    return d;
}

Pattern parse_pattern(std::string_view src, int line) {
    Pattern p;
    std::istringstream in{std::string(src)};
    for (std::string tok; in >> tok;) {
        if (tok == "*") {
            p.emplace_back(Wildcard{});
        } else if (is_var_name(tok)) {
            p.emplace_back(VarSlot{tok});
        } else {
            auto w = text::lower(text::strip_punct(tok));
            if (w.empty()) throw ParseError(line, "pattern token '" + tok + "' has no word characters");
            p.emplace_back(Word{w});
        }
    }
    return p;
}

Term convert_term(const text::RawTerm &t, const RuleDraft &d, int line) {
    using K = text::RawTerm::Kind;
    switch (t.kind) {
    case K::quoted: return ValueTerm{t.text};
    case K::focus: return FocusTerm{t.text};
    case K::variable: throw ParseError(line, "'?" + t.text + "' is inference-rule syntax; use a declared variable");
    case K::bare:
        if (is_var_name(t.text)) {
            if (!d.rule.var(t.text)) throw ParseError(line, "undeclared variable " + t.text);
            return VarTerm{t.text};
        }
        return ValueTerm{t.text};
    }
    return ValueTerm{t.text};
}

KdpTriple convert(const RawKdp &k, const RuleDraft &d) {
    return {convert_term(k.triple.subject, d, k.line), k.triple.relation.text, convert_term(k.triple.object, d, k.line)};
}

text::RawTriple parse_triple_line(std::string_view value, int line) {
    std::size_t pos = 0;
    auto t = text::parse_raw_triple(value, pos, line);
    if (!text::trim(value.substr(pos)).empty()) throw ParseError(line, "trailing text after triple");
    return t;
}

void check_response(const RuleDraft &d) {
    const auto &r = d.rule.response;
    for (std::size_t p = r.find('{'); p != std::string::npos; p = r.find('{', p + 1)) {
        auto close = r.find('}', p);
        if (close == std::string::npos) throw ParseError(d.response_line, "unterminated '{' in response");
        auto inner = text::trim(std::string_view(r).substr(p + 1, close - p - 1));
        std::string var = inner;
        if (inner.rfind("query(", 0) == 0) {
            auto args = text::split(std::string_view(inner).substr(6, inner.size() - 7), ',');
            if (args.size() != 2 || inner.back() != ')')
                throw ParseError(d.response_line, "expected {query(<VAR>, <relation>)}");
            var = args[0];
        }
        if (!d.rule.var(var)) throw ParseError(d.response_line, "undeclared variable " + var + " in response");
    }
}

RuleDef finish(RuleDraft &d) {
    auto &r = d.rule;
    if (!d.has_pattern) throw ParseError(r.line, "rule " + r.id + " has no pattern");
    bool non_wild = false;
    std::set<std::string> seen;
    for (const auto &e : r.pattern) {
        if (std::holds_alternative<Wildcard>(e)) continue;
        non_wild = true;
        if (auto *v = std::get_if<VarSlot>(&e)) {
            const auto *decl = r.var(v->name);
            if (!decl) throw ParseError(d.pattern_line, "undeclared variable " + v->name);
            if (decl->kind == VarKind::focus)
                throw ParseError(d.pattern_line, "focus variable " + v->name + " cannot appear in a pattern");
            if (!seen.insert(v->name).second)
                throw ParseError(d.pattern_line, "variable " + v->name + " appears twice in the pattern");
        }
    }
    if (!non_wild) throw ParseError(d.pattern_line, "pattern needs at least one word or variable");
    for (const auto &v : r.vars)
        if (v.kind != VarKind::focus && !seen.count(v.name))
            throw ParseError(d.var_lines[v.name], "variable " + v.name + " is declared but not in the pattern");
    for (const auto &f : d.facts) r.facts.push_back(convert(f, d));
    for (const auto &b : d.beliefs) {
        if (!b.main) throw ParseError(b.line, "belief without main:");
        Belief belief{convert(*b.main, d), {}};
        for (const auto &a : b.aux) belief.aux.push_back(convert(a, d));
        r.beliefs.push_back(std::move(belief));
    }
    check_response(d);
    return std::move(r);
}

} // namespace

std::vector<RuleDef> parse_rules(std::string_view source) {
    std::vector<RuleDef> rules;
    std::set<std::string> ids;
    std::optional<RuleDraft> draft;
    std::istringstream in{std::string(source)};
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (!draft) {
            if (line.rfind("rule ", 0) != 0) throw ParseError(line_no, "expected 'rule <id>'");
            auto id = text::trim(std::string_view(line).substr(5));
            if (id.empty() || id.find_first_of(" \t") != std::string::npos) throw ParseError(line_no, "bad rule id");
            if (!ids.insert(id).second) throw ParseError(line_no, "duplicate rule id '" + id + "'");
            draft.emplace();
            draft->rule.id = id;
            draft->rule.line = line_no;
            continue;
        }
        auto &d = *draft;
        if (line == "end") {
            rules.push_back(finish(d));
            draft.reset();
            continue;
        }
        if (line.rfind("var ", 0) == 0) {
            auto decl = parse_var(std::string_view(line).substr(4), line_no);
            if (d.rule.var(decl.name)) throw ParseError(line_no, "variable " + decl.name + " declared twice");
            d.var_lines[decl.name] = line_no;
            d.rule.vars.push_back(std::move(decl));
            continue;
        }
        auto kv = text::key_value(line);
        if (!kv) throw ParseError(line_no, "unrecognized line '" + line + "'");
        const auto &[key, value] = *kv;
        if (key == "pattern") {
            if (d.has_pattern) throw ParseError(line_no, "second pattern in rule " + d.rule.id);
            d.rule.pattern = parse_pattern(value, line_no);
            d.pattern_line = line_no;
            d.has_pattern = true;
        } else if (key == "response") {
            d.rule.response = value;
            d.response_line = line_no;
        } else if (key == "fact") {
            d.facts.push_back({parse_triple_line(value, line_no), line_no});
        } else if (key == "belief") {
            if (!value.empty()) throw ParseError(line_no, "belief: takes no value; use main:/aux: lines");
            d.beliefs.push_back({std::nullopt, {}, line_no});
        } else if (key == "main") {
            if (d.beliefs.empty() || d.beliefs.back().main) throw ParseError(line_no, "main: outside a belief");
            d.beliefs.back().main = RawKdp{parse_triple_line(value, line_no), line_no};
        } else if (key == "aux") {
            if (d.beliefs.empty() || !d.beliefs.back().main) throw ParseError(line_no, "aux: before main:");
            d.beliefs.back().aux.push_back({parse_triple_line(value, line_no), line_no});
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }
    if (draft) throw ParseError(draft->rule.line, "rule " + draft->rule.id + " is missing 'end'");
    return rules;
}

// ---- matching -------------------------------------------------------------------

namespace {

class Matcher {
public:
    Matcher(const Pattern &pattern, const std::vector<VarDecl> &vars, const AnnotatedUtterance &u)
        : pattern_(pattern), u_(u), n_(pattern.size() + 1), m_(u.tokens.size()), dead_(n_ * (m_ + 1), 0) {
        for (const auto &e : pattern)
            if (auto *v = std::get_if<VarSlot>(&e)) {
                auto it = std::find_if(vars.begin(), vars.end(), [&](const VarDecl &d) { return d.name == v->name; });
                kinds_.push_back(it == vars.end() ? VarKind::text : it->kind);
            } else {
                kinds_.push_back(VarKind::text);
            }
    }

    std::optional<Bindings> run() {
        Bindings b;
        if (step(0, 0, b)) return b;
        return std::nullopt;
    }

private:
    // Element index `e` == pattern.size() is the implicit trailing wildcard.
    bool step(std::size_t e, std::size_t pos, Bindings &b) {
        if (e + 1 == n_) return true; // trailing wildcard absorbs the rest
        auto &dead = dead_[e * (m_ + 1) + pos];
        if (dead) return false;
        bool ok = try_element(e, pos, b);
        if (!ok) dead = true;
        return ok;
    }

    bool try_element(std::size_t e, std::size_t pos, Bindings &b) {
        const auto &el = pattern_[e];
        if (std::holds_alternative<Wildcard>(el)) {
            for (auto len = 0u; pos + len <= m_; ++len)
                if (step(e + 1, pos + len, b)) return true;
            return false;
        }
        if (const auto *w = std::get_if<Word>(&el)) return pos < m_ && u_.tokens[pos].norm == w->text && step(e + 1, pos + 1, b);

        const auto &name = std::get<VarSlot>(el).name;
        const auto kind = kinds_[e];
        if (kind == VarKind::text) {
            for (auto len = 1u; pos + len <= m_; ++len) {
                if (step(e + 1, pos + len, b)) {
                    b[name] = BoundValue{join(pos, pos + len), std::nullopt};
                    return true;
                }
            }
            return false;
        }
        const auto want = kind == VarKind::entity_address ? SpanKind::address : SpanKind::name;
        auto try_span = [&](std::size_t at) {
            const auto *span = u_.span_at(at);
            if (!span || span->kind != want) return false;
            if (!step(e + 1, span->end, b)) return false;
            b[name] = BoundValue{span->surface, *span};
            return true;
        };
        if (pos < m_ && is_determiner(u_.tokens[pos].norm) && try_span(pos + 1)) return true;
        return try_span(pos);
    }

    std::string join(std::size_t b, std::size_t e) const {
        std::string out;
        for (auto i = b; i < e; ++i) {
            if (i > b) out += ' ';
            out += u_.tokens[i].text;
        }
        return out;
    }

    const Pattern &pattern_;
    const AnnotatedUtterance &u_;
    std::size_t n_, m_;
    std::vector<VarKind> kinds_;
    std::vector<char> dead_;
};

} // namespace

std::optional<Bindings> match(const Pattern &pattern, const std::vector<VarDecl> &vars, const AnnotatedUtterance &u) {
    return Matcher(pattern, vars, u).run();
}

std::optional<Selection> select_rule(const std::vector<RuleDef> &rules, const AnnotatedUtterance &u) {
    std::optional<Selection> best;
    for (const auto &r : rules) {
        if (best && (r.literal_count() < best->rule->literal_count() ||
                     (r.literal_count() == best->rule->literal_count() &&
                      r.wildcard_count() >= best->rule->wildcard_count())))
            continue;
        if (auto b = match(r.pattern, r.vars, u)) best = Selection{&r, std::move(*b)};
    }
    return best;
}

} // namespace kad

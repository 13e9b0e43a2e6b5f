#include "kad/storage.hpp"

#include "kad/error.hpp"
#include "kad/reasoner.hpp"
#include "kad/text.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace kad {

namespace {

constexpr std::string_view kHeader = "#kadkb v1";

std::string field(std::string_view s) {
    if (s.empty()) return "-";
    if (s == "-") return "\\-";
    return text::escape_field(s);
}

std::string list_field(const std::vector<std::string> &items, char sep) {
    if (items.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i] == "-" ? "\\-" : text::escape_field(items[i], std::string(1, sep));
    }
    return out;
}

template <typename Set> std::vector<std::string> as_vector(const Set &s) { return {s.begin(), s.end()}; }

std::string node_field(const Node &n) {
    if (const auto *e = std::get_if<EntityId>(&n)) return "e:" + std::to_string(e->value);
    if (const auto *t = std::get_if<TypeName>(&n)) return "t:" + text::escape_field(t->name);
    return "v:" + text::escape_field(std::get<Literal>(n).text);
}

std::string id_field(EntityId id) { return std::to_string(id.value); }

void line(std::string &out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto &f : fields) {
        if (!first) out += '\t';
        out += f;
        first = false;
    }
    out += '\n';
}

} // namespace

std::string save_kb(const KbSnapshot &snap) {
    std::string out(kHeader);
    out += '\n';
    const auto &c = snap.counters;
    line(out, {"C", std::to_string(c.next_entity), std::to_string(c.next_queue_item), std::to_string(c.next_pending),
               std::to_string(c.turn)});
    for (const auto &e : snap.entities)
        line(out, {"E", id_field(e.id), field(e.canonical), list_field(as_vector(e.types), ','),
                   list_field(as_vector(e.aliases), '|')});
    for (const auto &t : snap.triples)
        line(out, {"T", id_field(t.subject), field(t.relation), node_field(t.object), to_string(t.status),
                   field(t.provenance)});
    for (const auto &q : snap.queue)
        line(out, {"Q", to_string(q.kind), id_field(q.subject), field(q.relation),
                   q.object ? node_field(*q.object) : "-", list_field(as_vector(q.excluded), ','),
                   std::to_string(q.priority), std::to_string(q.created_turn), std::to_string(q.id),
                   field(q.target.value_or("")), std::to_string(q.pending_id)});
    for (const auto &p : snap.pending) {
        line(out, {"P", std::to_string(p.id), to_string(p.kind), to_string(p.stage), field(p.originator),
                   list_field(as_vector(p.affirmed), ','), id_field(p.target.subject), field(p.target.relation),
                   node_field(p.target.object), field(p.provenance)});
        for (const auto &a : p.aux)
            line(out, {"A", std::to_string(p.id), id_field(a.subject), field(a.relation), node_field(a.object)});
    }
    return out;
}

namespace {

class RecordReader {
public:
    RecordReader(std::vector<std::string> fields, int line) : f_(std::move(fields)), line_(line) {}

    void expect(std::size_t n) const {
        if (f_.size() != n)
            throw ParseError(line_, "record " + f_[0] + " needs " + std::to_string(n - 1) + " fields, got " +
                                        std::to_string(f_.size() - 1));
    }
    std::string str(std::size_t i) const { return f_[i] == "-" ? std::string{} : text::unescape_field(f_[i]); }
    std::optional<std::string> opt(std::size_t i) const {
        if (f_[i] == "-") return std::nullopt;
        return text::unescape_field(f_[i]);
    }
    std::vector<std::string> list(std::size_t i, char sep) const {
        std::vector<std::string> out;
        if (f_[i] == "-") return out;
        for (const auto &piece : text::split_escaped(f_[i], sep)) out.push_back(text::unescape_field(piece));
        return out;
    }
    template <typename T> T num(std::size_t i) const {
        T v{};
        const auto &s = f_[i];
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(line_, "bad number '" + s + "'");
        return v;
    }
    EntityId entity(std::size_t i) const {
        auto id = EntityId{num<std::uint64_t>(i)};
        if (!id) throw ParseError(line_, "entity id 0 is reserved");
        return id;
    }
    Node node(std::size_t i) const {
        const auto &s = f_[i];
        if (s.size() < 2 || s[1] != ':') throw ParseError(line_, "bad object '" + s + "'");
        auto rest = text::unescape_field(std::string_view(s).substr(2));
        switch (s[0]) {
        case 'e': {
            RecordReader sub({f_[0], s.substr(2)}, line_);
            return sub.entity(1);
        }
        case 't': return TypeName{rest};
        case 'v': return Literal{rest};
        }
        throw ParseError(line_, "bad object '" + s + "'");
    }
    template <typename F> auto wrap(F &&f) const {
        try {
            return f();
        } catch (const ParseError &) {
            throw;
        } catch (const Error &e) {
            throw ParseError(line_, e.what());
        }
    }
    int line() const { return line_; }

private:
    std::vector<std::string> f_;
    int line_;
};

PendingKind pending_kind_from(const std::string &s, int line) {
    for (auto k : {PendingKind::belief, PendingKind::verification, PendingKind::alias})
        if (to_string(k) == s) return k;
    throw ParseError(line, "unknown pending kind '" + s + "'");
}

Stage stage_from(const std::string &s, int line) {
    for (auto st : {Stage::awaiting_confirmation, Stage::awaiting_verification})
        if (to_string(st) == s) return st;
    throw ParseError(line, "unknown stage '" + s + "'");
}

} // namespace

KbSnapshot load_kb(std::string_view source) {
    KbSnapshot snap;
    std::istringstream in{std::string(source)};
    std::string raw;
    if (!std::getline(in, raw) || text::trim(raw) != kHeader) throw ParseError(1, "missing '#kadkb v1' header");

    std::set<EntityId> ids;
    std::map<std::uint64_t, std::size_t> pending_index;
    bool have_counters = false;
    int line_no = 1;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(raw);
        for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
        if (raw.back() == '\t') fields.emplace_back();
        RecordReader r(fields, line_no);
        auto known = [&](EntityId id) {
            if (!ids.count(id)) throw ParseError(line_no, "unknown entity id " + std::to_string(id.value));
            return id;
        };
        auto known_node = [&](Node n) {
            if (const auto *e = std::get_if<EntityId>(&n)) known(*e);
            return n;
        };
        const auto &tag = fields[0];
        if (tag == "C") {
            r.expect(5);
            snap.counters = {r.num<std::uint64_t>(1), r.num<std::uint64_t>(2), r.num<std::uint64_t>(3),
                             r.num<std::int64_t>(4)};
            have_counters = true;
        } else if (tag == "E") {
            r.expect(5);
            EntityNode e;
            e.id = r.entity(1);
            if (!ids.insert(e.id).second) throw ParseError(line_no, "duplicate entity id " + std::to_string(e.id.value));
            e.canonical = r.str(2);
            for (auto &t : r.list(3, ',')) e.types.insert(std::move(t));
            for (auto &a : r.list(4, '|')) e.aliases.insert(std::move(a));
            snap.entities.push_back(std::move(e));
        } else if (tag == "T") {
            r.expect(6);
            Triple t;
            t.subject = known(r.entity(1));
            t.relation = r.str(2);
            t.object = known_node(r.node(3));
            t.status = r.wrap([&] { return status_from_string(r.str(4)); });
            t.provenance = r.str(5);
            snap.triples.push_back(std::move(t));
        } else if (tag == "Q") {
            r.expect(11);
            QueueItem q;
            q.kind = r.wrap([&] { return question_kind_from_string(r.str(1)); });
            q.subject = known(r.entity(2));
            q.relation = r.str(3);
            if (auto o = r.opt(4); o) q.object = known_node(r.node(4));
            for (auto &s : r.list(5, ',')) q.excluded.insert(std::move(s));
            q.priority = r.num<int>(6);
            q.created_turn = r.num<std::int64_t>(7);
            q.id = r.num<std::uint64_t>(8);
            q.target = r.opt(9);
            q.pending_id = r.num<std::uint64_t>(10);
            snap.queue.push_back(std::move(q));
        } else if (tag == "P") {
            r.expect(10);
            PendingItem p;
            p.id = r.num<std::uint64_t>(1);
            p.kind = pending_kind_from(r.str(2), line_no);
            p.stage = stage_from(r.str(3), line_no);
            p.originator = r.str(4);
            for (auto &s : r.list(5, ',')) p.affirmed.insert(std::move(s));
            p.target = {known(r.entity(6)), r.str(7), known_node(r.node(8))};
            p.provenance = r.str(9);
            if (pending_index.count(p.id)) throw ParseError(line_no, "duplicate pending id " + std::to_string(p.id));
            pending_index[p.id] = snap.pending.size();
            snap.pending.push_back(std::move(p));
        } else if (tag == "A") {
            r.expect(5);
            auto owner = pending_index.find(r.num<std::uint64_t>(1));
            if (owner == pending_index.end()) throw ParseError(line_no, "aux triple for unknown pending item");
            snap.pending[owner->second].aux.push_back({known(r.entity(2)), r.str(3), known_node(r.node(4))});
        } else {
            throw ParseError(line_no, "unknown record type '" + tag + "'");
        }
    }
    if (!have_counters) {
        auto &c = snap.counters;
        for (const auto &e : snap.entities) c.next_entity = std::max(c.next_entity, e.id.value + 1);
        for (const auto &q : snap.queue) c.next_queue_item = std::max(c.next_queue_item, q.id + 1);
        for (const auto &p : snap.pending) c.next_pending = std::max(c.next_pending, p.id + 1);
    }
    return snap;
}

// ---- configuration ----------------------------------------------------------------

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path &path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

struct Labels {
    std::string rules = "rules", relations = "relations", schemas = "schemas", gazetteer = "gazetteer",
                inference = "inference", lexicon = "lexicon";
};

EngineConfig load_config_labelled(const ConfigSources &src, const Labels &labels) {
    EngineConfig cfg;
    std::vector<std::string> problems;
    auto report = [&](const std::string &file, int line, const std::string &msg) {
        problems.push_back(file + ":" + std::to_string(line) + ": " + msg);
    };
    auto attempt = [&](const std::string &file, const std::function<void()> &f) {
        try {
            f();
        } catch (const ParseError &e) {
            auto msg = std::string(e.what());
            auto prefix = "line " + std::to_string(e.line()) + ": ";
            if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
            report(file, e.line(), msg);
        } catch (const Error &e) {
            report(file, 0, e.what());
        }
    };
    attempt(labels.rules, [&] { cfg.rules = parse_rules(src.rules); });
    attempt(labels.relations, [&] { cfg.relations = RelationRegistry::parse(src.relations); });
    attempt(labels.schemas, [&] { cfg.schemas = TypeSchemas::parse(src.schemas); });
    attempt(labels.gazetteer, [&] { cfg.gazetteer = Gazetteer::parse(src.gazetteer); });
    attempt(labels.inference, [&] { cfg.inference = parse_inference_rules(src.inference); });
    if (!text::trim(src.lexicon).empty()) attempt(labels.lexicon, [&] { cfg.lexicon = AnswerLexicon::parse(src.lexicon); });

    if (problems.empty()) {
        const auto &reg = cfg.relations;
        auto check_kdp = [&](const RuleDef &r, const KdpTriple &k) {
            if (!reg.find(k.relation))
                report(labels.rules, r.line, "rule " + r.id + " uses unregistered relation '" + k.relation + "'");
        };
        for (const auto &r : cfg.rules) {
            for (const auto &f : r.facts) check_kdp(r, f);
            for (const auto &b : r.beliefs) {
                check_kdp(r, b.main);
                for (const auto &a : b.aux) check_kdp(r, a);
            }
        }
        std::map<std::string, bool> declared; // relation -> declared identifying somewhere
        for (const auto &s : cfg.schemas.all()) {
            if (s.parent && !cfg.schemas.find(*s.parent))
                report(labels.schemas, 0, "type " + s.name + " has unknown parent " + *s.parent);
            for (const auto &p : s.properties) {
                const auto *rel = reg.find(p.relation);
                if (!rel) report(labels.schemas, 0, "type " + s.name + " lists unregistered relation '" + p.relation + "'");
                else if (rel->kind != RelationKind::property)
                    report(labels.schemas, 0, "type " + s.name + " lists non-property relation '" + p.relation + "'");
                else if (p.identifying != rel->identifying)
                    report(labels.schemas, 0, "type " + s.name + ": identifying flag of '" + p.relation +
                                                  "' disagrees with the relation registry");
                declared[p.relation] = declared[p.relation] || p.identifying;
            }
        }
        for (const auto &rel : reg.all()) {
            if (rel.identifying && !declared[rel.name])
                report(labels.relations, 0, "identifying relation '" + rel.name + "' is not a property of any type");
            if (rel.kind == RelationKind::property && !cfg.schemas.all().empty() && !cfg.schemas.find(rel.domain))
                report(labels.relations, 0, "relation '" + rel.name + "' has unknown domain " + rel.domain);
        }
        for (const auto &h : cfg.inference) {
            auto check = [&](const RuleAtom &a) {
                if (!reg.find(a.relation))
                    report(labels.inference, h.line, "unregistered relation '" + a.relation + "'");
            };
            for (const auto &a : h.body) check(a);
            check(h.head);
        }
    }
    if (!problems.empty()) throw ConfigError(text::join(problems, "\n"));
    return cfg;
}

} // namespace

EngineConfig load_config(const ConfigSources &sources) { return load_config_labelled(sources, Labels{}); }

EngineConfig load_config(const ConfigPaths &paths) {
    ConfigSources src;
    Labels labels;
    auto take = [](const std::filesystem::path &p, std::string &into, std::string &label, bool required) {
        if (p.empty()) {
            if (required) throw ConfigError(label + ": no file given");
            return;
        }
        label = p.string();
        into = read_file(p);
    };
    take(paths.rules, src.rules, labels.rules, true);
    take(paths.relations, src.relations, labels.relations, true);
    take(paths.schemas, src.schemas, labels.schemas, false);
    take(paths.gazetteer, src.gazetteer, labels.gazetteer, false);
    take(paths.inference, src.inference, labels.inference, false);
    take(paths.lexicon, src.lexicon, labels.lexicon, false);
    return load_config_labelled(src, labels);
}

ConfigPaths bundle_paths(const std::filesystem::path &dir) {
    ConfigPaths p{dir / "rules.kad", dir / "relations.txt", dir / "schemas.txt",
                  dir / "gazetteer.tsv", dir / "inference.txt", dir / "lexicon.txt"};
    for (auto *opt : {&p.gazetteer, &p.inference, &p.lexicon})
        if (!std::filesystem::exists(*opt)) opt->clear();
    return p;
}

} // namespace kad

#include "kad/kb.hpp"

#include "kad/entity.hpp"
#include "kad/error.hpp"
#include "kad/reasoner.hpp"
#include "kad/text.hpp"

#include <algorithm>
#include <sstream>

namespace kad {

std::string to_string(Status s) {
    switch (s) {
    case Status::pending_confirmation: return "pending-confirmation";
    case Status::pending_verification: return "pending-verification";
    case Status::verified: return "verified";
    case Status::inferred: return "inferred";
    }
    return "?";
}

Status status_from_string(const std::string &s) {
    if (s == "pending-confirmation") return Status::pending_confirmation;
    if (s == "pending-verification") return Status::pending_verification;
    if (s == "verified") return Status::verified;
    if (s == "inferred") return Status::inferred;
    throw Error("unknown status '" + s + "'");
}

std::string to_string(RelationKind k) {
    switch (k) {
    case RelationKind::property: return "property";
    case RelationKind::type: return "type";
    case RelationKind::other: return "other";
    }
    return "?";
}

std::string to_string(RangeKind k) {
    switch (k) {
    case RangeKind::type: return "type";
    case RangeKind::entity: return "entity";
    case RangeKind::address: return "address";
    case RangeKind::name: return "name";
    case RangeKind::text: return "text";
    case RangeKind::yesno: return "yesno";
    }
    return "?";
}

// ---- templates ------------------------------------------------------------------

bool template_is_valid(std::string_view tmpl, std::string *bad) {
    for (auto p = tmpl.find('{'); p != std::string_view::npos; p = tmpl.find('{', p + 1)) {
        auto close = tmpl.find('}', p);
        auto name = close == std::string_view::npos ? tmpl.substr(p) : tmpl.substr(p + 1, close - p - 1);
        if (close == std::string_view::npos || (name != "E1" && name != "E2" && name != "ID")) {
            if (bad) *bad = std::string(name);
            return false;
        }
    }
    return true;
}

std::string render_template(std::string_view tmpl, std::string_view e1, std::string_view e2, std::string_view id) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        auto p = tmpl.find('{', i);
        if (p == std::string_view::npos) {
            out += tmpl.substr(i);
            break;
        }
        out += tmpl.substr(i, p - i);
        auto close = tmpl.find('}', p);
        if (close == std::string_view::npos) throw RenderError("unterminated placeholder in '" + std::string(tmpl) + "'");
        auto name = tmpl.substr(p + 1, close - p - 1);
        if (name == "E1") {
            out += e1;
        } else if (name == "E2") {
            out += e2;
        } else if (name == "ID") {
            if (id.empty()) throw RenderError("no identifying values for '" + std::string(tmpl) + "'");
            out += id;
        } else {
            throw RenderError("unknown placeholder {" + std::string(name) + "}");
        }
        i = close + 1;
    }
    return out;
}

// ---- relation registry ----------------------------------------------------------

namespace {

bool parse_bool(const std::string &v, int line) {
    auto l = text::lower(v);
    if (l == "yes" || l == "true") return true;
    if (l == "no" || l == "false") return false;
    throw ParseError(line, "expected yes/no, got '" + v + "'");
}

Range parse_range(const std::string &v, int line) {
    auto l = text::lower(v);
    if (l == "type") return {RangeKind::type, {}};
    if (l == "address") return {RangeKind::address, {}};
    if (l == "name") return {RangeKind::name, {}};
    if (l == "text") return {RangeKind::text, {}};
    if (l == "yesno") return {RangeKind::yesno, {}};
    if (l.rfind("entity(", 0) == 0 && l.back() == ')') {
        auto t = text::trim(std::string_view(v).substr(7, v.size() - 8));
        if (t.empty()) throw ParseError(line, "entity() range needs a type");
        return {RangeKind::entity, t};
    }
    throw ParseError(line, "unknown range '" + v + "'");
}

void finish_relation(RelationDef &def, int line) {
    if (def.kind == RelationKind::property && def.domain.empty())
        throw ParseError(line, "property relation " + def.name + " needs a domain");
    if (def.qf.empty() || def.qv.empty()) throw ParseError(line, "relation " + def.name + " needs qf: and qv:");
    if (def.kind == RelationKind::type) def.range = {RangeKind::type, {}};
    for (const auto *t : {&def.qf, &def.qv}) {
        std::string bad;
        if (!template_is_valid(*t, &bad)) throw ParseError(line, "bad placeholder {" + bad + "} in " + def.name);
    }
    for (const auto *t : {&def.qf_later, &def.qv_later}) {
        std::string bad;
        if (*t && !template_is_valid(**t, &bad)) throw ParseError(line, "bad placeholder {" + bad + "} in " + def.name);
    }
}

} // namespace

RelationRegistry RelationRegistry::parse(std::string_view source) {
    RelationRegistry reg;
    std::optional<RelationDef> cur;
    int cur_line = 0, line_no = 0;
    auto flush = [&] {
        if (!cur) return;
        finish_relation(*cur, cur_line);
        if (reg.find(cur->name)) throw ParseError(cur_line, "duplicate relation " + cur->name);
        reg.add(std::move(*cur));
        cur.reset();
    };
    std::istringstream in{std::string(source)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("relation ", 0) == 0) {
            flush();
            cur.emplace();
            cur->name = text::trim(std::string_view(line).substr(9));
            cur_line = line_no;
            if (cur->name.empty()) throw ParseError(line_no, "relation needs a name");
            continue;
        }
        if (!cur) throw ParseError(line_no, "expected 'relation <name>'");
        auto kv = text::key_value(line);
        if (!kv) throw ParseError(line_no, "expected '<key>: <value>'");
        const auto &[key, value] = *kv;
        if (key == "kind") {
            auto k = text::lower(value);
            if (k == "property") cur->kind = RelationKind::property;
            else if (k == "type" || k == "is-a") cur->kind = RelationKind::type;
            else if (k == "other") cur->kind = RelationKind::other;
            else throw ParseError(line_no, "unknown kind '" + value + "'");
        } else if (key == "domain") {
            cur->domain = value;
        } else if (key == "range") {
            cur->range = parse_range(value, line_no);
        } else if (key == "identifying") {
            cur->identifying = parse_bool(value, line_no);
        } else if (key == "qf") {
            cur->qf = value;
        } else if (key == "qv") {
            cur->qv = value;
        } else if (key == "qf-later") {
            cur->qf_later = value;
        } else if (key == "qv-later") {
            cur->qv_later = value;
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }
    flush();
    return reg;
}

void RelationRegistry::add(RelationDef def) { defs_.push_back(std::move(def)); }

const RelationDef *RelationRegistry::find(std::string_view name) const {
    for (const auto &d : defs_)
        if (d.name == name) return &d;
    return nullptr;
}

// ---- type schemas ---------------------------------------------------------------

TypeSchemas TypeSchemas::parse(std::string_view source) {
    TypeSchemas out;
    std::map<std::string, int> lines;
    std::istringstream in{std::string(source)};
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream words(line);
        std::vector<std::string> w;
        for (std::string x; words >> x;) w.push_back(x);
        if (w[0] == "type") {
            if (w.size() != 2 && !(w.size() == 4 && w[2] == "parent"))
                throw ParseError(line_no, "expected 'type <name> [parent <name>]'");
            if (out.find(w[1])) throw ParseError(line_no, "duplicate type " + w[1]);
            TypeSchema s{w[1], w.size() == 4 ? std::optional<std::string>(w[3]) : std::nullopt, {}};
            out.add(std::move(s));
            lines[w[1]] = line_no;
        } else if (w[0] == "prop") {
            if (out.schemas_.empty()) throw ParseError(line_no, "prop before any type");
            if (w.size() != 2 && !(w.size() == 3 && w[2] == "identifying"))
                throw ParseError(line_no, "expected 'prop <relation> [identifying]'");
            auto &props = out.schemas_.back().properties;
            if (std::any_of(props.begin(), props.end(), [&](const PropertyDecl &p) { return p.relation == w[1]; }))
                throw ParseError(line_no, "duplicate prop " + w[1]);
            props.push_back({w[1], w.size() == 3});
        } else {
            throw ParseError(line_no, "unknown line '" + line + "'");
        }
    }
    for (const auto &s : out.schemas_) {
        std::set<std::string> seen{s.name};
        for (auto p = s.parent; p;) {
            if (!seen.insert(*p).second) throw ParseError(lines[s.name], "type hierarchy cycle through " + s.name);
            const auto *ps = out.find(*p);
            p = ps ? ps->parent : std::nullopt;
        }
    }
    return out;
}

void TypeSchemas::add(TypeSchema schema) { schemas_.push_back(std::move(schema)); }

const TypeSchema *TypeSchemas::find(std::string_view name) const {
    for (const auto &s : schemas_)
        if (s.name == name) return &s;
    return nullptr;
}

std::vector<const TypeSchema *> TypeSchemas::chain(std::string_view type) const {
    std::vector<const TypeSchema *> out;
    for (const auto *s = find(type); s && out.size() <= schemas_.size(); s = s->parent ? find(*s->parent) : nullptr)
        out.push_back(s);
    return out;
}

bool TypeSchemas::is_a(std::string_view type, std::string_view ancestor) const {
    if (type == ancestor) return true;
    for (const auto *s : chain(type))
        if (s->name == ancestor) return true;
    return false;
}

// ---- knowledge base -------------------------------------------------------------

KnowledgeBase::KnowledgeBase(RelationRegistry relations, TypeSchemas schemas, std::vector<HornRule> rules)
    : relations_(std::move(relations)), schemas_(std::move(schemas)), rules_(std::move(rules)) {}

namespace {

bool has_name(const EntityNode &n, std::string_view name) {
    if (text::iequals(n.canonical, name)) return true;
    return std::any_of(n.aliases.begin(), n.aliases.end(), [&](const std::string &a) { return text::iequals(a, name); });
}

} // namespace

Registration KnowledgeBase::register_entity(std::string_view raw_name, std::string_view type) {
    auto name = text::trim(raw_name);
    if (auto id = find_entity(name, type)) return {*id, false, std::nullopt};

    std::optional<AliasProposal> alias;
    for (const auto &[id, node] : entities_) {
        if (!node.types.count(std::string(type))) continue;
        bool similar = name_similarity(name, node.canonical) == NameVerdict::candidate_alias;
        for (const auto &a : node.aliases) similar = similar || name_similarity(name, a) == NameVerdict::candidate_alias;
        if (similar) {
            alias = AliasProposal{EntityId{next_entity_}, id};
            break;
        }
    }
    EntityId id{next_entity_++};
    entities_[id] = EntityNode{id, name, {std::string(type)}, {}};
    return {id, true, alias};
}

std::optional<EntityId> KnowledgeBase::find_entity(std::string_view name, std::string_view type) const {
    auto n = text::trim(name);
    for (const auto &[id, node] : entities_)
        if (node.types.count(std::string(type)) && has_name(node, n)) return id;
    return std::nullopt;
}

std::vector<EntityId> KnowledgeBase::find_by_name(std::string_view name) const {
    std::vector<EntityId> out;
    auto n = text::trim(name);
    for (const auto &[id, node] : entities_)
        if (has_name(node, n)) out.push_back(id);
    return out;
}

const EntityNode *KnowledgeBase::entity(EntityId id) const {
    auto it = entities_.find(id);
    return it == entities_.end() ? nullptr : &it->second;
}

std::vector<EntityNode> KnowledgeBase::entities() const {
    std::vector<EntityNode> out;
    for (const auto &kv : entities_) out.push_back(kv.second);
    return out;
}

std::set<std::string> KnowledgeBase::instance_types(EntityId id) const {
    std::set<std::string> out;
    if (const auto *n = entity(id)) out = n->types;
    for (const auto &[seq, t] : by_seq_) {
        if (t.subject != id || t.status != Status::verified) continue;
        const auto *rel = relations_.find(t.relation);
        if (rel && rel->kind == RelationKind::type)
            if (const auto *tn = std::get_if<TypeName>(&t.object)) out.insert(tn->name);
    }
    return out;
}

void KnowledgeBase::merge_entities(EntityId from, EntityId into) {
    if (from == into) return;
    auto fit = entities_.find(from);
    auto iit = entities_.find(into);
    if (fit == entities_.end() || iit == entities_.end()) throw Error("merge of unknown entity");
    auto &target = iit->second;
    auto add_alias = [&](const std::string &n) {
        if (!has_name(target, n)) target.aliases.insert(n);
    };
    add_alias(fit->second.canonical);
    for (const auto &a : fit->second.aliases) add_alias(a);
    target.types.insert(fit->second.types.begin(), fit->second.types.end());

    auto remap = [&](TripleKey k) {
        if (k.subject == from) k.subject = into;
        if (auto *e = std::get_if<EntityId>(&k.object); e && *e == from) k.object = into;
        return k;
    };
    std::vector<std::uint64_t> seqs;
    for (const auto &kv : by_seq_) seqs.push_back(kv.first);
    bool verified_changed = false;
    for (auto seq : seqs) {
        auto &t = by_seq_.at(seq);
        auto old_key = t.key();
        auto new_key = remap(old_key);
        if (new_key == old_key) continue;
        verified_changed = verified_changed || t.status == Status::verified;
        index_.erase(old_key);
        journal_.push_back({old_key, std::nullopt});
        if (auto hit = index_.find(new_key); hit != index_.end()) {
            auto &keep = by_seq_.at(hit->second);
            if (t.status > keep.status) {
                keep.status = t.status;
                journal_.push_back({new_key, keep.status});
            }
            by_seq_.erase(seq);
        } else {
            t.subject = new_key.subject;
            t.object = new_key.object;
            index_[new_key] = seq;
            journal_.push_back({new_key, t.status});
        }
    }
    entities_.erase(fit);
    if (verified_changed) recompute_inferred();
}

std::string KnowledgeBase::subject_type(const CandidateTriple &c) const {
    if (c.subject.id)
        if (const auto *n = entity(*c.subject.id); n && !n->types.empty()) return *n->types.begin();
    const auto *rel = relations_.find(c.relation);
    if (!rel) throw ConfigError("unregistered relation '" + c.relation + "'");
    if (rel->kind == RelationKind::type) return c.object.name;
    if (!rel->domain.empty()) return rel->domain;
    return "thing";
}

Grounded KnowledgeBase::ground(const CandidateTriple &c) {
    const auto *rel = relations_.find(c.relation);
    if (!rel) throw ConfigError("unregistered relation '" + c.relation + "'");
    Grounded g;
    if (c.subject.id) {
        g.key.subject = *c.subject.id;
    } else {
        auto r = register_entity(c.subject.name, subject_type(c));
        g.key.subject = r.id;
        if (r.alias) g.aliases.push_back(*r.alias);
    }
    g.key.relation = c.relation;
    switch (rel->range.kind) {
    case RangeKind::type: g.key.object = TypeName{c.object.name}; break;
    case RangeKind::entity:
        if (c.object.id) {
            g.key.object = *c.object.id;
        } else {
            auto r = register_entity(c.object.name, rel->range.entity_type);
            g.key.object = r.id;
            if (r.alias) g.aliases.push_back(*r.alias);
        }
        break;
    case RangeKind::yesno: g.key.object = Literal{text::lower(c.object.name)}; break;
    default: g.key.object = Literal{c.object.name};
    }
    return g;
}

std::optional<TripleKey> KnowledgeBase::resolve(const CandidateTriple &c) const {
    const auto *rel = relations_.find(c.relation);
    if (!rel) throw ConfigError("unregistered relation '" + c.relation + "'");
    TripleKey k;
    if (c.subject.id) {
        k.subject = *c.subject.id;
    } else if (auto id = find_entity(c.subject.name, subject_type(c))) {
        k.subject = *id;
    } else {
        return std::nullopt;
    }
    k.relation = c.relation;
    switch (rel->range.kind) {
    case RangeKind::type: k.object = TypeName{c.object.name}; break;
    case RangeKind::entity:
        if (c.object.id) {
            k.object = *c.object.id;
        } else if (auto id = find_entity(c.object.name, rel->range.entity_type)) {
            k.object = *id;
        } else {
            return std::nullopt;
        }
        break;
    case RangeKind::yesno: k.object = Literal{text::lower(c.object.name)}; break;
    default: k.object = Literal{c.object.name};
    }
    return k;
}

void KnowledgeBase::check_domain_range(const TripleKey &key) const {
    const auto *rel = relations_.find(key.relation);
    if (!rel) throw ConfigError("unregistered relation '" + key.relation + "'");
    if (!entity(key.subject)) throw DomainError("unknown subject entity #" + std::to_string(key.subject.value));
    if (rel->kind == RelationKind::property) {
        auto types = instance_types(key.subject);
        bool ok = std::any_of(types.begin(), types.end(), [&](const std::string &t) { return schemas_.is_a(t, rel->domain); });
        if (!ok) throw DomainError(display(key.subject) + " is not a " + rel->domain + " (relation " + rel->name + ")");
    }
    bool range_ok = true;
    switch (rel->range.kind) {
    case RangeKind::type: range_ok = std::holds_alternative<TypeName>(key.object); break;
    case RangeKind::entity: {
        const auto *e = std::get_if<EntityId>(&key.object);
        range_ok = e && entity(*e);
        break;
    }
    case RangeKind::yesno: {
        const auto *l = std::get_if<Literal>(&key.object);
        range_ok = l && (l->text == "yes" || l->text == "no");
        break;
    }
    default: range_ok = std::holds_alternative<Literal>(key.object);
    }
    if (!range_ok) throw DomainError("object does not fit the range of " + rel->name);
}

Effect KnowledgeBase::incorporate(const TripleKey &key, Status status, std::string provenance) {
    if (status == Status::inferred) throw Error("inferred triples are derived, not incorporated");
    check_domain_range(key);
    if (auto it = index_.find(key); it != index_.end()) {
        auto &t = by_seq_.at(it->second);
        if (t.status >= status) return Effect::merged_noop;
        t.status = status;
        journal_.push_back({key, status});
        if (status == Status::verified) recompute_inferred();
        return Effect::status_upgraded;
    }
    auto seq = next_seq_++;
    by_seq_[seq] = Triple{key.subject, key.relation, key.object, status, std::move(provenance)};
    index_[key] = seq;
    journal_.push_back({key, status});
    if (status == Status::verified) recompute_inferred();
    return Effect::added;
}

KnowledgeBase::CandidateResult KnowledgeBase::incorporate(const CandidateTriple &c, Status status) {
    auto g = ground(c);
    auto effect = incorporate(g.key, status, c.provenance);
    return {effect, std::move(g)};
}

std::vector<Triple> KnowledgeBase::query(std::optional<EntityId> subject, std::optional<std::string> relation,
                                         std::optional<Node> object) const {
    auto fits = [&](const Triple &t) {
        return (!subject || t.subject == *subject) && (!relation || t.relation == *relation) &&
               (!object || t.object == *object);
    };
    std::vector<Triple> out;
    for (const auto &[seq, t] : by_seq_)
        if (t.status == Status::verified && fits(t)) out.push_back(t);
    for (const auto &t : inferred_)
        if (fits(t)) out.push_back(t);
    return out;
}

bool KnowledgeBase::remove(const TripleKey &key) {
    auto it = index_.find(key);
    if (it == index_.end()) return false;
    bool was_verified = by_seq_.at(it->second).status == Status::verified;
    by_seq_.erase(it->second);
    index_.erase(it);
    journal_.push_back({key, std::nullopt});
    if (was_verified) recompute_inferred();
    return true;
}

std::optional<Status> KnowledgeBase::stored_status(const TripleKey &key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return by_seq_.at(it->second).status;
}

const Triple *KnowledgeBase::stored(const TripleKey &key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &by_seq_.at(it->second);
}

bool KnowledgeBase::known(const TripleKey &key) const {
    if (stored_status(key) == Status::verified) return true;
    return std::any_of(inferred_.begin(), inferred_.end(), [&](const Triple &t) { return t.key() == key; });
}

bool KnowledgeBase::has_value(EntityId subject, std::string_view relation, Status at_least) const {
    for (const auto &[seq, t] : by_seq_)
        if (t.subject == subject && t.relation == relation && t.status >= at_least) return true;
    if (at_least <= Status::inferred)
        for (const auto &t : inferred_)
            if (t.subject == subject && t.relation == relation) return true;
    return false;
}

std::vector<std::string> KnowledgeBase::property_order(EntityId id) const {
    std::vector<std::string> identifying, rest;
    auto seen = [&](const std::string &r) {
        return std::find(identifying.begin(), identifying.end(), r) != identifying.end() ||
               std::find(rest.begin(), rest.end(), r) != rest.end();
    };
    for (const auto &type : instance_types(id))
        for (const auto *schema : schemas_.chain(type))
            for (const auto &p : schema->properties)
                if (!seen(p.relation)) (p.identifying ? identifying : rest).push_back(p.relation);
    identifying.insert(identifying.end(), rest.begin(), rest.end());
    return identifying;
}

std::vector<std::string> KnowledgeBase::missing_properties(EntityId id) const {
    std::vector<std::string> out;
    for (const auto &rel : property_order(id))
        if (!has_value(id, rel, Status::verified)) out.push_back(rel);
    return out;
}

bool KnowledgeBase::is_property_of(std::string_view relation, EntityId subject) const {
    auto order = property_order(subject);
    return std::find(order.begin(), order.end(), relation) != order.end();
}

bool KnowledgeBase::is_identifying(std::string_view relation, EntityId subject) const {
    for (const auto &type : instance_types(subject))
        for (const auto *schema : schemas_.chain(type))
            for (const auto &p : schema->properties)
                if (p.relation == relation && p.identifying) return true;
    return false;
}

std::vector<std::string> KnowledgeBase::identifying_values(EntityId id) const {
    std::vector<std::string> out;
    for (const auto &rel : property_order(id)) {
        if (!is_identifying(rel, id)) break;
        for (const auto &t : query(id, rel)) out.push_back(display(t.object));
    }
    return out;
}

std::string KnowledgeBase::display(const Node &n) const {
    if (const auto *e = std::get_if<EntityId>(&n)) {
        const auto *node = entity(*e);
        return node ? node->canonical : "#" + std::to_string(e->value);
    }
    if (const auto *t = std::get_if<TypeName>(&n)) return t->name;
    return std::get<Literal>(n).text;
}

std::string KnowledgeBase::display(const TripleKey &k) const {
    return "(" + display(Node{k.subject}) + ", " + k.relation + ", " + display(k.object) + ")";
}

std::vector<Triple> KnowledgeBase::triples() const {
    std::vector<Triple> out;
    out.reserve(by_seq_.size());
    for (const auto &kv : by_seq_) out.push_back(kv.second);
    return out;
}

std::vector<Delta> KnowledgeBase::take_journal() { return std::exchange(journal_, {}); }

void KnowledgeBase::restore(std::vector<EntityNode> entities, std::vector<Triple> triples, std::uint64_t next_entity) {
    entities_.clear();
    by_seq_.clear();
    index_.clear();
    inferred_.clear();
    next_seq_ = 1;
    for (auto &e : entities) entities_[e.id] = std::move(e);
    next_entity_ = next_entity;
    for (auto &t : triples) {
        if (t.status == Status::inferred) continue;
        auto key = t.key();
        auto seq = next_seq_++;
        index_[key] = seq;
        by_seq_[seq] = std::move(t);
    }
    recompute_inferred();
    journal_.clear();
}

void KnowledgeBase::recompute_inferred() {
    if (rules_.empty() && inferred_.empty()) return;
    std::vector<Triple> verified;
    for (const auto &[seq, t] : by_seq_)
        if (t.status == Status::verified) verified.push_back(t);
    auto fresh = closure(verified, rules_, relations_);
    std::set<TripleKey> old_keys, new_keys;
    for (const auto &t : inferred_) old_keys.insert(t.key());
    for (const auto &t : fresh) new_keys.insert(t.key());
    for (const auto &t : inferred_)
        if (!new_keys.count(t.key()) && !index_.count(t.key())) journal_.push_back({t.key(), std::nullopt});
    for (const auto &t : fresh)
        if (!old_keys.count(t.key())) journal_.push_back({t.key(), Status::inferred});
    inferred_ = std::move(fresh);
}

} // namespace kad

#include "kad/controller.hpp"

#include "kad/error.hpp"
#include "kad/storage.hpp"
#include "kad/text.hpp"

#include <algorithm>

namespace kad {

struct Engine::TurnScratch {
    std::vector<AliasProposal> merged;
};

Engine::Engine(EngineConfig config, EngineOptions options)
    : config_(std::move(config)), options_(std::move(options)), policy_(std::make_unique<FocusTypePolicy>()),
      kb_(config_.relations, config_.schemas, config_.inference) {
    if (options_.affirmations_required < 1) throw ConfigError("k must be at least 1");
    if (options_.rate_limit < 0) throw ConfigError("rate limit must not be negative");
    lifecycle_.affirmations_required = options_.affirmations_required;
}

SessionId Engine::open_session() {
    std::lock_guard lock(mutex_);
    SessionId id;
    do {
        id = "s" + std::to_string(next_session_++);
    } while (sessions_.count(id));
    sessions_[id].id = id;
    return id;
}

void Engine::open_session(const SessionId &id) {
    std::lock_guard lock(mutex_);
    if (id.empty()) throw Error("session id must not be empty");
    sessions_[id].id = id;
}

bool Engine::has_session(const SessionId &id) const {
    std::lock_guard lock(mutex_);
    return sessions_.count(id) > 0;
}

SessionState &Engine::session_locked(const SessionId &id) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSession(id);
    return it->second;
}

TurnOutcome Engine::handle_turn(const SessionId &session, std::string_view text) {
    std::lock_guard lock(mutex_);
    auto &s = session_locked(session);
    ++turn_;
    ++s.turn_index;
    s.rate.tick();
    kb_.take_journal();

    TurnOutcome outcome;
    TurnScratch scratch;
    if (s.outstanding) outcome.answer_consumed = apply_answer(s, text, scratch);
    if (outcome.answer_consumed) {
        outcome.reply = options_.acknowledgement;
    } else {
        auto annotated = annotate(text, config_.gazetteer);
        if (auto sel = select_rule(config_.rules, annotated)) {
            learn(s, *sel->rule, sel->bindings, scratch);
            focus_on_bindings(s, *sel->rule, sel->bindings);
            outcome.reply = render_response(*sel->rule, sel->bindings, s);
            outcome.rule_id = sel->rule->id;
        } else {
            outcome.reply = options_.fallback_reply;
        }
    }
    ask_next(s, outcome);
    outcome.learned = drain_journal();
    return outcome;
}

bool Engine::apply_answer(SessionState &s, std::string_view text, TurnScratch &scratch) {
    auto outstanding = *s.outstanding;
    s.outstanding.reset();
    const auto *found = queue_.find(outstanding);
    if (!found) return false;
    auto item = *found;
    auto cls = config_.lexicon.classify(text);

    auto advance = [&](Stage stage) {
        if (!store_.find(item.pending_id)) {
            queue_.remove(item.id);
            return;
        }
        auto tr = store_.advance(item.pending_id, {stage, cls, s.id}, kb_, queue_, lifecycle_, turn_);
        if (tr.merged) {
            handle_alias_merge(*tr.merged);
            scratch.merged.push_back(*tr.merged);
        }
    };

    switch (item.kind) {
    case QuestionKind::cross_verify:
        advance(Stage::awaiting_verification);
        return true;
    case QuestionKind::belief_confirm:
    case QuestionKind::alias_confirm:
        if (cls == AnswerClass::other) {
            queue_.requeue(item.id, turn_);
            return false;
        }
        advance(Stage::awaiting_confirmation);
        return true;
    case QuestionKind::property_ask: break;
    }

    const auto *rel = config_.relations.find(item.relation);
    if (!rel || !kb_.entity(item.subject)) {
        queue_.remove(item.id);
        return false;
    }
    std::optional<std::string> value;
    if (rel->range.kind == RangeKind::yesno) {
        if (cls != AnswerClass::other) value = cls == AnswerClass::affirmative ? "yes" : "no";
    } else if (rel->range.kind == RangeKind::text || rel->range.kind == RangeKind::type) {
        auto whole = text::strip_punct(text::trim(text));
        if (!whole.empty()) value = whole;
    } else {
        auto want = rel->range.kind == RangeKind::address ? SpanKind::address : SpanKind::name;
        auto annotated = annotate(text, config_.gazetteer);
        for (const auto &span : annotated.spans)
            if (span.kind == want) {
                value = span.surface;
                break;
            }
    }
    if (!value) {
        queue_.requeue(item.id, turn_);
        return false;
    }
    queue_.remove(item.id);

    CandidateTriple c{EntityRef{kb_.display(Node{item.subject}), item.subject}, item.relation, EntityRef{*value, std::nullopt},
                      Origin::fact, 0, provenance_for("answer", s.id, s.turn_index)};
    try {
        if (auto key = kb_.resolve(c); key && (kb_.known(*key) || kb_.stored_status(*key))) return true;
        auto res = kb_.incorporate(c, Status::pending_verification);
        open_aliases(res.grounded.aliases, s.id);
        if (res.effect == Effect::added)
            store_.open_verification(res.grounded.key, s.id, c.provenance, queue_, kb_, turn_);
    } catch (const DomainError &) {
        // The value does not fit the relation; nothing is learned.
    }
    return true;
}

void Engine::learn(SessionState &s, const RuleDef &rule, const Bindings &bindings, TurnScratch &) {
    auto provenance = provenance_for(rule.id, s.id, s.turn_index);
    auto p = plan(instantiate(rule, bindings, s.focus, kb_, provenance), kb_);

    for (const auto &c : p.to_verify) {
        try {
            auto res = kb_.incorporate(c, Status::pending_verification);
            open_aliases(res.grounded.aliases, s.id);
            if (res.effect == Effect::added)
                store_.open_verification(res.grounded.key, s.id, provenance, queue_, kb_, turn_);
        } catch (const DomainError &) {
        }
    }
    for (const auto &conf : p.to_confirm) {
        auto main = kb_.ground(conf.main);
        std::vector<TripleKey> aux;
        auto aliases = main.aliases;
        for (const auto &a : conf.aux) {
            auto g = kb_.ground(a);
            aux.push_back(g.key);
            aliases.insert(aliases.end(), g.aliases.begin(), g.aliases.end());
        }
        open_aliases(aliases, s.id);
        bool duplicate = std::any_of(store_.items().begin(), store_.items().end(), [&](const auto &kv) {
            return kv.second.kind == PendingKind::belief && kv.second.target == main.key;
        });
        if (!duplicate) store_.open_belief(main.key, std::move(aux), s.id, provenance, queue_, kb_, turn_);
    }
}

void Engine::focus_on_bindings(SessionState &s, const RuleDef &rule, const Bindings &bindings) {
    for (const auto &el : rule.pattern) {
        const auto *slot = std::get_if<VarSlot>(&el);
        if (!slot) continue;
        const auto *decl = rule.var(slot->name);
        auto it = bindings.find(slot->name);
        if (!decl || !decl->is_entity() || it == bindings.end()) continue;
        for (auto id : kb_.find_by_name(it->second.text)) focus_on_entity(s, id);
    }
}

void Engine::focus_on_entity(SessionState &s, EntityId id) {
    for (const auto &type : kb_.instance_types(id)) {
        s.focus.update(type, id);
        for (const auto *schema : config_.schemas.chain(type)) s.focus.update(schema->name, id);
    }
}

void Engine::handle_alias_merge(const AliasProposal &merged) {
    for (auto &[id, s] : sessions_) s.focus.replace_entity(merged.provisional, merged.existing);
}

void Engine::open_aliases(const std::vector<AliasProposal> &aliases, const SessionId &originator) {
    for (const auto &a : aliases)
        if (kb_.entity(a.provisional) && kb_.entity(a.existing)) store_.open_alias(a, originator, queue_, turn_);
}

void Engine::ask_next(SessionState &s, TurnOutcome &outcome) {
    AskContext ctx{s.id, s.outstanding.has_value(), s.rate, options_.rate_limit, &s.focus};
    auto item = queue_.next_for(ctx, kb_, *policy_);
    if (!item) return;
    auto text = render(*item, kb_, s.focus);
    s.outstanding = item->id;
    s.rate.reset();
    focus_on_entity(s, item->subject);
    outcome.asked = AskedQuestion{std::move(text), *item};
}

std::string Engine::render_response(const RuleDef &rule, const Bindings &bindings, const SessionState &s) const {
    auto value_of = [&](const std::string &var) -> std::string {
        const auto *decl = rule.var(var);
        if (decl && decl->kind == VarKind::focus) {
            auto id = resolve_focus(s.focus, decl->focus_type);
            return id ? kb_.display(Node{*id}) : std::string{};
        }
        auto it = bindings.find(var);
        return it == bindings.end() ? std::string{} : it->second.text;
    };
    const auto &r = rule.response;
    std::string out;
    std::size_t i = 0;
    while (i < r.size()) {
        auto p = r.find('{', i);
        if (p == std::string::npos) {
            out += r.substr(i);
            break;
        }
        out += r.substr(i, p - i);
        auto close = r.find('}', p);
        auto inner = text::trim(std::string_view(r).substr(p + 1, close - p - 1));
        if (inner.rfind("query(", 0) == 0) {
            auto args = text::split(std::string_view(inner).substr(6, inner.size() - 7), ',');
            auto name = value_of(args[0]);
            std::vector<std::string> values;
            for (auto id : kb_.find_by_name(name))
                for (const auto &t : kb_.query(id, args[1])) values.push_back(kb_.display(t.object));
            out += values.empty() ? "unknown" : text::join(values, ", ");
        } else {
            out += value_of(inner);
        }
        i = close + 1;
    }
    return out.empty() ? options_.fallback_reply : out;
}

std::vector<LearnedEffect> Engine::drain_journal() {
    std::vector<LearnedEffect> out;
    for (auto &d : kb_.take_journal())
        out.push_back({d.key, d.status, kb_.display(Node{d.key.subject}), d.key.relation, kb_.display(d.key.object)});
    return out;
}

TripleKey Engine::seed_verified(const CandidateTriple &candidate) {
    std::lock_guard lock(mutex_);
    auto g = kb_.ground(candidate);
    kb_.incorporate(g.key, Status::verified, candidate.provenance.empty() ? "seed" : candidate.provenance);
    const auto *rel = config_.relations.find(g.key.relation);
    if (rel && rel->kind == RelationKind::type) queue_.enqueue_property_questions(g.key.subject, kb_, turn_);
    kb_.take_journal();
    return g.key;
}

KbSnapshot Engine::snapshot_locked() const {
    KbSnapshot snap;
    snap.entities = kb_.entities();
    snap.triples = kb_.triples();
    snap.queue = queue_.items();
    for (auto &q : snap.queue) q.outstanding.reset(); // session state, not persisted
    for (const auto &kv : store_.items()) snap.pending.push_back(kv.second);
    snap.counters = {kb_.next_entity_id(), queue_.next_id(), store_.next_id(), turn_};
    return snap;
}

KbSnapshot Engine::snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_locked();
}

void Engine::restore(const KbSnapshot &snap) {
    std::lock_guard lock(mutex_);
    kb_.restore(snap.entities, snap.triples, snap.counters.next_entity);
    queue_.restore(snap.queue, snap.counters.next_queue_item);
    queue_.clear_outstanding();
    store_.restore(snap.pending, snap.counters.next_pending);
    turn_ = snap.counters.turn;
    for (auto &[id, s] : sessions_) s.outstanding.reset();
}

std::string Engine::save() const { return save_kb(snapshot()); }

void Engine::load(std::string_view text) { restore(load_kb(text)); }

std::vector<Triple> Engine::triples(std::optional<Status> status) const {
    std::lock_guard lock(mutex_);
    std::vector<Triple> out;
    if (status != Status::inferred)
        for (auto &t : kb_.triples())
            if (!status || t.status == *status) out.push_back(std::move(t));
    if (!status || status == Status::inferred) out.insert(out.end(), kb_.inferred().begin(), kb_.inferred().end());
    return out;
}

std::vector<QueueItem> Engine::queue() const {
    std::lock_guard lock(mutex_);
    return queue_.items();
}

std::vector<PendingItem> Engine::pending() const {
    std::lock_guard lock(mutex_);
    std::vector<PendingItem> out;
    for (const auto &kv : store_.items()) out.push_back(kv.second);
    return out;
}

std::optional<SessionState> Engine::session(const SessionId &id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

std::string Engine::display(const Node &n) const {
    std::lock_guard lock(mutex_);
    return kb_.display(n);
}

std::string Engine::display(EntityId id) const { return display(Node{id}); }

std::string Engine::describe(const QueueItem &item) const {
    std::lock_guard lock(mutex_);
    return render(item, kb_, FocusMap{});
}

std::size_t Engine::entity_count() const {
    std::lock_guard lock(mutex_);
    return kb_.entities().size();
}

} // namespace kad

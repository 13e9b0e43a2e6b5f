#include "kad/verification.hpp"

#include "kad/error.hpp"
#include "kad/text.hpp"

#include <algorithm>
#include <sstream>

namespace kad {

std::string to_string(AnswerClass c) {
    switch (c) {
    case AnswerClass::affirmative: return "affirmative";
    case AnswerClass::negative: return "negative";
    case AnswerClass::other: return "other";
    }
    return "?";
}

std::string to_string(PendingKind k) {
    switch (k) {
    case PendingKind::belief: return "belief";
    case PendingKind::verification: return "verification";
    case PendingKind::alias: return "alias";
    }
    return "?";
}

std::string to_string(Stage s) {
    return s == Stage::awaiting_confirmation ? "awaiting-confirmation" : "awaiting-verification";
}

// ---- answers --------------------------------------------------------------------

namespace {

std::vector<std::string> words_of(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{text::lower(s)};
    for (std::string w; in >> w;) {
        auto stripped = text::strip_punct(w);
        if (!stripped.empty()) out.push_back(stripped);
    }
    return out;
}

std::vector<std::string> parse_list(const std::string &value) {
    std::vector<std::string> out;
    for (const auto &item : text::split(value, ',')) {
        auto words = words_of(item);
        if (!words.empty()) out.push_back(text::join(words, " "));
    }
    return out;
}

// Number of leading words of `words` that spell `phrase`, or 0.
std::size_t prefix_len(const std::vector<std::string> &words, std::size_t from, const std::string &phrase) {
    auto p = words_of(phrase);
    if (p.empty() || from + p.size() > words.size()) return 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (words[from + i] != p[i]) return 0;
    return p.size();
}

const std::vector<std::string> &fillers() {
    static const std::vector<std::string> f{"well", "oh", "uh", "um", "hmm", "so"};
    return f;
}

} // namespace

AnswerLexicon AnswerLexicon::defaults() {
    AnswerLexicon lex;
    lex.affirmative_ = {"yes", "yeah", "yep", "correct", "right", "sure", "true", "of course", "it is"};
    lex.negative_ = {"no", "nope", "not", "never", "wrong", "false"};
    return lex;
}

AnswerLexicon AnswerLexicon::parse(std::string_view source) {
    AnswerLexicon lex;
    bool saw_aff = false, saw_neg = false;
    std::istringstream in{std::string(source)};
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto kv = text::key_value(line);
        if (!kv) throw ParseError(line_no, "expected '<class>: <comma list>'");
        if (kv->first == "affirmative") {
            lex.affirmative_ = parse_list(kv->second);
            saw_aff = true;
        } else if (kv->first == "negative") {
            lex.negative_ = parse_list(kv->second);
            saw_neg = true;
        } else {
            throw ParseError(line_no, "unknown answer class '" + kv->first + "'");
        }
    }
    if (!saw_aff || !saw_neg) throw ParseError(line_no, "lexicon needs both affirmative: and negative: lines");
    return lex;
}

AnswerClass AnswerLexicon::classify(std::string_view answer) const {
    auto words = words_of(answer);
    std::size_t from = 0;
    while (from < words.size() &&
           std::find(fillers().begin(), fillers().end(), words[from]) != fillers().end())
        ++from;
    std::size_t best_aff = 0, best_neg = 0;
    for (const auto &p : affirmative_) best_aff = std::max(best_aff, prefix_len(words, from, p));
    for (const auto &p : negative_) best_neg = std::max(best_neg, prefix_len(words, from, p));
    if (best_aff == 0 && best_neg == 0) return AnswerClass::other;
    return best_aff > best_neg ? AnswerClass::affirmative : AnswerClass::negative;
}

AnswerClass interpret_answer(std::string_view text, const AnswerLexicon &lexicon) { return lexicon.classify(text); }

// ---- lifecycle ------------------------------------------------------------------

std::uint64_t VerificationStore::open_belief(const TripleKey &main, std::vector<TripleKey> aux,
                                             const SessionId &originator, std::string provenance,
                                             QuestionQueue &queue, const KnowledgeBase &kb, std::int64_t turn) {
    PendingItem item{next_id_++, PendingKind::belief, Stage::awaiting_confirmation, originator, main,
                     std::move(aux), {}, std::move(provenance)};
    QueueItem q;
    q.kind = QuestionKind::belief_confirm;
    q.subject = main.subject;
    q.relation = main.relation;
    q.object = main.object;
    q.target = originator;
    q.priority = priority_for(q.kind, q.relation, q.subject, kb);
    q.created_turn = turn;
    q.pending_id = item.id;
    queue.push(std::move(q));
    auto id = item.id;
    items_.emplace(id, std::move(item));
    return id;
}

std::uint64_t VerificationStore::open_verification(const TripleKey &key, const SessionId &originator,
                                                   std::string provenance, QuestionQueue &queue,
                                                   const KnowledgeBase &kb, std::int64_t turn) {
    PendingItem item{next_id_++, PendingKind::verification, Stage::awaiting_verification, originator, key, {}, {},
                     std::move(provenance)};
    std::vector<std::uint64_t> stale;
    for (const auto &q : queue.items())
        if (q.kind == QuestionKind::property_ask && q.subject == key.subject && q.relation == key.relation &&
            !q.outstanding)
            stale.push_back(q.id);
    for (auto id : stale) queue.remove(id);

    QueueItem q;
    q.kind = QuestionKind::cross_verify;
    q.subject = key.subject;
    q.relation = key.relation;
    q.object = key.object;
    q.excluded = {originator};
    q.priority = priority_for(q.kind, q.relation, q.subject, kb);
    q.created_turn = turn;
    q.pending_id = item.id;
    queue.push(std::move(q));
    // A non-identifying value waits for the identifying ones, so make sure they get asked.
    if (kb.is_property_of(key.relation, key.subject) && !kb.is_identifying(key.relation, key.subject))
        queue.enqueue_property_questions(key.subject, kb, turn);
    auto id = item.id;
    items_.emplace(id, std::move(item));
    return id;
}

std::uint64_t VerificationStore::open_alias(const AliasProposal &alias, const SessionId &originator,
                                            QuestionQueue &queue, std::int64_t turn) {
    TripleKey target{alias.provisional, "same-as", alias.existing};
    PendingItem item{next_id_++, PendingKind::alias, Stage::awaiting_confirmation, originator, target, {}, {}, {}};
    QueueItem q;
    q.kind = QuestionKind::alias_confirm;
    q.subject = alias.provisional;
    q.relation = "same-as";
    q.object = Node{alias.existing};
    q.priority = 0;
    q.created_turn = turn;
    q.pending_id = item.id;
    queue.push(std::move(q));
    auto id = item.id;
    items_.emplace(id, std::move(item));
    return id;
}

Transition VerificationStore::advance(std::uint64_t id, const AnswerEvent &event, KnowledgeBase &kb,
                                      QuestionQueue &queue, const LifecycleOptions &options, std::int64_t turn) {
    auto it = items_.find(id);
    if (it == items_.end()) throw StateError("no pending item " + std::to_string(id));
    auto &item = it->second;
    if (item.stage != event.stage)
        throw StateError("item " + std::to_string(id) + " is " + to_string(item.stage) + ", answer is for " +
                         to_string(event.stage));

    Transition tr;
    auto finish = [&] {
        queue.remove_for_pending(id);
        items_.erase(it);
        tr.terminal = true;
    };

    if (item.stage == Stage::awaiting_confirmation) {
        if (item.kind == PendingKind::alias) {
            if (event.answer == AnswerClass::affirmative) {
                AliasProposal merged{item.target.subject, std::get<EntityId>(item.target.object)};
                finish();
                kb.merge_entities(merged.provisional, merged.existing);
                queue.replace_entity(merged.provisional, merged.existing);
                replace_entity(merged.provisional, merged.existing);
                tr.merged = merged;
            } else {
                finish();
            }
            return tr;
        }
        if (event.answer != AnswerClass::affirmative) {
            finish();
            return tr;
        }
        auto originator = item.originator;
        auto provenance = item.provenance;
        std::vector<TripleKey> keys{item.target};
        keys.insert(keys.end(), item.aux.begin(), item.aux.end());
        finish();
        tr.terminal = false;
        tr.stage = Stage::awaiting_verification;
        for (const auto &k : keys) {
            if (kb.known(k) || kb.stored_status(k)) continue;
            kb.incorporate(k, Status::pending_verification, provenance);
            open_verification(k, originator, provenance, queue, kb, turn);
        }
        return tr;
    }

    if (event.session == item.originator) throw StateError("the originator cannot verify its own knowledge");
    if (item.affirmed.count(event.session)) throw StateError("session " + event.session + " already affirmed");

    auto answer = event.answer;
    const auto *rel = kb.relations().find(item.target.relation);
    if (rel && rel->range.kind == RangeKind::yesno) {
        const auto *value = std::get_if<Literal>(&item.target.object);
        bool agrees = value && ((value->text == "yes" && answer == AnswerClass::affirmative) ||
                                (value->text == "no" && answer == AnswerClass::negative));
        answer = agrees ? AnswerClass::affirmative : AnswerClass::negative;
    }

    auto key = item.target;
    if (answer == AnswerClass::affirmative) {
        item.affirmed.insert(event.session);
        if (static_cast<int>(item.affirmed.size()) >= options.affirmations_required) {
            auto provenance = item.provenance;
            finish();
            kb.incorporate(key, Status::verified, provenance);
            tr.verified = true;
            after_verified(key, kb, queue, turn);
        } else {
            for (const auto &q : queue.items()) {
                if (q.pending_id != id) continue;
                auto *mq = queue.find(q.id);
                mq->excluded.insert(event.session);
                queue.requeue(q.id, turn);
                break;
            }
        }
        return tr;
    }

    finish();
    auto status = kb.stored_status(key);
    if (status && *status < Status::verified) {
        kb.remove(key);
        tr.deleted = true;
        after_deleted(key, kb, queue, turn);
    }
    return tr;
}

void VerificationStore::after_verified(const TripleKey &key, KnowledgeBase &kb, QuestionQueue &queue,
                                       std::int64_t turn) {
    const auto *rel = kb.relations().find(key.relation);
    if (rel && rel->kind == RelationKind::type) queue.enqueue_property_questions(key.subject, kb, turn);
}

void VerificationStore::after_deleted(const TripleKey &key, KnowledgeBase &kb, QuestionQueue &queue,
                                      std::int64_t turn) {
    if (kb.entity(key.subject) && kb.is_property_of(key.relation, key.subject))
        queue.enqueue_property_questions(key.subject, kb, turn);
}

const PendingItem *VerificationStore::find(std::uint64_t id) const {
    auto it = items_.find(id);
    return it == items_.end() ? nullptr : &it->second;
}

void VerificationStore::restore(std::vector<PendingItem> items, std::uint64_t next_id) {
    items_.clear();
    for (auto &i : items) items_.emplace(i.id, std::move(i));
    next_id_ = next_id;
}

void VerificationStore::replace_entity(EntityId from, EntityId to) {
    auto fix = [&](TripleKey &k) {
        if (k.subject == from) k.subject = to;
        if (auto *e = std::get_if<EntityId>(&k.object); e && *e == from) *e = to;
    };
    for (auto &[id, item] : items_) {
        fix(item.target);
        for (auto &a : item.aux) fix(a);
    }
    std::erase_if(items_, [](const auto &kv) {
        const auto &i = kv.second;
        return i.kind == PendingKind::alias && i.target.object == Node{i.target.subject};
    });
}

} // namespace kad

#include "kad/question_queue.hpp"

#include "kad/error.hpp"
#include "kad/text.hpp"

#include <algorithm>

namespace kad {

std::string to_string(QuestionKind k) {
    switch (k) {
    case QuestionKind::property_ask: return "property-ask";
    case QuestionKind::cross_verify: return "cross-verify";
    case QuestionKind::alias_confirm: return "alias-confirm";
    case QuestionKind::belief_confirm: return "belief-confirm";
    }
    return "?";
}

QuestionKind question_kind_from_string(const std::string &s) {
    for (auto k : {QuestionKind::property_ask, QuestionKind::cross_verify, QuestionKind::alias_confirm,
                   QuestionKind::belief_confirm})
        if (to_string(k) == s) return k;
    throw Error("unknown question kind '" + s + "'");
}

int priority_for(QuestionKind kind, std::string_view relation, EntityId subject, const KnowledgeBase &kb) {
    if (kind == QuestionKind::alias_confirm || kind == QuestionKind::belief_confirm) return 0;
    if (kb.is_identifying(relation, subject)) return 1;
    if (kb.is_property_of(relation, subject)) return 3;
    return 2;
}

std::size_t FocusTypePolicy::choose(std::span<const QueueItem *const> eligible, const AskContext &ctx,
                                    const KnowledgeBase &kb) const {
    if (!ctx.focus) return 0;
    int best = eligible.front()->priority;
    for (std::size_t i = 0; i < eligible.size() && eligible[i]->priority == best; ++i)
        for (const auto &type : kb.instance_types(eligible[i]->subject))
            if (ctx.focus->get(type)) return i;
    return 0;
}

const QueueItem &QuestionQueue::push(QueueItem item) {
    if (item.id == 0) item.id = next_id_++;
    else next_id_ = std::max(next_id_, item.id + 1);
    items_.push_back(std::move(item));
    return items_.back();
}

std::vector<QueueItem> QuestionQueue::enqueue_property_questions(EntityId entity, const KnowledgeBase &kb,
                                                                 std::int64_t turn) {
    std::vector<QueueItem> added;
    for (const auto &rel : kb.missing_properties(entity)) {
        bool queued = std::any_of(items_.begin(), items_.end(), [&](const QueueItem &q) {
            return q.subject == entity && q.relation == rel &&
                   (q.kind == QuestionKind::property_ask || q.kind == QuestionKind::cross_verify);
        });
        if (queued || kb.has_value(entity, rel, Status::pending_confirmation)) continue;
        QueueItem item;
        item.kind = QuestionKind::property_ask;
        item.subject = entity;
        item.relation = rel;
        item.priority = priority_for(item.kind, rel, entity, kb);
        item.created_turn = turn;
        added.push_back(push(std::move(item)));
    }
    return added;
}

bool QuestionQueue::blocked(const QueueItem &item, const KnowledgeBase &kb) const {
    if (item.kind == QuestionKind::alias_confirm || item.kind == QuestionKind::belief_confirm) return false;
    if (!kb.is_property_of(item.relation, item.subject) || kb.is_identifying(item.relation, item.subject))
        return false;
    auto missing = kb.missing_properties(item.subject);
    return std::any_of(missing.begin(), missing.end(),
                       [&](const std::string &r) { return kb.is_identifying(r, item.subject); });
}

std::optional<QueueItem> QuestionQueue::next_for(const AskContext &ctx, const KnowledgeBase &kb,
                                                 const AskPolicy &policy) {
    std::erase_if(items_, [&](const QueueItem &q) {
        return q.kind == QuestionKind::property_ask && !q.outstanding &&
               kb.has_value(q.subject, q.relation, Status::verified);
    });
    if (ctx.has_outstanding || !ctx.rate.allows(ctx.rate_limit)) return std::nullopt;

    std::vector<const QueueItem *> eligible;
    for (const auto &q : items_) {
        if (q.outstanding || q.excluded.count(ctx.session)) continue;
        if (q.target && *q.target != ctx.session) continue;
        if (blocked(q, kb)) continue;
        eligible.push_back(&q);
    }
    if (eligible.empty()) return std::nullopt;
    std::stable_sort(eligible.begin(), eligible.end(), [](const QueueItem *a, const QueueItem *b) {
        return std::tie(a->priority, a->created_turn, a->id) < std::tie(b->priority, b->created_turn, b->id);
    });
    auto idx = policy.choose(eligible, ctx, kb);
    if (idx >= eligible.size()) idx = 0;
    auto *chosen = find(eligible[idx]->id);
    chosen->outstanding = ctx.session;
    return *chosen;
}

const QueueItem *QuestionQueue::find(std::uint64_t id) const {
    for (const auto &q : items_)
        if (q.id == id) return &q;
    return nullptr;
}

QueueItem *QuestionQueue::find(std::uint64_t id) {
    for (auto &q : items_)
        if (q.id == id) return &q;
    return nullptr;
}

void QuestionQueue::remove(std::uint64_t id) {
    std::erase_if(items_, [&](const QueueItem &q) { return q.id == id; });
}

void QuestionQueue::remove_for_pending(std::uint64_t pending_id) {
    if (pending_id == 0) return;
    std::erase_if(items_, [&](const QueueItem &q) { return q.pending_id == pending_id; });
}

void QuestionQueue::requeue(std::uint64_t id, std::int64_t turn) {
    auto it = std::find_if(items_.begin(), items_.end(), [&](const QueueItem &q) { return q.id == id; });
    if (it == items_.end()) return;
    auto item = std::move(*it);
    items_.erase(it);
    item.outstanding.reset();
    item.created_turn = turn;
    items_.push_back(std::move(item));
}

void QuestionQueue::clear_outstanding() {
    for (auto &q : items_) q.outstanding.reset();
}

void QuestionQueue::replace_entity(EntityId from, EntityId to) {
    for (auto &q : items_) {
        if (q.subject == from) q.subject = to;
        if (q.object)
            if (auto *e = std::get_if<EntityId>(&*q.object); e && *e == from) *e = to;
    }
    // An alias question about two names that are now the same node is moot.
    std::erase_if(items_, [](const QueueItem &q) {
        return q.kind == QuestionKind::alias_confirm && q.object && *q.object == Node{q.subject};
    });
}

void QuestionQueue::restore(std::vector<QueueItem> items, std::uint64_t next_id) {
    items_ = std::move(items);
    next_id_ = next_id;
}

std::string render(const QueueItem &item, const KnowledgeBase &kb, const FocusMap &focus) {
    auto subject = kb.display(Node{item.subject});
    auto object = item.object ? kb.display(*item.object) : std::string{};
    if (item.kind == QuestionKind::alias_confirm) return "Is " + subject + " the same as " + object + "?";

    const auto *rel = kb.relations().find(item.relation);
    if (!rel) throw ConfigError("unregistered relation '" + item.relation + "'");
    bool verify = item.kind == QuestionKind::cross_verify;
    const auto &now = verify ? rel->qv : rel->qf;
    const auto &later = verify ? rel->qv_later : rel->qf_later;
    if (later && !focus.contains_entity(item.subject)) {
        auto ids = kb.identifying_values(item.subject);
        if (!ids.empty()) return render_template(*later, subject, object, text::join(ids, ", "));
    }
    return render_template(now, subject, object, {});
}

} // namespace kad

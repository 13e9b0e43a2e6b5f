#pragma once

#include "kad/entity.hpp"
#include "kad/kb.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace kad {

enum class QuestionKind { property_ask, cross_verify, alias_confirm, belief_confirm };

std::string to_string(QuestionKind k);
QuestionKind question_kind_from_string(const std::string &s);

struct QueueItem {
    std::uint64_t id = 0;
    QuestionKind kind = QuestionKind::property_ask;
    EntityId subject;
    std::string relation;       // "same-as" for alias confirmations
    std::optional<Node> object; // absent for property asks
    std::set<SessionId> excluded;
    std::optional<SessionId> target; // only this session may be asked
    int priority = 0;                // lower is sooner
    std::int64_t created_turn = 0;
    std::uint64_t pending_id = 0; // lifecycle item this question belongs to (0: none)
    std::optional<SessionId> outstanding;

    bool operator==(const QueueItem &) const = default;
};

/// Turns since the session was last asked anything; empty when never asked.
struct RateState {
    std::optional<int> turns_since_ask;

    void tick() {
        if (turns_since_ask) ++*turns_since_ask;
    }
    void reset() { turns_since_ask = 0; }
    /// True once at least `limit` other turns separate this one from the last ask.
    bool allows(int limit) const { return !turns_since_ask || *turns_since_ask > limit; }
};

struct AskContext {
    SessionId session;
    bool has_outstanding = false;
    RateState rate;
    int rate_limit = 3;
    const FocusMap *focus = nullptr;
};

/// Chooses which eligible question to ask. `eligible` is ordered by
/// (priority, created turn, id) and never empty.
class AskPolicy {
public:
    virtual ~AskPolicy() = default;
    virtual std::size_t choose(std::span<const QueueItem *const> eligible, const AskContext &ctx,
                               const KnowledgeBase &kb) const = 0;
};

/// Among the lowest-priority items, prefers one whose subject has a type the
/// session currently focuses on; otherwise the oldest.
class FocusTypePolicy : public AskPolicy {
public:
    std::size_t choose(std::span<const QueueItem *const> eligible, const AskContext &ctx,
                       const KnowledgeBase &kb) const override;
};

int priority_for(QuestionKind kind, std::string_view relation, EntityId subject, const KnowledgeBase &kb);

class QuestionQueue {
public:
    /// Assigns id when zero, and priority/created turn as given.
    const QueueItem &push(QueueItem item);

    /// One property-ask per missing property (identifying first), skipping
    /// relations already queued or holding a pending value.
    std::vector<QueueItem> enqueue_property_questions(EntityId entity, const KnowledgeBase &kb, std::int64_t turn);

    /// Picks and marks outstanding the next question for a session, or nothing
    /// when the session is rate-limited, already has a question, or nothing is
    /// eligible. Drops property asks that became answered.
    std::optional<QueueItem> next_for(const AskContext &ctx, const KnowledgeBase &kb,
                                      const AskPolicy &policy = FocusTypePolicy{});

    const QueueItem *find(std::uint64_t id) const;
    QueueItem *find(std::uint64_t id);
    void remove(std::uint64_t id);
    void remove_for_pending(std::uint64_t pending_id);
    /// Clears the outstanding mark and moves the item behind its peers.
    void requeue(std::uint64_t id, std::int64_t turn);
    void clear_outstanding();
    void replace_entity(EntityId from, EntityId to);

    const std::vector<QueueItem> &items() const { return items_; }
    std::uint64_t next_id() const { return next_id_; }
    void restore(std::vector<QueueItem> items, std::uint64_t next_id);

private:
    bool blocked(const QueueItem &item, const KnowledgeBase &kb) const;

    std::vector<QueueItem> items_;
    std::uint64_t next_id_ = 1;
};

/// Question text for an item. Uses the immediate template when the session's
/// focus already holds the subject, the `-later` variant otherwise (if any).
std::string render(const QueueItem &item, const KnowledgeBase &kb, const FocusMap &focus);

} // namespace kad

#pragma once

#include "kad/kb.hpp"
#include "kad/question_queue.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kad {

enum class AnswerClass { affirmative, negative, other };

std::string to_string(AnswerClass c);

class AnswerLexicon {
public:
    /// Two lines: `affirmative: <comma list>` and `negative: <comma list>`.
    static AnswerLexicon parse(std::string_view source);
    static AnswerLexicon defaults();

    AnswerClass classify(std::string_view text) const;

    const std::vector<std::string> &affirmative() const { return affirmative_; }
    const std::vector<std::string> &negative() const { return negative_; }

private:
    std::vector<std::string> affirmative_;
    std::vector<std::string> negative_;
};

AnswerClass interpret_answer(std::string_view text, const AnswerLexicon &lexicon = AnswerLexicon::defaults());

enum class PendingKind { belief, verification, alias };
enum class Stage { awaiting_confirmation, awaiting_verification };

std::string to_string(PendingKind k);
std::string to_string(Stage s);

struct PendingItem {
    std::uint64_t id = 0;
    PendingKind kind = PendingKind::verification;
    Stage stage = Stage::awaiting_verification;
    SessionId originator;
    TripleKey target; // alias: (provisional, "same-as", existing)
    std::vector<TripleKey> aux;
    std::set<SessionId> affirmed;
    std::string provenance;

    bool operator==(const PendingItem &) const = default;
};

struct AnswerEvent {
    Stage stage;
    AnswerClass answer;
    SessionId session;
};

struct Transition {
    bool terminal = false;
    Stage stage = Stage::awaiting_verification;
    bool verified = false;
    bool deleted = false;
    std::optional<AliasProposal> merged;
};

struct LifecycleOptions {
    int affirmations_required = 1;
};

/// Owns pending knowledge and moves it through confirmation and
/// cross-verification, writing the outcome into the KB and the queue.
class VerificationStore {
public:
    std::uint64_t open_belief(const TripleKey &main, std::vector<TripleKey> aux, const SessionId &originator,
                              std::string provenance, QuestionQueue &queue, const KnowledgeBase &kb,
                              std::int64_t turn);
    std::uint64_t open_verification(const TripleKey &key, const SessionId &originator, std::string provenance,
                                    QuestionQueue &queue, const KnowledgeBase &kb, std::int64_t turn);
    std::uint64_t open_alias(const AliasProposal &alias, const SessionId &originator, QuestionQueue &queue,
                             std::int64_t turn);

    /// Throws StateError when the event's stage differs from the item's, or
    /// when a verifier is the originator or has already affirmed.
    Transition advance(std::uint64_t id, const AnswerEvent &event, KnowledgeBase &kb, QuestionQueue &queue,
                       const LifecycleOptions &options, std::int64_t turn);

    const PendingItem *find(std::uint64_t id) const;
    const std::map<std::uint64_t, PendingItem> &items() const { return items_; }
    std::uint64_t next_id() const { return next_id_; }
    void restore(std::vector<PendingItem> items, std::uint64_t next_id);
    void replace_entity(EntityId from, EntityId to);

private:
    void after_verified(const TripleKey &key, KnowledgeBase &kb, QuestionQueue &queue, std::int64_t turn);
    void after_deleted(const TripleKey &key, KnowledgeBase &kb, QuestionQueue &queue, std::int64_t turn);

    std::map<std::uint64_t, PendingItem> items_;
    std::uint64_t next_id_ = 1;
};

} // namespace kad

#pragma once

#include "kad/entity.hpp"
#include "kad/kb.hpp"
#include "kad/kdp.hpp"
#include "kad/pattern.hpp"
#include "kad/question_queue.hpp"
#include "kad/verification.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kad {

struct EngineConfig {
    std::vector<RuleDef> rules;
    RelationRegistry relations;
    TypeSchemas schemas;
    Gazetteer gazetteer;
    std::vector<HornRule> inference;
    AnswerLexicon lexicon = AnswerLexicon::defaults();
};

struct EngineOptions {
    int affirmations_required = 1; // k
    int rate_limit = 3;            // M
    std::string fallback_reply = "I see.";
    std::string acknowledgement = "Thanks, noted.";
};

struct SessionState {
    SessionId id;
    FocusMap focus;
    std::optional<std::uint64_t> outstanding; // queue item id
    RateState rate;
    std::int64_t turn_index = 0;
};

/// One KB change made during a turn, rendered for display. `status` is empty
/// for removals.
struct LearnedEffect {
    TripleKey key;
    std::optional<Status> status;
    std::string subject;
    std::string relation;
    std::string object;
};

struct AskedQuestion {
    std::string text;
    QueueItem item;
};

struct TurnOutcome {
    std::string reply;
    std::optional<AskedQuestion> asked;
    std::vector<LearnedEffect> learned;
    bool answer_consumed = false;
    std::optional<std::string> rule_id;
};

struct Counters {
    std::uint64_t next_entity = 1;
    std::uint64_t next_queue_item = 1;
    std::uint64_t next_pending = 1;
    std::int64_t turn = 0;
    bool operator==(const Counters &) const = default;
};

struct KbSnapshot {
    std::vector<EntityNode> entities;
    std::vector<Triple> triples; // all statuses except inferred
    std::vector<QueueItem> queue; // outstanding marks are session state and left empty
    std::vector<PendingItem> pending;
    Counters counters;
    bool operator==(const KbSnapshot &) const = default;
};

/// Dialogue controller over one shared KB. Every public call takes the engine
/// lock, so sessions may be driven from different threads.
class Engine {
public:
    explicit Engine(EngineConfig config, EngineOptions options = {});

    /// Opens a session with a generated id ("s1", "s2", ...).
    SessionId open_session();
    /// Opens (or keeps) a session with a caller-chosen id.
    void open_session(const SessionId &id);
    bool has_session(const SessionId &id) const;

    /// Full turn: answer handling, rule response, background learning, ask.
    TurnOutcome handle_turn(const SessionId &session, std::string_view text);

    /// Adds a verified triple directly (seeding), running the same hooks as a
    /// verification would. Returns the grounded key.
    TripleKey seed_verified(const CandidateTriple &candidate);

    KbSnapshot snapshot() const;
    void restore(const KbSnapshot &snapshot);
    std::string save() const;
    void load(std::string_view text);

    // read-side helpers
    std::vector<Triple> triples(std::optional<Status> status = std::nullopt) const;
    std::vector<QueueItem> queue() const;
    std::vector<PendingItem> pending() const;
    std::optional<SessionState> session(const SessionId &id) const;
    std::string display(const Node &n) const;
    std::string display(EntityId id) const;
    std::string describe(const QueueItem &item) const;
    std::size_t entity_count() const;

    /// Runs `f` with the KB under the engine lock.
    template <typename F> auto with_kb(F &&f) const {
        std::lock_guard lock(mutex_);
        return f(kb_);
    }

    const EngineConfig &config() const { return config_; }
    const EngineOptions &options() const { return options_; }

private:
    struct TurnScratch;

    SessionState &session_locked(const SessionId &id);
    bool apply_answer(SessionState &s, std::string_view text, TurnScratch &scratch);
    void learn(SessionState &s, const RuleDef &rule, const Bindings &bindings, TurnScratch &scratch);
    void focus_on_bindings(SessionState &s, const RuleDef &rule, const Bindings &bindings);
    void focus_on_entity(SessionState &s, EntityId id);
    void handle_alias_merge(const AliasProposal &merged);
    void open_aliases(const std::vector<AliasProposal> &aliases, const SessionId &originator);
    void ask_next(SessionState &s, TurnOutcome &outcome);
    std::string render_response(const RuleDef &rule, const Bindings &bindings, const SessionState &s) const;
    std::vector<LearnedEffect> drain_journal();
    KbSnapshot snapshot_locked() const;

    EngineConfig config_;
    EngineOptions options_;
    LifecycleOptions lifecycle_;
    std::unique_ptr<AskPolicy> policy_;

    mutable std::mutex mutex_;
    KnowledgeBase kb_;
    QuestionQueue queue_;
    VerificationStore store_;
    std::map<SessionId, SessionState> sessions_;
    std::uint64_t next_session_ = 1;
    std::int64_t turn_ = 0;
};

} // namespace kad

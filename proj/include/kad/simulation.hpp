#pragma once

#include "kad/controller.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kad {

struct SimEvent {
    SessionId user;
    std::string text;
    bool is_answer = false;
};

struct SimScript {
    std::vector<SessionId> users;
    std::vector<SimEvent> events;
    /// Per user, (question substring, answer) pairs; the longest matching key wins.
    std::map<SessionId, std::vector<std::pair<std::string, std::string>>> policies;
    std::vector<std::array<std::string, 3>> gold;
};

/// JSON with keys `users`, `events`, `policies`, `gold`. Throws ParseError.
SimScript parse_script(std::string_view json);

struct SimMetrics {
    double precision = 1.0;
    double recall = 0.0;
    std::size_t verified = 0;
    std::size_t gold = 0;
    std::size_t correct = 0;
    std::size_t questions_asked = 0;
    std::size_t questions_answered = 0;
    std::size_t unanswered = 0;
    std::size_t deleted = 0;
};

struct TranscriptLine {
    SessionId user;
    std::string said;
    TurnOutcome outcome;
};

struct SimResult {
    SimMetrics metrics;
    KbSnapshot snapshot;
    std::string kb_text;
    std::vector<TranscriptLine> transcript;
};

/// Replays a script in order; questions are answered from the asked user's
/// policy right away. Throws Error for events of undeclared users.
SimResult run_simulation(const EngineConfig &config, const SimScript &script, const EngineOptions &options = {});

/// Precision and recall of the engine's verified triples against `gold`.
SimMetrics score(const Engine &engine, const std::vector<std::array<std::string, 3>> &gold);

} // namespace kad

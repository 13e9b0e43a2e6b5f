#include "kad/simulation.hpp"

#include "kad/error.hpp"
#include "kad/text.hpp"

#include <json.hpp>

#include <set>

namespace kad {

namespace {

constexpr int kMaxAutoAnswers = 16;

std::string require_string(const nlohmann::json &j, const std::string &what) {
    if (!j.is_string()) throw ParseError(0, what + " must be a string");
    return j.get<std::string>();
}

} // namespace

SimScript parse_script(std::string_view source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(source);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(0, std::string("script is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(0, "script must be a JSON object");
    SimScript s;
    if (!j.contains("users") || !j["users"].is_array()) throw ParseError(0, "script needs a 'users' array");
    for (const auto &u : j["users"]) s.users.push_back(require_string(u, "user id"));
    if (j.contains("events")) {
        if (!j["events"].is_array()) throw ParseError(0, "'events' must be an array");
        for (const auto &e : j["events"]) {
            if (!e.is_object() || !e.contains("user")) throw ParseError(0, "each event needs a 'user'");
            SimEvent ev;
            ev.user = require_string(e["user"], "event user");
            if (e.contains("utterance")) {
                ev.text = require_string(e["utterance"], "utterance");
            } else if (e.contains("answer")) {
                ev.text = require_string(e["answer"], "answer");
                ev.is_answer = true;
            } else {
                throw ParseError(0, "event needs 'utterance' or 'answer'");
            }
            s.events.push_back(std::move(ev));
        }
    }
    if (j.contains("policies")) {
        if (!j["policies"].is_object()) throw ParseError(0, "'policies' must be an object");
        for (const auto &[user, table] : j["policies"].items()) {
            if (!table.is_object()) throw ParseError(0, "policy of " + user + " must be an object");
            auto &rows = s.policies[user];
            for (const auto &[key, answer] : table.items()) rows.emplace_back(key, require_string(answer, "policy answer"));
        }
    }
    if (j.contains("gold")) {
        if (!j["gold"].is_array()) throw ParseError(0, "'gold' must be an array");
        for (const auto &g : j["gold"]) {
            if (!g.is_array() || g.size() != 3) throw ParseError(0, "gold triples are 3-element arrays");
            s.gold.push_back({require_string(g[0], "gold"), require_string(g[1], "gold"), require_string(g[2], "gold")});
        }
    }
    return s;
}

namespace {

std::optional<std::string> policy_answer(const SimScript &script, const SessionId &user, const std::string &question) {
    auto it = script.policies.find(user);
    if (it == script.policies.end()) return std::nullopt;
    auto q = text::lower(question);
    const std::pair<std::string, std::string> *best = nullptr;
    for (const auto &row : it->second)
        if (q.find(text::lower(row.first)) != std::string::npos && (!best || row.first.size() > best->first.size()))
            best = &row;
    if (!best) return std::nullopt;
    return best->second;
}

// Removals of triples that still have a live subject; merges re-key triples
// of the folded node and are not deletions.
std::size_t count_deleted(const Engine &engine, const TurnOutcome &o) {
    std::size_t n = 0;
    for (const auto &e : o.learned)
        if (!e.status && e.key.relation != "same-as" &&
            engine.with_kb([&](const KnowledgeBase &kb) { return kb.entity(e.key.subject) != nullptr; }))
            ++n;
    return n;
}

} // namespace

SimResult run_simulation(const EngineConfig &config, const SimScript &script, const EngineOptions &options) {
    std::set<SessionId> declared(script.users.begin(), script.users.end());
    for (const auto &e : script.events)
        if (!declared.count(e.user)) throw Error("event for undeclared user '" + e.user + "'");

    Engine engine(config, options);
    for (const auto &u : script.users) engine.open_session(u);

    SimResult result;
    auto &m = result.metrics;
    auto turn = [&](const SessionId &user, const std::string &text) {
        auto outcome = engine.handle_turn(user, text);
        if (outcome.asked) ++m.questions_asked;
        m.deleted += count_deleted(engine, outcome);
        result.transcript.push_back({user, text, outcome});
        return outcome;
    };

    for (const auto &e : script.events) {
        auto outcome = turn(e.user, e.text);
        for (int guard = 0; outcome.asked && guard < kMaxAutoAnswers; ++guard) {
            auto answer = policy_answer(script, e.user, outcome.asked->text);
            if (!answer) {
                ++m.unanswered;
                break;
            }
            ++m.questions_answered;
            outcome = turn(e.user, *answer);
        }
    }

    auto scored = score(engine, script.gold);
    m.precision = scored.precision;
    m.recall = scored.recall;
    m.verified = scored.verified;
    m.gold = scored.gold;
    m.correct = scored.correct;
    result.snapshot = engine.snapshot();
    result.kb_text = engine.save();
    return result;
}

SimMetrics score(const Engine &engine, const std::vector<std::array<std::string, 3>> &gold) {
    struct Names {
        std::vector<std::string> subject, object;
        std::string relation;
    };
    auto verified = engine.triples(Status::verified);
    auto names = engine.with_kb([&](const KnowledgeBase &kb) {
        auto all_names = [&](const Node &n) {
            std::vector<std::string> out{kb.display(n)};
            if (const auto *e = std::get_if<EntityId>(&n))
                if (const auto *node = kb.entity(*e)) out.insert(out.end(), node->aliases.begin(), node->aliases.end());
            return out;
        };
        std::vector<Names> out;
        for (const auto &t : verified) out.push_back({all_names(Node{t.subject}), all_names(t.object), t.relation});
        return out;
    });
    auto any_iequal = [](const std::vector<std::string> &xs, const std::string &y) {
        return std::any_of(xs.begin(), xs.end(), [&](const std::string &x) { return text::iequals(x, y); });
    };
    auto matches = [&](const Names &n, const std::array<std::string, 3> &g) {
        return n.relation == g[1] && any_iequal(n.subject, g[0]) && any_iequal(n.object, g[2]);
    };

    SimMetrics m;
    m.verified = verified.size();
    m.gold = gold.size();
    for (const auto &n : names)
        if (std::any_of(gold.begin(), gold.end(), [&](const auto &g) { return matches(n, g); })) ++m.correct;
    std::size_t recalled = 0;
    for (const auto &g : gold)
        if (std::any_of(names.begin(), names.end(), [&](const Names &n) { return matches(n, g); })) ++recalled;
    m.precision = m.verified == 0 ? 1.0 : static_cast<double>(m.correct) / static_cast<double>(m.verified);
    m.recall = m.gold == 0 ? 1.0 : static_cast<double>(recalled) / static_cast<double>(m.gold);
    return m;
}

} // namespace kad

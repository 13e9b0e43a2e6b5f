#include "fixtures.hpp"
#include "kad/error.hpp"
#include "kad/simulation.hpp"

#include <doctest.h>

using namespace kad;

namespace {

SimScript demo() { return parse_script(read_file(fixtures::data_dir() + "/hotel/demo.json")); }

std::string parse_error(const std::string &json) {
    try {
        parse_script(json);
    } catch (const ParseError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("scripts parse users, events, policies and gold") {
    auto s = demo();
    CHECK(s.users == std::vector<SessionId>{"alice", "bob"});
    CHECK(s.events.size() == 6);
    CHECK(s.events[0].user == "alice");
    CHECK_FALSE(s.events[0].is_answer);
    CHECK(s.policies.at("bob").size() == 2);
    CHECK(s.gold.size() == 2);
    CHECK(s.gold[1][2] == "150 Pine Street");

    auto answers = parse_script(R"({"users":["a"],"events":[{"user":"a","answer":"yes"}]})");
    CHECK(answers.events[0].is_answer);
    CHECK(answers.gold.empty());

    CHECK_FALSE(parse_error("{").empty());
    CHECK_FALSE(parse_error(R"({"users":"a"})").empty());
    CHECK_FALSE(parse_error(R"({"users":["a"],"events":[{"user":"a"}]})").empty());
    CHECK_FALSE(parse_error(R"({"users":["a"],"events":[],"gold":[["a","b"]]})").empty());
}

TEST_CASE("the demo script learns both gold triples") {
    auto r = run_simulation(fixtures::hotel(), demo());
    CHECK(r.metrics.precision == 1.0);
    CHECK(r.metrics.recall == 1.0);
    CHECK(r.metrics.verified == 2);
    CHECK(r.metrics.correct == 2);
    CHECK(r.metrics.questions_asked == r.metrics.questions_answered);
    CHECK(r.metrics.unanswered == 0);
    CHECK(r.metrics.deleted == 0);
    CHECK(r.kb_text == save_kb(r.snapshot));
    CHECK(r.transcript.size() == 6 + r.metrics.questions_answered); // answers are transcribed too
    CHECK(run_simulation(fixtures::hotel(), demo()).kb_text == r.kb_text);
}

TEST_CASE("false claims are deleted by a truthful verifier") {
    auto s = demo();
    s.policies["bob"] = {{"at this address", "no"}, {"a hotel", "yes"}};
    auto r = run_simulation(fixtures::hotel(), s);
    CHECK(r.metrics.deleted == 1);
    CHECK(r.metrics.precision == 1.0);
    for (const auto &t : r.snapshot.triples) CHECK(t.relation != "has-address");
    // the deleted value is asked for again, ahead of the type verification
    bool reasked = false;
    for (const auto &line : r.transcript)
        reasked |= line.outcome.asked && line.outcome.asked->text == "What is the address of Holiday Inn?";
    CHECK(reasked);
}

TEST_CASE("questions without a policy count as unanswered") {
    auto s = demo();
    s.policies.clear();
    auto r = run_simulation(fixtures::hotel(), s);
    CHECK(r.metrics.unanswered >= 1);
    CHECK(r.metrics.verified == 0);
    CHECK(r.metrics.recall == 0.0);
}

TEST_CASE("events by undeclared users are rejected") {
    auto s = demo();
    s.events.push_back({"mallory", "hello", false});
    CHECK_THROWS_AS(run_simulation(fixtures::hotel(), s), Error);
}

TEST_CASE("scoring matches names case-insensitively and through aliases") {
    Engine e(fixtures::hotel());
    e.seed_verified(fixtures::candidate("Panera Bread", "is-a", "hotel"));
    CHECK(score(e, {}).recall == 1.0);
    auto m = score(e, {{"panera bread", "is-a", "HOTEL"}, {"Panera Bread", "has-parking", "yes"}});
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 0.5);
    Engine empty(fixtures::hotel());
    CHECK(score(empty, {{"a", "b", "c"}}).precision == 1.0);
}

#include "fixtures.hpp"
#include "kad/error.hpp"

#include <doctest.h>

#include <thread>

using namespace kad;
using fixtures::candidate;

namespace {

Engine engine(int rate_limit = 0) { return Engine(fixtures::hotel(), EngineOptions{1, rate_limit}); }

std::optional<std::string> asked(const TurnOutcome &o) {
    if (!o.asked) return std::nullopt;
    return o.asked->text;
}

} // namespace

TEST_CASE("sessions are created and checked") {
    auto e = engine();
    CHECK(e.open_session() == "s1");
    e.open_session("alice");
    CHECK(e.has_session("alice"));
    CHECK_THROWS_AS(e.handle_turn("nobody", "hello"), UnknownSession);
}

TEST_CASE("an unmatched utterance gets the fallback reply and learns nothing") {
    auto e = engine();
    auto s = e.open_session();
    auto o = e.handle_turn(s, "the weather is fine");
    CHECK(o.reply == "I see.");
    CHECK(o.learned.empty());
    CHECK_FALSE(o.rule_id);
    CHECK(e.handle_turn(s, "hello there").rule_id == "greeting");
}

TEST_CASE("fact KDPs are stored pending and cross-verified by another session") {
    auto e = engine();
    auto a = e.open_session(), b = e.open_session();
    auto o = e.handle_turn(a, fixtures::kStayed);
    CHECK(o.reply == "How was your stay at Holiday Inn?");
    REQUIRE(o.learned.size() == 2);
    CHECK(o.learned[0].relation == "is-a");
    CHECK(o.learned[1].object == "150 Pine Street");
    for (const auto &l : o.learned) CHECK(l.status == Status::pending_verification);
    CHECK_FALSE(o.asked); // the originator is excluded from its own verifications
    CHECK(e.queue().size() == 2);

    o = e.handle_turn(b, "hello");
    CHECK(asked(o) == "Is there a Holiday Inn hotel at this address, 150 Pine Street?");
    o = e.handle_turn(b, "yes");
    CHECK(o.answer_consumed);
    CHECK(o.reply == "Thanks, noted.");
    CHECK(asked(o) == "Is Holiday Inn a hotel?");
    o = e.handle_turn(b, "yes");
    CHECK(e.triples(Status::verified).size() == 2);
    CHECK(e.triples(Status::inferred).size() == 1); // (Holiday Inn, is-a, lodging)
    // the address is known, so parking is asked next
    CHECK(asked(o) == "Does Holiday Inn have free parking?");
}

TEST_CASE("belief KDPs wait for the speaker's confirmation") {
    SUBCASE("confirmed") {
        auto e = engine();
        auto a = e.open_session();
        auto o = e.handle_turn(a, fixtures::kFriends);
        CHECK(o.learned.empty());
        CHECK(asked(o) == "Is Holiday Inn a hotel?");
        o = e.handle_turn(a, "yes");
        CHECK(o.answer_consumed);
        CHECK(o.learned.size() == 2);
        CHECK(e.triples(Status::pending_verification).size() == 2);
    }
    SUBCASE("denied") {
        auto e = engine();
        auto a = e.open_session();
        e.handle_turn(a, fixtures::kFriends);
        e.handle_turn(a, "no");
        CHECK(e.triples().empty());
    }
    SUBCASE("already known") {
        auto e = engine();
        e.seed_verified(candidate("Holiday Inn", "is-a", "hotel"));
        auto a = e.open_session();
        auto before = e.queue().size();
        auto o = e.handle_turn(a, fixtures::kFriends);
        REQUIRE(o.learned.size() == 1);
        CHECK(o.learned[0].relation == "has-address");
        for (const auto &q : e.queue()) CHECK(q.kind != QuestionKind::belief_confirm);
        CHECK(e.queue().size() == before); // address ask replaced by its verification
    }
}

TEST_CASE("a non-answer falls through to rule matching and re-queues the question") {
    auto e = engine(5);
    auto a = e.open_session();
    e.handle_turn(a, fixtures::kFriends);
    auto o = e.handle_turn(a, "I love their bed");
    CHECK_FALSE(o.answer_consumed);
    CHECK(o.rule_id == "love_aspect");
    CHECK(o.reply == "I will remember that you love the bed at Holiday Inn.");
    REQUIRE(o.learned.size() == 1);
    CHECK(o.learned[0].object == "bed");
    CHECK_FALSE(o.asked); // rate limit holds the re-queued question back
    CHECK_FALSE(e.session(a)->outstanding);
    CHECK(e.queue().size() == 2);
}

TEST_CASE("value answers fill a property and open its verification") {
    auto e = engine();
    e.seed_verified(candidate("Holiday Inn", "is-a", "hotel"));
    auto a = e.open_session();
    auto o = e.handle_turn(a, "hello");
    CHECK(asked(o) == "What is the address of Holiday Inn?");
    o = e.handle_turn(a, "It is at 150 Pine Street");
    CHECK(o.answer_consumed);
    REQUIRE(o.learned.size() == 1);
    CHECK(o.learned[0].object == "150 Pine Street");
    CHECK(o.learned[0].status == Status::pending_verification);

    o = e.handle_turn(e.open_session(), "hello");
    CHECK(asked(o) == "Is there a Holiday Inn hotel at this address, 150 Pine Street?");
}

TEST_CASE("focus follows bound entities and feeds focus terms") {
    auto e = engine();
    auto a = e.open_session();
    e.handle_turn(a, fixtures::kStayed);
    auto s = e.session(a);
    REQUIRE(s);
    auto h = s->focus.get("hotel");
    REQUIRE(h);
    CHECK(e.display(*h) == "Holiday Inn");
    CHECK(e.handle_turn(a, "The Grand Marlowe has free parking").learned.size() >= 1);
}

TEST_CASE("the query placeholder reads verified knowledge") {
    auto e = engine();
    auto a = e.open_session();
    CHECK(e.handle_turn(a, "so does Holiday Inn have parking").reply == "Free parking at Holiday Inn: unknown.");
    e.seed_verified(candidate("Holiday Inn", "is-a", "hotel"));
    e.seed_verified(candidate("Holiday Inn", "has-parking", "yes"));
    CHECK(e.handle_turn(a, "so does Holiday Inn have parking").reply == "Free parking at Holiday Inn: yes.");
}

TEST_CASE("the rate limit spaces questions per session") {
    auto e = engine(2);
    e.seed_verified(candidate("Holiday Inn", "is-a", "hotel"));
    auto a = e.open_session();
    std::vector<bool> pattern;
    for (int i = 0; i < 8; ++i) pattern.push_back(e.handle_turn(a, "the weather is fine").asked.has_value());
    // each non-answer re-queues the question; two quiet turns separate asks
    CHECK(pattern == std::vector<bool>{true, false, false, true, false, false, true, false});
}

TEST_CASE("sessions may be driven from several threads") {
    auto e = engine();
    std::vector<SessionId> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(e.open_session());
    std::vector<std::thread> threads;
    for (const auto &id : ids)
        threads.emplace_back([&e, id] {
            for (int i = 0; i < 25; ++i) {
                e.handle_turn(id, fixtures::kStayed);
                e.handle_turn(id, "yes");
            }
        });
    for (auto &t : threads) t.join();
    auto verified = e.triples(Status::verified);
    CHECK(verified.size() >= 2);
    for (const auto &t : verified) CHECK(e.display(t.subject) == "Holiday Inn");
    for (const auto &id : ids) CHECK(e.session(id)->turn_index == 50);
}

#include "fixtures.hpp"
#include "kad/error.hpp"
#include "kad/kdp.hpp"

#include <doctest.h>

using namespace kad;

namespace {

struct Setup {
    EngineConfig cfg = fixtures::hotel();
    KnowledgeBase kb{cfg.relations, cfg.schemas, cfg.inference};

    const RuleDef &rule(const std::string &id) const {
        for (const auto &r : cfg.rules)
            if (r.id == id) return r;
        FAIL("no rule " << id);
        throw 0;
    }

    std::vector<CandidateTriple> run(const std::string &id, const std::string &text, const FocusMap &focus = {}) {
        const auto &r = rule(id);
        auto b = match(r.pattern, r.vars, annotate(text, cfg.gazetteer));
        REQUIRE(b);
        return instantiate(r, *b, focus, kb, provenance_for(id, "s1", 3));
    }
};

} // namespace

TEST_CASE("provenance names the rule, session and turn") { CHECK(provenance_for("r", "s2", 7) == "r@s2#7"); }

TEST_CASE("facts instantiate with bound names and literal values") {
    Setup s;
    auto cands = s.run("stayed_at", fixtures::kStayed);
    REQUIRE(cands.size() == 2);
    CHECK(cands[0] == CandidateTriple{EntityRef{"Holiday Inn", std::nullopt}, "is-a", EntityRef{"hotel", std::nullopt},
                                      Origin::fact, 0, "stayed_at@s1#3"});
    CHECK(cands[1].object.name == "150 Pine Street");
    CHECK(cands[1].relation == "has-address");

    auto p = plan(cands, s.kb);
    CHECK(p.to_verify.size() == 2);
    CHECK(p.to_confirm.empty());

    s.kb.incorporate(cands[0], Status::pending_verification);
    p = plan(cands, s.kb);
    CHECK(p.noops.size() == 1);
    CHECK(p.to_verify.size() == 1);
}

TEST_CASE("beliefs become confirmations carrying their aux triples") {
    Setup s;
    auto cands = s.run("stayed_with_friends", fixtures::kFriends);
    REQUIRE(cands.size() == 2);
    CHECK(cands[0].origin == Origin::belief_main);
    CHECK(cands[1].origin == Origin::belief_aux);
    CHECK(cands[0].group == cands[1].group);

    auto p = plan(cands, s.kb);
    REQUIRE(p.to_confirm.size() == 1);
    CHECK(p.to_confirm[0].question == "Is Holiday Inn a hotel?");
    CHECK(p.to_confirm[0].aux.size() == 1);
    CHECK(p.to_verify.empty());

    // once the main is known the aux goes straight to cross-verification
    s.kb.incorporate(cands[0], Status::verified);
    p = plan(cands, s.kb);
    CHECK(p.to_confirm.empty());
    REQUIRE(p.to_verify.size() == 1);
    CHECK(p.to_verify[0].relation == "has-address");
    CHECK(p.noops.size() == 1);
}

TEST_CASE("focus terms resolve through the session focus or drop the KDP") {
    Setup s;
    CHECK(s.run("love_aspect", "I love their breakfast").empty());

    auto id = s.kb.register_entity("Holiday Inn", "hotel").id;
    FocusMap focus;
    focus.update("hotel", id);
    auto cands = s.run("love_aspect", "I love their breakfast", focus);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].subject.id == id);
    CHECK(cands[0].object.name == "breakfast");
}

TEST_CASE("unregistered relations are configuration errors") {
    Setup s;
    auto rules = parse_rules("rule r\n  var X: entity(name)\n  pattern: * X rocks\n  fact: (X, rocks, yes)\nend\n");
    auto b = match(rules[0].pattern, rules[0].vars, annotate("the Ritz rocks", s.cfg.gazetteer));
    REQUIRE(b);
    CHECK_THROWS_AS(instantiate(rules[0], *b, {}, s.kb, "p"), ConfigError);
}

#include "fixtures.hpp"
#include "kad/error.hpp"
#include "kad/verification.hpp"

#include <doctest.h>

using namespace kad;
using fixtures::candidate;

namespace {

struct Setup {
    EngineConfig cfg = fixtures::hotel();
    KnowledgeBase kb{cfg.relations, cfg.schemas, cfg.inference};
    QuestionQueue q;
    VerificationStore store;
    LifecycleOptions opts;

    TripleKey pending(const std::string &s, const std::string &r, const std::string &o) {
        return kb.incorporate(candidate(s, r, o), Status::pending_verification).grounded.key;
    }
    Transition answer(std::uint64_t id, Stage stage, AnswerClass a, const std::string &session) {
        return store.advance(id, AnswerEvent{stage, a, session}, kb, q, opts, 1);
    }
};

constexpr auto yes = AnswerClass::affirmative;
constexpr auto no = AnswerClass::negative;
constexpr auto verify = Stage::awaiting_verification;
constexpr auto confirm = Stage::awaiting_confirmation;

} // namespace

TEST_CASE("answers classify by the longest leading phrase") {
    auto lex = AnswerLexicon::defaults();
    CHECK(lex.classify("Yes!") == yes);
    CHECK(lex.classify("well, of course it is") == yes);
    CHECK(lex.classify("no, it is not") == no);
    CHECK(lex.classify("I love their bed") == AnswerClass::other);
    CHECK(lex.classify("") == AnswerClass::other);
    CHECK(interpret_answer("nope") == no);

    auto custom = AnswerLexicon::parse("affirmative: si, claro\nnegative: no, not really\n");
    CHECK(custom.classify("claro") == yes);
    CHECK(custom.classify("yes") == AnswerClass::other);
    CHECK(custom.classify("not really") == no);
    CHECK_THROWS_AS(AnswerLexicon::parse("maybe: x\n"), ParseError);
}

TEST_CASE("cross-verification with k affirmations verifies the triple") {
    Setup s;
    s.opts.affirmations_required = 2;
    auto key = s.pending("Holiday Inn", "is-a", "hotel");
    auto id = s.store.open_verification(key, "alice", "p", s.q, s.kb, 1);
    REQUIRE(s.q.items().size() == 1);
    CHECK(s.q.items()[0].excluded == std::set<SessionId>{"alice"});

    CHECK_THROWS_AS(s.answer(id, verify, yes, "alice"), StateError);
    CHECK_THROWS_AS(s.answer(id, confirm, yes, "bob"), StateError);

    auto t = s.answer(id, verify, yes, "bob");
    CHECK_FALSE(t.terminal);
    CHECK(s.q.items()[0].excluded == std::set<SessionId>{"alice", "bob"});
    CHECK_THROWS_AS(s.answer(id, verify, yes, "bob"), StateError);

    t = s.answer(id, verify, yes, "carol");
    CHECK(t.terminal);
    CHECK(t.verified);
    CHECK(s.kb.stored_status(key) == Status::verified);
    CHECK_FALSE(s.store.find(id));
    // verifying a type enqueues its property questions
    REQUIRE(s.q.items().size() == 2);
    CHECK(s.q.items()[0].relation == "has-address");
}

TEST_CASE("a negative answer deletes the pending triple") {
    Setup s;
    s.opts.affirmations_required = 2;
    auto key = s.pending("Holiday Inn", "is-a", "hotel");
    auto id = s.store.open_verification(key, "alice", "p", s.q, s.kb, 1);
    s.answer(id, verify, yes, "bob");
    auto t = s.answer(id, verify, no, "carol");
    CHECK(t.terminal);
    CHECK(t.deleted);
    CHECK_FALSE(s.kb.stored_status(key));
    CHECK(s.q.items().empty());
}

TEST_CASE("yes/no values verify by agreement") {
    Setup s;
    s.kb.incorporate(candidate("Holiday Inn", "is-a", "hotel"), Status::verified);
    auto key = s.pending("Holiday Inn", "has-parking", "no");
    auto id = s.store.open_verification(key, "alice", "p", s.q, s.kb, 1);
    auto t = s.answer(id, verify, no, "bob");
    CHECK(t.verified);
    CHECK(s.kb.known(key));

    auto yes_key = s.pending("Holiday Inn", "has-parking", "yes");
    id = s.store.open_verification(yes_key, "alice", "p", s.q, s.kb, 1);
    t = s.answer(id, verify, no, "bob");
    CHECK(t.deleted);
}

TEST_CASE("a pending value removes the matching property ask") {
    Setup s;
    auto h = s.kb.incorporate(candidate("Holiday Inn", "is-a", "hotel"), Status::verified).grounded.key.subject;
    s.q.enqueue_property_questions(h, s.kb, 1);
    auto key = s.pending("Holiday Inn", "has-address", "150 Pine Street");
    s.store.open_verification(key, "alice", "p", s.q, s.kb, 2);
    REQUIRE(s.q.items().size() == 2);
    CHECK(s.q.items()[0].relation == "has-parking");
    CHECK(s.q.items()[1].kind == QuestionKind::cross_verify);

    // deleting the value asks for it again
    s.answer(s.q.items()[1].pending_id, verify, no, "bob");
    bool asks_address = false;
    for (const auto &item : s.q.items()) asks_address |= item.relation == "has-address";
    CHECK(asks_address);
}

TEST_CASE("belief confirmation stores main and aux, then verifies each") {
    Setup s;
    auto h = s.kb.register_entity("Holiday Inn", "hotel").id;
    TripleKey main{h, "is-a", TypeName{"hotel"}};
    TripleKey aux{h, "has-address", Literal{"150 Pine Street"}};
    auto id = s.store.open_belief(main, {aux}, "alice", "p", s.q, s.kb, 1);
    REQUIRE(s.q.items().size() == 1);
    CHECK(s.q.items()[0].target == "alice");
    CHECK(s.q.items()[0].kind == QuestionKind::belief_confirm);
    CHECK_THROWS_AS(s.answer(id, verify, yes, "bob"), StateError);

    auto t = s.answer(id, confirm, yes, "alice");
    CHECK_FALSE(t.terminal);
    CHECK(t.stage == verify);
    CHECK(s.kb.stored_status(main) == Status::pending_verification);
    CHECK(s.kb.stored_status(aux) == Status::pending_verification);
    REQUIRE(s.q.items().size() == 2);
    for (const auto &item : s.q.items()) {
        CHECK(item.kind == QuestionKind::cross_verify);
        CHECK(item.excluded == std::set<SessionId>{"alice"});
    }
}

TEST_CASE("a rejected belief leaves nothing behind") {
    Setup s;
    auto h = s.kb.register_entity("Holiday Inn", "hotel").id;
    auto id = s.store.open_belief({h, "is-a", TypeName{"hotel"}}, {}, "alice", "p", s.q, s.kb, 1);
    auto t = s.answer(id, confirm, no, "alice");
    CHECK(t.terminal);
    CHECK(s.kb.triples().empty());
    CHECK(s.q.items().empty());
    CHECK(s.store.items().empty());
}

TEST_CASE("an affirmed alias merges the entities everywhere") {
    Setup s;
    auto a = s.kb.incorporate(candidate("Panera Bread", "is-a", "hotel"), Status::verified).grounded.key.subject;
    auto reg = s.kb.register_entity("Panera", "hotel");
    REQUIRE(reg.alias);
    auto b = reg.id;
    s.kb.incorporate(TripleKey{b, "has-parking", Literal{"yes"}}, Status::pending_verification, "p");
    auto vid = s.store.open_verification({b, "has-parking", Literal{"yes"}}, "alice", "p", s.q, s.kb, 1);
    auto aid = s.store.open_alias(*reg.alias, "alice", s.q, 1);

    auto t = s.answer(aid, confirm, yes, "bob");
    REQUIRE(t.merged);
    CHECK(t.merged->existing == a);
    CHECK_FALSE(s.kb.entity(b));
    CHECK(s.store.find(vid)->target.subject == a);
    for (const auto &item : s.q.items()) CHECK(item.subject == a);

    auto other = s.kb.register_entity("Panera Express", "hotel");
    REQUIRE(other.alias);
    auto rid = s.store.open_alias(*other.alias, "alice", s.q, 1);
    CHECK_FALSE(s.answer(rid, confirm, no, "bob").merged);
    CHECK(s.kb.entity(other.id));
}

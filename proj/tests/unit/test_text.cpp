#include "kad/error.hpp"
#include "kad/text.hpp"

#include <doctest.h>

using namespace kad;

TEST_CASE("case and whitespace helpers") {
    CHECK(text::lower("Holiday INN") == "holiday inn");
    CHECK(text::trim("  a b \t") == "a b");
    CHECK(text::iequals("Panera", "PANERA"));
    CHECK_FALSE(text::iequals("Panera", "Panera Bread"));
    CHECK(text::strip_punct("\"Inn,\"") == "Inn");
    CHECK(text::strip_punct("...") == "");
    CHECK(text::is_capitalized("Pine"));
    CHECK_FALSE(text::is_capitalized("pine"));
    CHECK(text::is_number("150"));
    CHECK_FALSE(text::is_number("15a"));
    CHECK_FALSE(text::is_number(""));
}

TEST_CASE("split keeps empty pieces and join reverses it") {
    auto parts = text::split("a, ,b", ',');
    REQUIRE(parts.size() == 3);
    CHECK(parts[1].empty());
    CHECK(text::join(parts, "|") == "a||b");
}

TEST_CASE("key_value splits at the first colon") {
    auto kv = text::key_value("QF: What is {E1}: really?");
    REQUIRE(kv);
    CHECK(kv->first == "qf");
    CHECK(kv->second == "What is {E1}: really?");
    CHECK_FALSE(text::key_value("no colon here"));
}

TEST_CASE("raw triples") {
    std::size_t pos = 0;
    auto t = text::parse_raw_triple(R"((X, has-parking, "yes \"really\""))", pos, 3);
    CHECK(t.subject.kind == text::RawTerm::Kind::bare);
    CHECK(t.subject.text == "X");
    CHECK(t.relation.text == "has-parking");
    CHECK(t.object.kind == text::RawTerm::Kind::quoted);
    CHECK(t.object.text == "yes \"really\"");

    pos = 0;
    auto f = text::parse_raw_triple("(focus(hotel), liked-aspect, ?z)", pos, 1);
    CHECK(f.subject.kind == text::RawTerm::Kind::focus);
    CHECK(f.subject.text == "hotel");
    CHECK(f.object.kind == text::RawTerm::Kind::variable);
    CHECK(f.object.text == "z");

    pos = 0;
    CHECK_THROWS_AS(text::parse_raw_triple("(X, is-a)", pos, 7), ParseError);
    try {
        pos = 0;
        text::parse_raw_triple("(X is-a hotel", pos, 7);
    } catch (const ParseError &e) {
        CHECK(e.line() == 7);
    }
}

TEST_CASE("field escaping round-trips") {
    for (std::string s : {"plain", "tab\there", "new\nline", "back\\slash", "a|b,c"}) {
        auto esc = text::escape_field(s, "|,");
        CHECK(esc.find('\t') == std::string::npos);
        CHECK(esc.find('\n') == std::string::npos);
        CHECK(text::unescape_field(esc) == s);
    }
    auto pieces = text::split_escaped(text::escape_field("a|b", "|") + "|c", '|');
    REQUIRE(pieces.size() == 2);
    CHECK(text::unescape_field(pieces[0]) == "a|b");
}

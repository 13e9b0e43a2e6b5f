#include "fixtures.hpp"
#include "kad/error.hpp"

#include <doctest.h>

#include <filesystem>

using namespace kad;
using fixtures::candidate;

namespace {

void populate(Engine &e) {
    auto a = e.open_session(), b = e.open_session();
    e.handle_turn(a, fixtures::kStayed);
    e.handle_turn(b, fixtures::kFriends);
    e.handle_turn(b, "yes");
    e.handle_turn(a, "The Grand Marlowe has free parking");
    e.handle_turn(b, "Paris is a city in France");
    e.seed_verified(candidate("Grand-Marlowe", "is-a", "hotel"));
    auto dash = candidate("Grand-Marlowe", "liked-aspect", "-");
    dash.provenance = "-";
    e.seed_verified(dash);
}

std::string error_of(const std::string &text) {
    try {
        load_kb(text);
    } catch (const ParseError &e) {
        return e.what();
    }
    return "";
}

ConfigSources hotel_sources() {
    auto dir = fixtures::data_dir() + "/hotel/";
    return ConfigSources{read_file(dir + "rules.kad"),   read_file(dir + "relations.txt"),
                         read_file(dir + "schemas.txt"), read_file(dir + "gazetteer.tsv"),
                         read_file(dir + "inference.txt"), read_file(dir + "lexicon.txt")};
}

std::string config_error(const ConfigSources &src) {
    try {
        load_config(src);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("the KB file round-trips byte for byte") {
    Engine e(fixtures::hotel());
    populate(e);
    auto text = e.save();
    CHECK(text.rfind("#kadkb v1\n", 0) == 0);
    CHECK(text.find("\tv:-\tverified\t\\-\n") != std::string::npos); // a literal dash field is escaped

    auto snap = load_kb(text);
    CHECK(snap == e.snapshot());
    CHECK(save_kb(snap) == text);

    Engine other(fixtures::hotel());
    other.load(text);
    CHECK(other.save() == text);
    CHECK(other.triples(Status::inferred) == e.triples(Status::inferred));
    CHECK(other.snapshot() == e.snapshot());
}

TEST_CASE("engines loaded from the same file continue identically") {
    Engine source(fixtures::hotel());
    populate(source);
    auto text = source.save();
    Engine a(fixtures::hotel()), b(fixtures::hotel());
    a.load(text);
    b.load(text);
    CHECK(a.queue() == b.queue());
    for (const auto &id : {"n1", "n2"}) {
        a.open_session(id);
        b.open_session(id);
    }
    for (const char *line : {"hello", "yes", "no", "It is at 150 Pine Street", "yes", "hello", "yes"}) {
        for (const auto &id : {"n1", "n2"}) {
            auto x = a.handle_turn(id, line), y = b.handle_turn(id, line);
            CHECK(x.reply == y.reply);
            CHECK(x.asked.has_value() == y.asked.has_value());
        }
    }
    CHECK(a.save() == b.save());
    CHECK(a.save() != text);
}

TEST_CASE("malformed KB files are rejected with line numbers") {
    CHECK(error_of("") == "line 1: missing '#kadkb v1' header");
    CHECK(error_of("#kadkb v1\nE\t1\tInn\n") == "line 2: record E needs 4 fields, got 2");
    CHECK(error_of("#kadkb v1\nE\tx\tInn\thotel\t-\n").find("line 2: bad number") == 0);
    CHECK(error_of("#kadkb v1\nT\t3\tis-a\tt:hotel\tverified\t-\n") == "line 2: unknown entity id 3");
    CHECK(error_of("#kadkb v1\nE\t1\tInn\thotel\t-\nT\t1\tis-a\tq:hotel\tverified\t-\n").find("line 3: bad object") ==
          0);
    CHECK(error_of("#kadkb v1\nZ\t1\n") == "line 2: unknown record type 'Z'");
    CHECK(error_of("#kadkb v1\nE\t1\tInn\thotel\t-\nE\t1\tInn\thotel\t-\n") == "line 3: duplicate entity id 1");
}

TEST_CASE("write_file replaces files atomically") {
    auto dir = std::filesystem::temp_directory_path() / "kad_storage_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "kb.txt";
    write_file(path, "one");
    write_file(path, "two");
    CHECK(read_file(path) == "two");
    CHECK_FALSE(std::filesystem::exists(dir / "kb.txt.tmp"));
    CHECK_THROWS_AS(read_file(dir / "missing"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("bundle paths find the conventional files") {
    auto p = bundle_paths(fixtures::data_dir() + "/hotel");
    CHECK(p.rules.filename() == "rules.kad");
    CHECK_FALSE(p.inference.empty());
    auto none = bundle_paths(fixtures::data_dir() + "/does-not-exist");
    CHECK(none.gazetteer.empty());
    CHECK_THROWS_AS(load_config(none), Error);
    CHECK(load_config(p).rules.size() == fixtures::hotel().rules.size());
}

TEST_CASE("configuration cross-checks collect every problem") {
    auto src = hotel_sources();
    CHECK(config_error(src).empty());

    auto bad = src;
    bad.rules += "\nrule extra\n  var X: entity(name)\n  pattern: * X rocks\n  fact: (X, rocks, \"yes\")\nend\n";
    bad.schemas = "type lodging\ntype hotel parent lodging\n  prop has-address\n  prop has-parking\ntype city\n"
                  "type country\n";
    bad.inference += "(?a, p, ?b) => (?a, q, ?b)\n";
    auto msg = config_error(bad);
    CHECK(msg.find("rules:") != std::string::npos);
    CHECK(msg.find("unregistered relation 'rocks'") != std::string::npos);
    CHECK(msg.find("identifying flag of 'has-address' disagrees") != std::string::npos);
    CHECK(msg.find("inference:") != std::string::npos);
    CHECK(msg.find("unregistered relation 'p'") != std::string::npos);

    auto syntax = src;
    syntax.rules = "rule a\n  pattern: hi\n";
    CHECK(config_error(syntax) == "rules:1: rule a is missing 'end'");
}

#pragma once

// Small string helpers shared by the parsers and the tokenizer.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kad::text {

std::string lower(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Splits on `sep`, trimming each piece; empty pieces are kept.
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

/// Strips leading and trailing ASCII punctuation, keeping inner characters ("O'Hare").
std::string strip_punct(std::string_view s);

bool is_capitalized(std::string_view s);
bool is_number(std::string_view s);

/// Splits `line` at the first ':' into a lowercase key and a trimmed value.
std::optional<std::pair<std::string, std::string>> key_value(std::string_view line);

/// Term as written inside "(a, b, c)": quoted string, `?var`, `focus(type)` or bare word.
struct RawTerm {
    enum class Kind { quoted, bare, variable, focus };
    Kind kind;
    std::string text;
};

/// Parses "(term, relation, term)" starting at `pos`; advances `pos` past ')'.
/// Throws ParseError(line, ...) on malformed input.
struct RawTriple {
    RawTerm subject;
    RawTerm relation;
    RawTerm object;
};
RawTriple parse_raw_triple(std::string_view s, std::size_t &pos, int line);

/// Escaping for tab-separated storage fields: backslash, tab, newline and `extra`.
std::string escape_field(std::string_view s, std::string_view extra = {});
std::string unescape_field(std::string_view s);
/// Splits on `sep` ignoring backslash-escaped separators; pieces stay escaped.
std::vector<std::string> split_escaped(std::string_view s, char sep);

} // namespace kad::text

#include "kad/text.hpp"

#include "kad/error.hpp"

#include <algorithm>
#include <cctype>

namespace kad::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

} // namespace

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto p = s.find(sep, start);
        if (p == std::string_view::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, p - start)));
        start = p + 1;
    }
    return out;
}

std::string join(const std::vector<std::string> &parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string strip_punct(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_punct(s[b])) ++b;
    while (e > b && is_ascii_punct(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

bool is_capitalized(std::string_view s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

bool is_number(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<std::pair<std::string, std::string>> key_value(std::string_view line) {
    auto p = line.find(':');
    if (p == std::string_view::npos) return std::nullopt;
    return std::make_pair(lower(trim(line.substr(0, p))), trim(line.substr(p + 1)));
}

namespace {

void skip_ws(std::string_view s, std::size_t &pos) {
    while (pos < s.size() && is_space(s[pos])) ++pos;
}

RawTerm parse_term(std::string_view s, std::size_t &pos, int line) {
    skip_ws(s, pos);
    if (pos >= s.size()) throw ParseError(line, "expected a term");
    if (s[pos] == '"') {
        std::string out;
        ++pos;
        while (pos < s.size() && s[pos] != '"') {
            if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
            out += s[pos++];
        }
        if (pos >= s.size()) throw ParseError(line, "unterminated string");
        ++pos;
        return {RawTerm::Kind::quoted, out};
    }
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != ',' && s[pos] != ')' && s[pos] != '(') ++pos;
    std::string word = trim(s.substr(start, pos - start));
    if (pos < s.size() && s[pos] == '(') {
        // focus(type)
        if (word != "focus") throw ParseError(line, "unexpected '(' after '" + word + "'");
        auto close = s.find(')', pos);
        if (close == std::string_view::npos) throw ParseError(line, "unterminated focus(...)");
        std::string type = trim(s.substr(pos + 1, close - pos - 1));
        if (type.empty()) throw ParseError(line, "focus() needs a type");
        pos = close + 1;
        return {RawTerm::Kind::focus, type};
    }
    if (word.empty()) throw ParseError(line, "empty term");
    if (word[0] == '?') {
        if (word.size() == 1) throw ParseError(line, "variable needs a name");
        return {RawTerm::Kind::variable, word.substr(1)};
    }
    return {RawTerm::Kind::bare, word};
}

void expect(std::string_view s, std::size_t &pos, char c, int line) {
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != c) throw ParseError(line, std::string("expected '") + c + "'");
    ++pos;
}

} // namespace

RawTriple parse_raw_triple(std::string_view s, std::size_t &pos, int line) {
    expect(s, pos, '(', line);
    RawTriple t;
    t.subject = parse_term(s, pos, line);
    expect(s, pos, ',', line);
    t.relation = parse_term(s, pos, line);
    if (t.relation.kind != RawTerm::Kind::bare) throw ParseError(line, "relation must be a bare name");
    expect(s, pos, ',', line);
    t.object = parse_term(s, pos, line);
    expect(s, pos, ')', line);
    return t;
}

std::string escape_field(std::string_view s, std::string_view extra) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        default:
            if (extra.find(c) != std::string_view::npos) out += '\\';
            out += c;
        }
    }
    return out;
}

std::string unescape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out += s[i];
            continue;
        }
        char n = s[++i];
        switch (n) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: out += n;
        }
    }
    return out;
}

std::vector<std::string> split_escaped(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            cur += s[i];
            cur += s[++i];
        } else if (s[i] == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += s[i];
        }
    }
    out.push_back(std::move(cur));
    return out;
}

} // namespace kad::text

#include "kad/entity.hpp"

#include "kad/text.hpp"

#include <algorithm>
#include <sstream>

namespace kad {

namespace {

const std::vector<std::string> kDefaultSuffixes = {"Street", "St", "Avenue", "Ave", "Road", "Rd",
                                                   "Drive", "Dr", "Boulevard", "Blvd", "Lane", "Ln"};

bool ends_sentence(std::string_view raw) {
    while (!raw.empty() && (raw.back() == '"' || raw.back() == '\'' || raw.back() == ')')) raw.remove_suffix(1);
    return !raw.empty() && (raw.back() == '.' || raw.back() == '!' || raw.back() == '?');
}

bool is_first_person(std::string_view norm) {
    return norm == "i" || norm == "i'm" || norm == "i've" || norm == "i'd" || norm == "i'll";
}

std::string surface_of(const std::vector<Token> &tokens, std::size_t b, std::size_t e) {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        if (i > b) out += ' ';
        out += tokens[i].text;
    }
    return out;
}

std::vector<std::string> words_lower(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string w; in >> w;) out.push_back(text::lower(w));
    std::sort(out.begin(), out.end());
    return out;
}

bool sub_multiset(const std::vector<std::string> &small, const std::vector<std::string> &big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

} // namespace

const EntitySpan *AnnotatedUtterance::span_at(std::size_t start) const {
    auto it = std::lower_bound(spans.begin(), spans.end(), start,
                               [](const EntitySpan &s, std::size_t v) { return s.start < v; });
    return it != spans.end() && it->start == start ? &*it : nullptr;
}

Gazetteer::Gazetteer() { set_street_suffixes(kDefaultSuffixes); }

Gazetteer Gazetteer::parse(std::string_view source) {
    Gazetteer g;
    std::istringstream in{std::string(source)};
    for (std::string line; std::getline(in, line);) {
        auto t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        auto surface = text::trim(std::string_view(line).substr(0, tab));
        auto tag = text::trim(std::string_view(line).substr(tab + 1));
        if (!surface.empty()) g.add(surface, tag.empty() ? "unknown" : tag);
    }
    return g;
}

void Gazetteer::add(std::string_view surface, std::string_view type_tag) {
    auto toks = tokenize(surface);
    if (toks.empty()) return;
    Entry e;
    for (auto &t : toks) e.norms.push_back(t.norm);
    e.type_tag = std::string(type_tag);
    entries_[text::lower(surface_of(toks, 0, toks.size()))] = e.type_tag;
    auto &bucket = by_first_[e.norms.front()];
    bucket.erase(std::remove_if(bucket.begin(), bucket.end(), [&](const Entry &x) { return x.norms == e.norms; }),
                 bucket.end());
    bucket.push_back(std::move(e));
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const Entry &a, const Entry &b) { return a.norms.size() > b.norms.size(); });
}

void Gazetteer::set_street_suffixes(std::vector<std::string> suffixes) {
    suffixes_.clear();
    for (auto &s : suffixes) suffixes_.insert(text::lower(s));
}

std::optional<std::string> Gazetteer::type_of(std::string_view surface) const {
    auto it = entries_.find(text::lower(text::trim(surface)));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool Gazetteer::is_street_suffix(std::string_view word) const { return suffixes_.count(text::lower(word)) != 0; }

std::optional<std::pair<std::size_t, std::string>> Gazetteer::longest_at(const std::vector<Token> &tokens,
                                                                         std::size_t pos) const {
    auto it = by_first_.find(tokens[pos].norm);
    if (it == by_first_.end()) return std::nullopt;
    for (const auto &e : it->second) {
        if (pos + e.norms.size() > tokens.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < e.norms.size() && ok; ++k) ok = tokens[pos + k].norm == e.norms[k];
        if (ok) return std::make_pair(e.norms.size(), e.type_tag);
    }
    return std::nullopt;
}

std::vector<Token> tokenize(std::string_view input) {
    std::vector<Token> out;
    std::istringstream in{std::string(input)};
    bool next_initial = true;
    for (std::string raw; in >> raw;) {
        auto stripped = text::strip_punct(raw);
        if (!stripped.empty()) {
            out.push_back({stripped, text::lower(stripped), next_initial});
            next_initial = false;
        }
        if (ends_sentence(raw)) next_initial = true;
    }
    return out;
}

AnnotatedUtterance annotate(std::string_view input, const Gazetteer &gazetteer) {
    AnnotatedUtterance u;
    u.tokens = tokenize(input);
    const auto n = u.tokens.size();
    std::vector<bool> covered(n, false);
    auto claim = [&](std::size_t b, std::size_t e, SpanKind kind, std::string tag) {
        for (auto i = b; i < e; ++i) covered[i] = true;
        u.spans.push_back({b, e, surface_of(u.tokens, b, e), kind, std::move(tag)});
    };

    for (std::size_t i = 0; i < n;) {
        if (auto hit = gazetteer.longest_at(u.tokens, i)) {
            claim(i, i + hit->first, SpanKind::name, hit->second);
            i += hit->first;
        } else {
            ++i;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (covered[i] || !text::is_number(u.tokens[i].text)) continue;
        for (std::size_t j = i + 1; j < n && j - i <= 6; ++j) {
            if (covered[j] || !text::is_capitalized(u.tokens[j].text)) break;
            if (j > i + 1 && gazetteer.is_street_suffix(u.tokens[j].text)) {
                claim(i, j + 1, SpanKind::address, "address");
                i = j;
                break;
            }
        }
    }

    auto name_token = [&](std::size_t i) {
        const auto &t = u.tokens[i];
        return !covered[i] && !t.sentence_initial && text::is_capitalized(t.text) && !is_first_person(t.norm);
    };
    for (std::size_t i = 0; i < n;) {
        if (!name_token(i)) {
            ++i;
            continue;
        }
        auto j = i;
        while (j < n && name_token(j)) ++j;
        claim(i, j, SpanKind::name, "unknown");
        i = j;
    }

    std::sort(u.spans.begin(), u.spans.end(), [](const EntitySpan &a, const EntitySpan &b) { return a.start < b.start; });
    return u;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

NameVerdict name_similarity(std::string_view incoming, std::string_view existing) {
    auto a = text::trim(incoming), b = text::trim(existing);
    if (text::iequals(a, b)) return NameVerdict::identical;
    auto wa = words_lower(a), wb = words_lower(b);
    if (!wa.empty() && !wb.empty() && (sub_multiset(wa, wb) || sub_multiset(wb, wa)))
        return NameVerdict::candidate_alias;
    auto longer = std::max(a.size(), b.size());
    if (longer > 0 && 3 * levenshtein(text::lower(a), text::lower(b)) <= longer) return NameVerdict::candidate_alias;
    return NameVerdict::distinct;
}

std::optional<EntityId> FocusMap::get(std::string_view type) const {
    auto it = focus_.find(type);
    if (it == focus_.end()) return std::nullopt;
    return it->second;
}

bool FocusMap::contains_entity(EntityId id) const {
    return std::any_of(focus_.begin(), focus_.end(), [&](const auto &kv) { return kv.second == id; });
}

void FocusMap::replace_entity(EntityId from, EntityId to) {
    for (auto &kv : focus_)
        if (kv.second == from) kv.second = to;
}

std::optional<EntityId> resolve_focus(const FocusMap &focus, std::string_view type) { return focus.get(type); }

} // namespace kad

#include "artism/text.hpp"

#include <algorithm>
#include <sstream>

#include "artism/embedded_data.hpp"

namespace artism::text {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') || u >= 0x80;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::vector<std::string> lines_of(std::string_view blob) {
    std::vector<std::string> out;
    std::istringstream in{std::string(blob)};
    for (std::string line; std::getline(in, line);) {
        auto t = trim(line);
        if (!t.empty()) out.push_back(to_lower(t));
    }
    return out;
}

const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> set(stopwords().begin(), stopwords().end());
    return set;
}

const std::unordered_set<std::string>& affect_set() {
    static const std::unordered_set<std::string> set(affect_lexicon().begin(), affect_lexicon().end());
    return set;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string> alnum_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_word_byte(c)) {
            cur.push_back(lower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        while (!cur.empty() && cur.back() == '-') cur.pop_back();
        std::size_t lead = 0;
        while (lead < cur.size() && cur[lead] == '-') ++lead;
        if (lead < cur.size()) out.push_back(cur.substr(lead));
        cur.clear();
    };
    for (char c : s) {
        if (is_word_byte(c) || c == '-') cur.push_back(lower(c));
        else flush();
    }
    flush();
    return out;
}

std::string stem_word(std::string_view word) {
    std::string w(word);
    if (w.size() > 3 && w.back() == 's') {
        const char prev = w[w.size() - 2];
        if (prev != 's' && prev != 'u' && prev != 'i' && prev != 'a') w.pop_back();
    }
    return w;
}

std::vector<std::string> stemmed_tokens(std::string_view s) {
    auto tokens = word_tokens(s);
    for (auto& t : tokens) t = stem_word(t);
    return tokens;
}

std::string stem_phrase(std::string_view phrase) { return join(stemmed_tokens(phrase), " "); }

std::string title_case(std::string_view word) {
    std::string out(word);
    bool at_start = true;
    for (char& c : out) {
        if (at_start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        at_start = (c == '-' || c == ' ');
    }
    return out;
}

std::vector<std::string> keywords(std::string_view s, std::size_t limit) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& tok : alnum_tokens(s)) {
        if (out.size() >= limit) break;
        if (is_stopword(tok) || !seen.insert(tok).second) continue;
        out.push_back(tok);
    }
    return out;
}

double affect_ratio(std::string_view s) {
    const auto tokens = split_whitespace(s);
    if (tokens.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& raw : tokens) {
        std::size_t b = 0, e = raw.size();
        while (b < e && !is_word_byte(raw[b])) ++b;
        while (e > b && !is_word_byte(raw[e - 1])) --e;
        if (is_affect_word(to_lower(std::string_view(raw).substr(b, e - b)))) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

double keyword_overlap(const std::vector<std::string>& kws, std::string_view context) {
    if (kws.empty()) return 0.0;
    const auto tokens = alnum_tokens(context);
    const std::unordered_set<std::string> present(tokens.begin(), tokens.end());
    std::size_t hits = 0;
    for (const auto& k : kws) {
        // multi-word keywords count when every part is present
        const auto parts = alnum_tokens(k);
        if (!parts.empty() && std::all_of(parts.begin(), parts.end(), [&](const std::string& p) { return present.count(p) > 0; })) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(kws.size());
}

std::string first_sentences(std::string_view s, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == s.size() || is_space(s[i + 1]))) {
            if (++count == n) return trim(s.substr(0, i + 1));
        }
    }
    return trim(s);
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

const std::vector<std::string>& affect_lexicon() {
    static const auto words = lines_of(data::kAffectLexicon);
    return words;
}

const std::vector<std::string>& stopwords() {
    static const auto words = lines_of(data::kStopwords);
    return words;
}

const std::vector<std::string>& mock_words() {
    static const auto words = lines_of(data::kMockWords);
    return words;
}

bool is_stopword(std::string_view token) { return stopword_set().count(std::string(token)) > 0; }
bool is_affect_word(std::string_view token) { return affect_set().count(std::string(token)) > 0; }

}  // namespace artism::text

#include "artism/lexicon.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "artism/text.hpp"

namespace artism {

PhraseMatcher::PhraseMatcher(const std::vector<std::string>& phrases) : phrase_count_(phrases.size()) {
    std::set<std::vector<std::string>> seen;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        auto tokens = text::stemmed_tokens(phrases[i]);
        if (tokens.empty() || !seen.insert(tokens).second) continue;
        buckets_[tokens.front()].push_back({std::move(tokens), i});
    }
    for (auto& [_, bucket] : buckets_) {
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const Entry& a, const Entry& b) { return a.tokens.size() > b.tokens.size(); });
    }
}

std::vector<std::size_t> PhraseMatcher::match(std::string_view text) const {
    const auto tokens = text::stemmed_tokens(text);
    std::vector<std::size_t> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t advance = 1;
        if (auto it = buckets_.find(tokens[i]); it != buckets_.end()) {
            for (const auto& e : it->second) {
                if (i + e.tokens.size() > tokens.size()) continue;
                if (std::equal(e.tokens.begin(), e.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                    out.push_back(e.index);
                    advance = e.tokens.size();
                    break;
                }
            }
        }
        i += advance;
    }
    return out;
}

std::size_t PhraseMatcher::count_distinct(std::string_view text) const {
    const auto hits = match(text);
    return std::unordered_set<std::size_t>(hits.begin(), hits.end()).size();
}

bool contains_phrase(std::string_view text, std::string_view phrase) {
    const auto hay = text::stemmed_tokens(text);
    const auto needle = text::stemmed_tokens(phrase);
    if (needle.empty()) return false;
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace artism

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace artism {

/// Longest-match, left-to-right phrase matcher over stemmed word tokens.
/// Phrases are matched case-insensitively with trailing-'s' stemming on both sides.
class PhraseMatcher {
public:
    PhraseMatcher() = default;
    explicit PhraseMatcher(const std::vector<std::string>& phrases);

    /// Indices (into the constructor's phrase list) of every match, in text order.
    /// When several phrases share a stemmed form the first one listed wins.
    std::vector<std::size_t> match(std::string_view text) const;

    /// Number of distinct phrases matched.
    std::size_t count_distinct(std::string_view text) const;

    std::size_t size() const { return phrase_count_; }

private:
    struct Entry {
        std::vector<std::string> tokens;
        std::size_t index;
    };
    // keyed by first stemmed token; each bucket sorted longest first
    std::unordered_map<std::string, std::vector<Entry>> buckets_;
    std::size_t phrase_count_ = 0;
};

/// True when the stemmed token sequence of `phrase` occurs contiguously in `text`.
bool contains_phrase(std::string_view text, std::string_view phrase);

}  // namespace artism

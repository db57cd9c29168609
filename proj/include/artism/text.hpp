#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace artism::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Runs of whitespace become one space; leading/trailing whitespace removed.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

/// Lowercased runs of ASCII letters/digits (bytes >= 0x80 count as letters,
/// so accented words stay whole). Hyphens and apostrophes split tokens.
std::vector<std::string> alnum_tokens(std::string_view s);

/// Lowercased word tokens that keep inner hyphens ("negative-volume").
std::vector<std::string> word_tokens(std::string_view s);

/// Strips one trailing 's' from words longer than three characters, except
/// words ending in "ss", "us", "is" or "as".
std::string stem_word(std::string_view word);

/// word_tokens + stem_word, rejoined by single spaces.
std::string stem_phrase(std::string_view phrase);
std::vector<std::string> stemmed_tokens(std::string_view s);

/// "negative" -> "Negative", "post-impressionism" -> "Post-Impressionism".
std::string title_case(std::string_view word);

/// Non-stopword alnum tokens by first occurrence, at most `limit`.
std::vector<std::string> keywords(std::string_view s, std::size_t limit);

/// Fraction of whitespace tokens (lowercased, outer punctuation stripped) found in the affect lexicon.
double affect_ratio(std::string_view s);

/// Fraction of `keywords` occurring among the alnum tokens of `context`. 0 for no keywords.
double keyword_overlap(const std::vector<std::string>& keywords, std::string_view context);

/// First `n` sentences ('.', '!' or '?' followed by space or end).
std::string first_sentences(std::string_view s, std::size_t n);

bool starts_with(std::string_view s, std::string_view prefix);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Bundled word lists.
const std::vector<std::string>& affect_lexicon();
const std::vector<std::string>& stopwords();
const std::vector<std::string>& mock_words();
bool is_stopword(std::string_view token);
bool is_affect_word(std::string_view token);

}  // namespace artism::text

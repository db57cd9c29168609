#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artism/canonical.hpp"
#include "artism/error.hpp"

namespace artism::corpus {

enum class SourceOrigin { wikiart, wikipedia, artsy, custom };

struct Work {
    std::string title;
    std::optional<int> year;
    std::string description;
};

struct Source {
    SourceOrigin origin = SourceOrigin::custom;
    std::string uri;
};

struct ArtistRecord {
    std::string external_id;
    std::string name;
    std::optional<int> birth_year;
    std::optional<int> death_year;
    std::vector<std::string> movements;
    std::string bio_text;
    std::vector<Work> works;
    std::vector<Source> sources;
};

struct ArtistProfile {
    std::string agent_id;
    std::string display_name;
    std::string era_label;
    std::string reference_text;
    std::vector<std::string> style_keywords;
    std::vector<std::string> attributes;

    bool operator==(const ArtistProfile&) const = default;
};

void to_json(Json& j, const ArtistProfile& p);
void from_json(const Json& j, ArtistProfile& p);

struct LengthBounds {
    std::size_t l_min = 400;
    std::size_t l_max = 1200;
};

struct ParsedRecord {
    ArtistRecord record;
    std::vector<std::string> warnings;
    std::size_t unknown_fields = 0;
};

/// Parses one corpus line (a JSON object). Throws MissingField / MalformedRecord.
ParsedRecord parse_artist_record(std::string_view raw);

struct NormalizedText {
    std::string text;
    /// True when padding ran out of material before reaching l_min.
    bool below_minimum = false;
};

/// "NAME (YEARS). MOVEMENTS. BIO. WORKS." with whitespace collapsed, cut at the
/// last sentence boundary within l_max, padded with work descriptions up to l_min.
NormalizedText normalize_reference_text(const ArtistRecord& record, LengthBounds bounds = {});

/// Lowercase, non-alphanumerics to '-', runs collapsed, ends trimmed, at most 64 chars.
std::string derive_agent_id(std::string_view external_id);

ArtistProfile make_profile(const ArtistRecord& record, std::string reference_text);

struct IngestReport {
    std::size_t line = 0;
    ErrorCode code = ErrorCode::MalformedRecord;
    std::string message;
    bool rejected = true;
};

struct CorpusLoad {
    std::vector<ArtistProfile> profiles;
    std::vector<IngestReport> reports;
    std::size_t rejected_count() const;
};

/// One profile per accepted record, in file order. Throws FileUnreadable.
CorpusLoad load_corpus(const std::filesystem::path& path, LengthBounds bounds = {});

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

}  // namespace artism::corpus

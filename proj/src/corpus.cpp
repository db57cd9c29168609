#include "artism/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "artism/text.hpp"

namespace artism::corpus {

namespace {

const std::set<std::string> kKnownFields = {"external_id", "name", "birth_year", "death_year", "movements",
                                            "bio_text", "works", "sources"};

std::optional<SourceOrigin> origin_from(std::string_view s) {
    if (s == "wikiart") return SourceOrigin::wikiart;
    if (s == "wikipedia") return SourceOrigin::wikipedia;
    if (s == "artsy") return SourceOrigin::artsy;
    if (s == "custom") return SourceOrigin::custom;
    return std::nullopt;
}

std::string required_string(const Json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string() || text::trim(it->get<std::string>()).empty())
        fail(ErrorCode::MissingField, field);
    return text::trim(it->get<std::string>());
}

std::optional<int> optional_year(const Json& obj, const char* field, std::vector<std::string>& warnings) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_number_integer()) return it->get<int>();
    warnings.push_back(std::string("MalformedYear: ") + field + " dropped");
    return std::nullopt;
}

bool is_sentence_end(std::string_view s, std::size_t i) {
    const char c = s[i];
    return (c == '.' || c == '!' || c == '?') && (i + 1 == s.size() || s[i + 1] == ' ');
}

std::string sentence(std::string_view s) {
    auto t = text::collapse_whitespace(s);
    if (!t.empty() && t.back() != '.' && t.back() != '!' && t.back() != '?') t.push_back('.');
    return t;
}

// Cut `s` at the last sentence boundary whose prefix has at most `limit` code points.
std::string truncate_at_sentence(const std::string& s, std::size_t limit) {
    std::size_t best = std::string::npos;
    std::size_t cps = 0;
    std::size_t last_space = std::string::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++cps;
        if (cps > limit) break;
        if (s[i] == ' ') last_space = i;
        if (is_sentence_end(s, i)) best = i;
    }
    if (best != std::string::npos) return s.substr(0, best + 1);
    // No sentence boundary fits: fall back to the last word boundary.
    if (last_space != std::string::npos) return s.substr(0, last_space);
    std::size_t bytes = 0;
    cps = 0;
    while (bytes < s.size()) {
        if ((static_cast<unsigned char>(s[bytes]) & 0xC0) != 0x80 && ++cps > limit) break;
        ++bytes;
    }
    return s.substr(0, bytes);
}

std::string years_label(const ArtistRecord& r) {
    if (r.birth_year && r.death_year) return std::to_string(*r.birth_year) + "-" + std::to_string(*r.death_year);
    if (r.birth_year) return "born " + std::to_string(*r.birth_year);
    if (r.death_year) return "died " + std::to_string(*r.death_year);
    return {};
}

std::string era_label(const ArtistRecord& r) {
    int decade = 0;
    if (r.birth_year) decade = (*r.birth_year + 30) / 10 * 10;
    else if (r.death_year) decade = (*r.death_year - 10) / 10 * 10;
    else return "undated";
    return "active c. " + std::to_string(decade) + "s";
}

std::vector<std::string> style_keywords(const ArtistRecord& r) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& m : r.movements) {
        auto k = text::to_lower(text::collapse_whitespace(m));
        if (!k.empty() && seen.insert(k).second) out.push_back(k);
    }
    // Bio words from the bundled art vocabulary first, then other substantial words;
    // within each group by frequency, ties by first occurrence.
    static const std::unordered_set<std::string> vocabulary(text::mock_words().begin(), text::mock_words().end());
    std::map<std::string, std::pair<int, std::size_t>> freq;
    const auto tokens = text::alnum_tokens(r.bio_text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (text::is_stopword(t) || (t.size() < 5 && !vocabulary.count(t))) continue;
        auto [it, inserted] = freq.try_emplace(t, 0, i);
        ++it->second.first;
    }
    std::vector<std::pair<std::string, std::pair<int, std::size_t>>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        const bool va = vocabulary.count(a.first) > 0, vb = vocabulary.count(b.first) > 0;
        if (va != vb) return va;
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    for (const auto& [word, _] : ranked) {
        if (out.size() >= 8) break;
        if (seen.insert(word).second) out.push_back(word);
    }
    return out;
}

}  // namespace

std::size_t utf8_length(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

ParsedRecord parse_artist_record(std::string_view raw) {
    Json obj;
    try {
        obj = Json::parse(raw);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::MalformedRecord, e.what());
    }
    if (!obj.is_object()) fail(ErrorCode::MalformedRecord, "record is not a JSON object");

    ParsedRecord out;
    auto& rec = out.record;
    rec.external_id = required_string(obj, "external_id");
    rec.name = required_string(obj, "name");
    rec.birth_year = optional_year(obj, "birth_year", out.warnings);
    rec.death_year = optional_year(obj, "death_year", out.warnings);
    if (rec.birth_year && rec.death_year && *rec.death_year < *rec.birth_year) {
        out.warnings.push_back("MalformedYear: death_year precedes birth_year, both dropped");
        rec.birth_year.reset();
        rec.death_year.reset();
    }

    if (auto it = obj.find("movements"); it != obj.end() && it->is_array()) {
        for (const auto& m : *it)
            if (m.is_string() && !text::trim(m.get<std::string>()).empty()) rec.movements.push_back(text::trim(m.get<std::string>()));
    }
    if (auto it = obj.find("bio_text"); it != obj.end() && it->is_string()) rec.bio_text = it->get<std::string>();

    if (auto it = obj.find("works"); it != obj.end() && it->is_array()) {
        for (const auto& w : *it) {
            if (!w.is_object()) continue;
            Work work;
            if (auto t = w.find("title"); t != w.end() && t->is_string()) work.title = text::trim(t->get<std::string>());
            if (work.title.empty()) {
                out.warnings.push_back("work without title dropped");
                continue;
            }
            if (auto y = w.find("year"); y != w.end() && !y->is_null()) {
                if (y->is_number_integer()) work.year = y->get<int>();
                else out.warnings.push_back("MalformedYear: work year dropped");
            }
            if (auto d = w.find("description"); d != w.end() && d->is_string()) work.description = d->get<std::string>();
            rec.works.push_back(std::move(work));
        }
    }
    if (auto it = obj.find("sources"); it != obj.end() && it->is_array()) {
        for (const auto& s : *it) {
            if (!s.is_object()) continue;
            auto o = s.find("origin");
            auto origin = (o != s.end() && o->is_string()) ? origin_from(o->get<std::string>()) : std::nullopt;
            if (!origin) {
                out.warnings.push_back("source with unknown origin dropped");
                continue;
            }
            Source src{*origin, {}};
            if (auto u = s.find("uri"); u != s.end() && u->is_string()) src.uri = u->get<std::string>();
            rec.sources.push_back(std::move(src));
        }
    }
    for (const auto& [key, _] : obj.items()) {
        if (!kKnownFields.count(key)) {
            ++out.unknown_fields;
            out.warnings.push_back("unknown field ignored: " + key);
        }
    }
    return out;
}

NormalizedText normalize_reference_text(const ArtistRecord& record, LengthBounds bounds) {
    require(bounds.l_min > 0 && bounds.l_min < bounds.l_max, "need 0 < l_min < l_max");
    const auto bio = text::collapse_whitespace(record.bio_text);
    if (bio.empty() && record.works.empty()) fail(ErrorCode::InsufficientMaterial, record.external_id);

    std::vector<std::string> parts;
    const auto years = years_label(record);
    parts.push_back(years.empty() ? sentence(record.name) : record.name + " (" + years + ").");
    if (!record.movements.empty()) parts.push_back(sentence(text::join(record.movements, ", ")));
    if (!bio.empty()) parts.push_back(sentence(bio));
    if (!record.works.empty()) {
        std::vector<std::string> titles;
        for (const auto& w : record.works) titles.push_back(w.year ? w.title + " (" + std::to_string(*w.year) + ")" : w.title);
        parts.push_back("Works: " + sentence(text::join(titles, ", ")));
    }

    NormalizedText out;
    out.text = text::collapse_whitespace(text::join(parts, " "));
    for (std::size_t i = 0; utf8_length(out.text) < bounds.l_min && i < record.works.size(); ++i) {
        const auto& d = record.works[i].description;
        if (text::trim(d).empty()) continue;
        out.text = text::collapse_whitespace(out.text + " " + sentence(d));
    }
    if (utf8_length(out.text) > bounds.l_max) out.text = truncate_at_sentence(out.text, bounds.l_max);
    out.below_minimum = utf8_length(out.text) < bounds.l_min;
    return out;
}

std::string derive_agent_id(std::string_view external_id) {
    std::string out;
    for (char c : external_id) {
        const auto u = static_cast<unsigned char>(c);
        const bool alnum = (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9');
        if (alnum) {
            out.push_back(static_cast<char>(std::tolower(u)));
        } else if (out.empty() || out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.front() == '-') out.erase(out.begin());
    if (out.size() > 64) out.resize(64);
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

ArtistProfile make_profile(const ArtistRecord& record, std::string reference_text) {
    ArtistProfile p;
    p.agent_id = derive_agent_id(record.external_id);
    if (p.agent_id.empty()) fail(ErrorCode::MalformedRecord, "external_id yields an empty agent id");
    p.display_name = record.name;
    p.era_label = era_label(record);
    p.reference_text = std::move(reference_text);
    p.style_keywords = style_keywords(record);
    p.attributes = record.movements;
    return p;
}

std::size_t CorpusLoad::rejected_count() const {
    return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.rejected; }));
}

CorpusLoad load_corpus(const std::filesystem::path& path, LengthBounds bounds) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileUnreadable, path.string());

    CorpusLoad out;
    std::unordered_set<std::string> external_ids;
    std::unordered_set<std::string> agent_ids;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (text::trim(line).empty()) continue;
        try {
            auto parsed = parse_artist_record(line);
            for (const auto& w : parsed.warnings) out.reports.push_back({lineno, ErrorCode::MalformedRecord, w, false});
            const auto& rec = parsed.record;
            const auto agent_id = derive_agent_id(rec.external_id);
            if (!external_ids.insert(rec.external_id).second || !agent_ids.insert(agent_id).second) {
                out.reports.push_back({lineno, ErrorCode::DuplicateExternalId, rec.external_id, true});
                continue;
            }
            auto normalized = normalize_reference_text(rec, bounds);
            if (normalized.below_minimum)
                out.reports.push_back({lineno, ErrorCode::InsufficientMaterial, "reference text shorter than l_min", false});
            out.profiles.push_back(make_profile(rec, std::move(normalized.text)));
        } catch (const Error& e) {
            out.reports.push_back({lineno, e.code(), e.what(), true});
        }
    }
    return out;
}

void to_json(Json& j, const ArtistProfile& p) {
    j = Json{{"agent_id", p.agent_id},           {"display_name", p.display_name}, {"era_label", p.era_label},
             {"reference_text", p.reference_text}, {"style_keywords", p.style_keywords}, {"attributes", p.attributes}};
}

void from_json(const Json& j, ArtistProfile& p) {
    j.at("agent_id").get_to(p.agent_id);
    j.at("display_name").get_to(p.display_name);
    j.at("era_label").get_to(p.era_label);
    j.at("reference_text").get_to(p.reference_text);
    j.at("style_keywords").get_to(p.style_keywords);
    j.at("attributes").get_to(p.attributes);
}

}  // namespace artism::corpus

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "artism/canonical.hpp"
#include "artism/lexicon.hpp"

namespace artism::gateway {
class Gateway;
}

namespace artism::ismism {

using Tick = std::int64_t;

enum class Category { terminology, style, gene, movement, literature_excerpt, synthetic_critique };
enum class Origin { human, synthetic };

std::string_view to_string(Category c);
std::string_view to_string(Origin o);
Category category_from(std::string_view s);
Origin origin_from(std::string_view s);

struct KnowledgeEntry {
    std::string entry_id;
    std::string term;
    std::string definition;
    Category category = Category::terminology;
    Origin origin = Origin::human;
    int generation = 0;
    std::vector<std::string> source_refs;
    Tick created_tick = 0;
    /// Same term already present in the same category.
    bool duplicate = false;

    bool operator==(const KnowledgeEntry&) const = default;
};

struct ConceptUnit {
    std::string unit_id;
    std::string label;
    std::string gloss;
    std::string origin_entry;

    bool operator==(const ConceptUnit&) const = default;
};

struct Ism {
    std::string ism_id;
    std::string name;
    std::string description;
    std::vector<ConceptUnit> units;
    std::string image_prompt;
    std::vector<std::string> critiques;
    Tick created_tick = 0;
    std::optional<std::string> assigned_agent;

    bool operator==(const Ism&) const = default;
};

struct Critique {
    std::string critique_id;
    std::string ism_id;
    std::string text;
    Tick created_tick = 0;
    std::optional<std::string> fed_back_entry;

    bool operator==(const Critique&) const = default;
};

void to_json(Json& j, const KnowledgeEntry& e);
void from_json(const Json& j, KnowledgeEntry& e);
void to_json(Json& j, const ConceptUnit& u);
void from_json(const Json& j, ConceptUnit& u);
void to_json(Json& j, const Ism& i);
void from_json(const Json& j, Ism& i);
void to_json(Json& j, const Critique& c);
void from_json(const Json& j, Critique& c);

class KnowledgeBase {
public:
    /// Builds the entry `ingest` would append (id and generation assigned). Throws
    /// SyntheticWithoutSource or InvalidArgument.
    KnowledgeEntry draft_entry(std::string term, std::string definition, Category category, Origin origin,
                               std::vector<std::string> sources, Tick tick) const;

    /// Appends a drafted entry after re-checking its id and generation.
    const KnowledgeEntry& add(KnowledgeEntry entry);

    const KnowledgeEntry& ingest(std::string term, std::string definition, Category category, Origin origin,
                                 std::vector<std::string> sources, Tick tick) {
        return add(draft_entry(std::move(term), std::move(definition), category, origin, std::move(sources), tick));
    }

    /// Top-n entries by term-frequency cosine between query tokens and entry (term + definition)
    /// tokens, stopwords removed; zero-similarity entries are omitted; ties by older tick, then id.
    std::vector<KnowledgeEntry> kb_retrieve(std::string_view query, std::size_t n) const;

    /// (# synthetic entries with created_tick <= t) / (# entries with created_tick <= t); 0 if none.
    double synthetic_ratio(Tick up_to) const;

    const KnowledgeEntry* find(std::string_view entry_id) const;
    const std::vector<KnowledgeEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Matcher over entry terms in entry order.
    const PhraseMatcher& matcher() const { return matcher_; }

private:
    int generation_for(Origin origin, const std::vector<std::string>& sources) const;
    std::string next_entry_id() const;

    std::vector<KnowledgeEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> terms_;
    PhraseMatcher matcher_;
};

/// Reads a KB seed file (one {term, definition, category} object per line) into human entries at tick 0.
std::vector<KnowledgeEntry> read_kb_seed(const std::string& path);

/// Longest-match, left-to-right, case-insensitive scan of `text` against KB terms with
/// trailing-'s' stemming; units in match order, deduplicated by label. Requires a non-empty KB.
std::vector<ConceptUnit> decompose(std::string_view text, const KnowledgeBase& kb);

struct RecombineStrategy {
    enum class Mode { exhaustive, sample } mode = Mode::exhaustive;
    std::uint64_t seed = 0;
    std::size_t m = 0;

    static RecombineStrategy exhaustive() { return {}; }
    static RecombineStrategy sample(std::uint64_t seed, std::size_t m) { return {Mode::sample, seed, m}; }
};

/// n choose r; throws InvalidArgument when the value does not fit in 62 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

/// Combination of rank `rank` in the lexicographic enumeration of r-subsets of {0..n-1}.
std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t r, std::uint64_t rank);

/// Partial Fisher-Yates over [0, population): for i < m, j = i + (x_i mod (population - i)),
/// swap(i, j), where x_i are successive xorshift64* outputs seeded with splitmix64(seed).
std::vector<std::uint64_t> sample_indices(std::uint64_t population, std::size_t m, std::uint64_t seed);

/// Units sorted by label; exhaustive returns all C(|units|, r) combinations in lexicographic
/// order, sample returns min(m, C) distinct ones drawn from that enumeration.
std::vector<std::vector<ConceptUnit>> recombine(std::vector<ConceptUnit> units, std::size_t r,
                                                const RecombineStrategy& strategy);

/// ", "-joined: lowercased name, unit labels, up to 5 description keywords; segments deduplicated.
std::string to_image_prompt(const Ism& ism);

/// Ism ids, critique ids and assignments.
class IsmRegistry {
public:
    std::string next_ism_id(Tick tick) const;
    std::string next_critique_id(Tick tick) const;

    const Ism& add_ism(Ism ism);
    const Critique& add_critique(Critique critique);
    void mark_fed_back(const std::string& critique_id, const std::string& entry_id);
    void assign(const std::string& ism_id, const std::string& agent_id);

    const Ism* find_ism(std::string_view ism_id) const;
    const Critique* find_critique(std::string_view critique_id) const;
    const std::vector<Ism>& isms() const { return isms_; }
    const std::vector<Critique>& critiques() const { return critiques_; }

private:
    Ism& ism_mut(const std::string& ism_id);

    std::vector<Ism> isms_;
    std::vector<Critique> critiques_;
    std::unordered_map<std::string, std::size_t> ism_index_;
    std::unordered_map<std::string, std::size_t> critique_index_;
};

/// Names and describes a combination through the gateway (ism_naming / ism_description).
Ism coin_ism(const std::vector<ConceptUnit>& combination, Tick tick, std::string ism_id, const gateway::Gateway& gw,
             std::uint64_t seed);

/// Critique over the ism's name, description, unit glosses and kb_retrieve(name, 3) excerpts.
Critique generate_critique(const Ism& ism, const KnowledgeBase& kb, Tick tick, std::string critique_id,
                           const gateway::Gateway& gw, std::uint64_t seed);

/// Synthetic synthetic_critique entry for a critique. Throws AlreadyFedBack / UnknownCritique / UnknownIsm.
KnowledgeEntry feedback_to_kb(const std::string& critique_id, const IsmRegistry& registry, const KnowledgeBase& kb,
                              Tick tick);

struct TimelineItem {
    Tick tick = 0;
    std::string kind;  // "critique" | "ism" | "kb_entry"
    std::string id;
    Json payload;
};

/// Every ism, critique and KB entry with created_tick in [from, to], ordered by (tick, kind, id).
std::vector<TimelineItem> timeline_query(const KnowledgeBase& kb, const IsmRegistry& registry, Tick from, Tick to);

/// Outbound record for an image-generation adapter.
Json image_request_record(const Ism& ism);

/// Stub image adapter: returns a descriptor carrying only the prompt digest.
Json stub_image_descriptor(const Ism& ism);

}  // namespace artism::ismism

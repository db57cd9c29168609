#include "artism/ismism.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "artism/error.hpp"
#include "artism/gateway.hpp"
#include "artism/rng.hpp"
#include "artism/text.hpp"

namespace artism::ismism {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::terminology: return "terminology";
        case Category::style: return "style";
        case Category::gene: return "gene";
        case Category::movement: return "movement";
        case Category::literature_excerpt: return "literature_excerpt";
        case Category::synthetic_critique: return "synthetic_critique";
    }
    return "terminology";
}

std::string_view to_string(Origin o) { return o == Origin::human ? "human" : "synthetic"; }

Category category_from(std::string_view s) {
    for (auto c : {Category::terminology, Category::style, Category::gene, Category::movement, Category::literature_excerpt,
                   Category::synthetic_critique})
        if (to_string(c) == s) return c;
    fail(ErrorCode::InvalidArgument, "unknown KB category " + std::string(s));
}

Origin origin_from(std::string_view s) {
    if (s == "human") return Origin::human;
    if (s == "synthetic") return Origin::synthetic;
    fail(ErrorCode::InvalidArgument, "unknown KB origin " + std::string(s));
}

void to_json(Json& j, const KnowledgeEntry& e) {
    j = Json{{"entry_id", e.entry_id},       {"term", e.term},
             {"definition", e.definition},   {"category", to_string(e.category)},
             {"origin", to_string(e.origin)}, {"generation", e.generation},
             {"source_refs", e.source_refs}, {"created_tick", e.created_tick},
             {"duplicate", e.duplicate}};
}

void from_json(const Json& j, KnowledgeEntry& e) {
    j.at("entry_id").get_to(e.entry_id);
    j.at("term").get_to(e.term);
    j.at("definition").get_to(e.definition);
    e.category = category_from(j.at("category").get<std::string>());
    e.origin = origin_from(j.at("origin").get<std::string>());
    j.at("generation").get_to(e.generation);
    j.at("source_refs").get_to(e.source_refs);
    j.at("created_tick").get_to(e.created_tick);
    e.duplicate = j.value("duplicate", false);
}

void to_json(Json& j, const ConceptUnit& u) {
    j = Json{{"unit_id", u.unit_id}, {"label", u.label}, {"gloss", u.gloss}, {"origin_entry", u.origin_entry}};
}

void from_json(const Json& j, ConceptUnit& u) {
    j.at("unit_id").get_to(u.unit_id);
    j.at("label").get_to(u.label);
    j.at("gloss").get_to(u.gloss);
    j.at("origin_entry").get_to(u.origin_entry);
}

void to_json(Json& j, const Ism& i) {
    j = Json{{"ism_id", i.ism_id}, {"name", i.name}, {"description", i.description}, {"units", i.units},
             {"image_prompt", i.image_prompt}, {"critiques", i.critiques}, {"created_tick", i.created_tick}};
    j["assigned_agent"] = i.assigned_agent ? Json(*i.assigned_agent) : Json(nullptr);
}

void from_json(const Json& j, Ism& i) {
    j.at("ism_id").get_to(i.ism_id);
    j.at("name").get_to(i.name);
    j.at("description").get_to(i.description);
    j.at("units").get_to(i.units);
    j.at("image_prompt").get_to(i.image_prompt);
    j.at("critiques").get_to(i.critiques);
    j.at("created_tick").get_to(i.created_tick);
    i.assigned_agent = j.at("assigned_agent").is_null() ? std::nullopt : std::optional(j.at("assigned_agent").get<std::string>());
}

void to_json(Json& j, const Critique& c) {
    j = Json{{"critique_id", c.critique_id}, {"ism_id", c.ism_id}, {"text", c.text}, {"created_tick", c.created_tick}};
    j["fed_back_entry"] = c.fed_back_entry ? Json(*c.fed_back_entry) : Json(nullptr);
}

void from_json(const Json& j, Critique& c) {
    j.at("critique_id").get_to(c.critique_id);
    j.at("ism_id").get_to(c.ism_id);
    j.at("text").get_to(c.text);
    j.at("created_tick").get_to(c.created_tick);
    c.fed_back_entry = j.at("fed_back_entry").is_null() ? std::nullopt : std::optional(j.at("fed_back_entry").get<std::string>());
}

// ---------------------------------------------------------------------------
// Knowledge base

namespace {

std::string one_line_gloss(const std::string& definition) {
    auto g = text::first_sentences(text::collapse_whitespace(definition), 1);
    if (g.size() > 160) {
        g.resize(160);
        while (!g.empty() && (static_cast<unsigned char>(g.back()) & 0xC0) == 0x80) g.pop_back();
        if (!g.empty()) g.pop_back();
        g += "...";
    }
    return g;
}

std::map<std::string, int> term_frequencies(std::string_view s) {
    std::map<std::string, int> tf;
    for (auto& t : text::alnum_tokens(s))
        if (!text::is_stopword(t)) ++tf[t];
    return tf;
}

bool id_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace

std::string KnowledgeBase::next_entry_id() const {
    std::string n = std::to_string(entries_.size() + 1);
    return "kb-" + std::string(n.size() < 6 ? 6 - n.size() : 0, '0') + n;
}

int KnowledgeBase::generation_for(Origin origin, const std::vector<std::string>& sources) const {
    if (origin == Origin::human) return 0;
    if (sources.empty()) fail(ErrorCode::SyntheticWithoutSource, "synthetic entry must cite a source");
    int max_gen = 0;
    for (const auto& s : sources) {
        if (const auto* e = find(s)) max_gen = std::max(max_gen, e->generation);
        else require(text::starts_with(s, "ism-"), "unknown KB source " + s);
    }
    return 1 + max_gen;
}

KnowledgeEntry KnowledgeBase::draft_entry(std::string term, std::string definition, Category category, Origin origin,
                                          std::vector<std::string> sources, Tick tick) const {
    term = text::collapse_whitespace(term);
    require(!term.empty(), "KB term must be non-empty");
    require(tick >= 0, "KB tick must be non-negative");
    KnowledgeEntry e;
    e.entry_id = next_entry_id();
    e.generation = generation_for(origin, sources);
    e.term = std::move(term);
    e.definition = text::collapse_whitespace(definition);
    e.category = category;
    e.origin = origin;
    e.source_refs = std::move(sources);
    e.created_tick = tick;
    const auto key = text::stem_phrase(e.term);
    e.duplicate = std::any_of(entries_.begin(), entries_.end(), [&](const KnowledgeEntry& other) {
        return other.category == e.category && text::stem_phrase(other.term) == key;
    });
    return e;
}

const KnowledgeEntry& KnowledgeBase::add(KnowledgeEntry entry) {
    require(entry.entry_id == next_entry_id(), "KB entry id out of sequence: " + entry.entry_id);
    require(entry.generation == generation_for(entry.origin, entry.source_refs),
            "KB entry generation inconsistent with its sources: " + entry.entry_id);
    require(entries_.empty() || entry.created_tick >= entries_.back().created_tick, "KB entries must be chronological");
    index_.emplace(entry.entry_id, entries_.size());
    terms_.push_back(entry.term);
    entries_.push_back(std::move(entry));
    matcher_ = PhraseMatcher(terms_);
    return entries_.back();
}

const KnowledgeEntry* KnowledgeBase::find(std::string_view entry_id) const {
    auto it = index_.find(std::string(entry_id));
    return it == index_.end() ? nullptr : &entries_[it->second];
}

std::vector<KnowledgeEntry> KnowledgeBase::kb_retrieve(std::string_view query, std::size_t n) const {
    require(n > 0, "kb_retrieve: n must be positive");
    const auto q = term_frequencies(query);
    if (q.empty()) return {};
    long long qq = 0;
    for (const auto& [_, c] : q) qq += static_cast<long long>(c) * c;

    struct Scored {
        double sim;
        const KnowledgeEntry* e;
    };
    std::vector<Scored> scored;
    for (const auto& e : entries_) {
        const auto tf = term_frequencies(e.term + " " + e.definition);
        long long dot = 0, ee = 0;
        for (const auto& [tok, c] : tf) {
            ee += static_cast<long long>(c) * c;
            if (auto it = q.find(tok); it != q.end()) dot += static_cast<long long>(c) * it->second;
        }
        if (dot == 0) continue;
        const double sim = static_cast<double>(dot) / (std::sqrt(static_cast<double>(qq)) * std::sqrt(static_cast<double>(ee)));
        scored.push_back({sim, &e});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        if (a.e->created_tick != b.e->created_tick) return a.e->created_tick < b.e->created_tick;
        return a.e->entry_id < b.e->entry_id;
    });
    std::vector<KnowledgeEntry> out;
    for (std::size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(*scored[i].e);
    return out;
}

double KnowledgeBase::synthetic_ratio(Tick up_to) const {
    std::size_t total = 0, synthetic = 0;
    for (const auto& e : entries_) {
        if (e.created_tick > up_to) continue;
        ++total;
        if (e.origin == Origin::synthetic) ++synthetic;
    }
    return total == 0 ? 0.0 : static_cast<double>(synthetic) / static_cast<double>(total);
}

std::vector<KnowledgeEntry> read_kb_seed(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileUnreadable, path);
    KnowledgeBase scratch;
    std::vector<KnowledgeEntry> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (text::trim(line).empty()) continue;
        try {
            const auto j = Json::parse(line);
            auto e = scratch.draft_entry(j.at("term").get<std::string>(), j.at("definition").get<std::string>(),
                                         category_from(j.at("category").get<std::string>()), Origin::human, {}, 0);
            require(e.category != Category::synthetic_critique, "seed entries cannot be synthetic critiques");
            out.push_back(scratch.add(std::move(e)));
        } catch (const Json::exception& e) {
            fail(ErrorCode::MalformedRecord, path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            fail(ErrorCode::MalformedRecord, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition and recombination

std::vector<ConceptUnit> decompose(std::string_view text_in, const KnowledgeBase& kb) {
    require(kb.size() > 0, "decompose needs a non-empty lexicon");
    std::vector<ConceptUnit> out;
    std::unordered_set<std::string> labels;
    for (auto idx : kb.matcher().match(text_in)) {
        const auto& e = kb.entries()[idx];
        auto label = text::stem_phrase(e.term);
        if (!labels.insert(label).second) continue;
        out.push_back({"u-" + e.entry_id, std::move(label), one_line_gloss(e.definition), e.entry_id});
    }
    return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        require(acc < (static_cast<unsigned __int128>(1) << 62), "binomial coefficient too large");
    }
    return static_cast<std::uint64_t>(acc);
}

std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t r, std::uint64_t rank) {
    require(rank < binomial(n, r), "combination rank out of range");
    std::vector<std::size_t> out;
    std::size_t next = 0;
    for (std::size_t slot = 0; slot < r; ++slot) {
        // Choose the smallest element whose block of completions contains `rank`.
        for (std::size_t candidate = next;; ++candidate) {
            const auto block = binomial(n - candidate - 1, r - slot - 1);
            if (rank < block) {
                out.push_back(candidate);
                next = candidate + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

std::vector<std::uint64_t> sample_indices(std::uint64_t population, std::size_t m, std::uint64_t seed) {
    m = static_cast<std::size_t>(std::min<std::uint64_t>(m, population));
    XorShift64Star rng(splitmix64(seed));
    // Sparse Fisher-Yates: only touched positions are stored.
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    auto at = [&](std::uint64_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::uint64_t> out;
    out.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t j = i + rng.below(population - i);
        const auto vi = at(i), vj = at(j);
        swapped[i] = vj;
        swapped[j] = vi;
        out.push_back(vj);
    }
    return out;
}

std::vector<std::vector<ConceptUnit>> recombine(std::vector<ConceptUnit> units, std::size_t r,
                                                const RecombineStrategy& strategy) {
    require(r >= 2, "arity must be at least 2");
    if (r > units.size()) fail(ErrorCode::ArityTooLarge, std::to_string(r) + " > " + std::to_string(units.size()));
    std::sort(units.begin(), units.end(), [](const ConceptUnit& a, const ConceptUnit& b) { return a.label < b.label; });
    for (std::size_t i = 1; i < units.size(); ++i) require(units[i].label != units[i - 1].label, "units must be distinct");

    const auto total = binomial(units.size(), r);
    auto materialize = [&](std::uint64_t rank) {
        std::vector<ConceptUnit> combo;
        for (auto idx : unrank_combination(units.size(), r, rank)) combo.push_back(units[idx]);
        return combo;
    };
    std::vector<std::vector<ConceptUnit>> out;
    if (strategy.mode == RecombineStrategy::Mode::exhaustive) {
        out.reserve(static_cast<std::size_t>(total));
        // Iterative lexicographic successor.
        std::vector<std::size_t> idx(r);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            std::vector<ConceptUnit> combo;
            for (auto i : idx) combo.push_back(units[i]);
            out.push_back(std::move(combo));
            std::size_t k = r;
            while (k > 0 && idx[k - 1] == units.size() - r + (k - 1)) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t t = k; t < r; ++t) idx[t] = idx[t - 1] + 1;
        }
        return out;
    }
    for (auto rank : sample_indices(total, strategy.m, strategy.seed)) out.push_back(materialize(rank));
    return out;
}

std::string to_image_prompt(const Ism& ism) {
    require(!ism.name.empty() && !ism.units.empty(), "image prompt needs a name and units");
    std::vector<std::string> segments;
    segments.push_back(text::to_lower(text::collapse_whitespace(ism.name)));
    for (const auto& u : ism.units) segments.push_back(text::collapse_whitespace(u.label));
    for (auto& k : text::keywords(ism.description, 5)) segments.push_back(std::move(k));

    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& s : segments)
        if (!s.empty() && seen.insert(s).second) out.push_back(std::move(s));
    return text::join(out, ", ");
}

// ---------------------------------------------------------------------------
// Registry

std::string IsmRegistry::next_ism_id(Tick tick) const {
    const auto n = std::count_if(isms_.begin(), isms_.end(), [&](const Ism& i) { return i.created_tick == tick; });
    return "ism-" + std::to_string(tick) + "-" + std::to_string(n);
}

std::string IsmRegistry::next_critique_id(Tick tick) const {
    const auto n = std::count_if(critiques_.begin(), critiques_.end(), [&](const Critique& c) { return c.created_tick == tick; });
    return "c-" + std::to_string(tick) + "-" + std::to_string(n);
}

const Ism& IsmRegistry::add_ism(Ism ism) {
    require(ism.ism_id == next_ism_id(ism.created_tick), "ism id out of sequence: " + ism.ism_id);
    require(!ism.name.empty(), "ism name must be non-empty");
    require(ism.units.size() >= 2, "ism needs at least two units");
    require(ism.image_prompt == to_image_prompt(ism), "image prompt does not follow the join rule");
    require(isms_.empty() || ism.created_tick >= isms_.back().created_tick, "isms must be chronological");
    ism_index_.emplace(ism.ism_id, isms_.size());
    isms_.push_back(std::move(ism));
    return isms_.back();
}

const Critique& IsmRegistry::add_critique(Critique critique) {
    require(critique.critique_id == next_critique_id(critique.created_tick), "critique id out of sequence");
    require(!critique.fed_back_entry, "new critiques cannot already be fed back");
    auto& ism = ism_mut(critique.ism_id);
    ism.critiques.push_back(critique.critique_id);
    critique_index_.emplace(critique.critique_id, critiques_.size());
    critiques_.push_back(std::move(critique));
    return critiques_.back();
}

void IsmRegistry::mark_fed_back(const std::string& critique_id, const std::string& entry_id) {
    auto it = critique_index_.find(critique_id);
    if (it == critique_index_.end()) fail(ErrorCode::UnknownCritique, critique_id);
    auto& c = critiques_[it->second];
    if (c.fed_back_entry) fail(ErrorCode::AlreadyFedBack, critique_id);
    c.fed_back_entry = entry_id;
}

void IsmRegistry::assign(const std::string& ism_id, const std::string& agent_id) { ism_mut(ism_id).assigned_agent = agent_id; }

Ism& IsmRegistry::ism_mut(const std::string& ism_id) {
    auto it = ism_index_.find(ism_id);
    if (it == ism_index_.end()) fail(ErrorCode::UnknownIsm, ism_id);
    return isms_[it->second];
}

const Ism* IsmRegistry::find_ism(std::string_view ism_id) const {
    auto it = ism_index_.find(std::string(ism_id));
    return it == ism_index_.end() ? nullptr : &isms_[it->second];
}

const Critique* IsmRegistry::find_critique(std::string_view critique_id) const {
    auto it = critique_index_.find(std::string(critique_id));
    return it == critique_index_.end() ? nullptr : &critiques_[it->second];
}

// ---------------------------------------------------------------------------
// Generative steps

namespace {

std::string units_binding(const std::vector<ConceptUnit>& units) {
    std::vector<std::string> labels;
    for (const auto& u : units) labels.push_back(u.label);
    return text::join(labels, " | ");
}

}  // namespace

Ism coin_ism(const std::vector<ConceptUnit>& combination, Tick tick, std::string ism_id, const gateway::Gateway& gw,
             std::uint64_t seed) {
    require(combination.size() >= 2, "coin_ism needs at least two units");
    Ism ism;
    ism.ism_id = std::move(ism_id);
    ism.units = combination;
    ism.created_tick = tick;

    gateway::CompletionRequest naming{"ism_naming", {{"units", units_binding(combination)}}, mix_seed(seed, 1), 256, {}, {}};
    ism.name = text::trim(text::first_sentences(gw.complete(naming).text, 1));
    if (auto nl = ism.name.find('\n'); nl != std::string::npos) ism.name = text::trim(ism.name.substr(0, nl));
    require(!ism.name.empty(), "ism naming returned an empty name");

    gateway::CompletionRequest describe{"ism_description",
                                        {{"name", ism.name}, {"units", units_binding(combination)}},
                                        mix_seed(seed, 2), 1024, {}, {}};
    ism.description = text::collapse_whitespace(gw.complete(describe).text);
    ism.image_prompt = to_image_prompt(ism);
    return ism;
}

Critique generate_critique(const Ism& ism, const KnowledgeBase& kb, Tick tick, std::string critique_id,
                           const gateway::Gateway& gw, std::uint64_t seed) {
    std::vector<std::string> glosses, excerpts;
    for (const auto& u : ism.units) glosses.push_back(u.label + ": " + u.gloss);
    for (const auto& e : kb.kb_retrieve(ism.name, 3)) excerpts.push_back(e.term + ": " + one_line_gloss(e.definition));
    gateway::CompletionRequest req{"critique",
                                   {{"name", ism.name},
                                    {"description", ism.description},
                                    {"units", units_binding(ism.units)},
                                    {"glosses", text::join(glosses, "\n")},
                                    {"excerpts", text::join(excerpts, "\n")}},
                                   mix_seed(seed, 3),
                                   4096,
                                   {},
                                   {}};
    Critique c;
    c.critique_id = std::move(critique_id);
    c.ism_id = ism.ism_id;
    c.text = text::collapse_whitespace(gw.complete(req).text);
    c.created_tick = tick;
    return c;
}

KnowledgeEntry feedback_to_kb(const std::string& critique_id, const IsmRegistry& registry, const KnowledgeBase& kb,
                              Tick tick) {
    const auto* c = registry.find_critique(critique_id);
    if (!c) fail(ErrorCode::UnknownCritique, critique_id);
    if (c->fed_back_entry) fail(ErrorCode::AlreadyFedBack, critique_id);
    const auto* ism = registry.find_ism(c->ism_id);
    if (!ism) fail(ErrorCode::UnknownIsm, c->ism_id);
    std::vector<std::string> sources;
    for (const auto& u : ism->units)
        if (std::find(sources.begin(), sources.end(), u.origin_entry) == sources.end()) sources.push_back(u.origin_entry);
    sources.push_back(ism->ism_id);
    return kb.draft_entry(ism->name, c->text, Category::synthetic_critique, Origin::synthetic, std::move(sources), tick);
}

std::vector<TimelineItem> timeline_query(const KnowledgeBase& kb, const IsmRegistry& registry, Tick from, Tick to) {
    require(from <= to, "timeline range must satisfy from <= to");
    std::vector<TimelineItem> out;
    for (const auto& i : registry.isms())
        if (i.created_tick >= from && i.created_tick <= to) out.push_back({i.created_tick, "ism", i.ism_id, Json(i)});
    for (const auto& c : registry.critiques())
        if (c.created_tick >= from && c.created_tick <= to) out.push_back({c.created_tick, "critique", c.critique_id, Json(c)});
    for (const auto& e : kb.entries())
        if (e.created_tick >= from && e.created_tick <= to) out.push_back({e.created_tick, "kb_entry", e.entry_id, Json(e)});
    std::sort(out.begin(), out.end(), [](const TimelineItem& a, const TimelineItem& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        if (a.kind != b.kind) return a.kind < b.kind;
        return id_less(a.id, b.id);
    });
    return out;
}

Json image_request_record(const Ism& ism) { return Json{{"ism_id", ism.ism_id}, {"image_prompt", ism.image_prompt}}; }

Json stub_image_descriptor(const Ism& ism) {
    return Json{{"ism_id", ism.ism_id}, {"prompt_digest", sha256_hex(ism.image_prompt)}, {"adapter", "stub"}};
}

}  // namespace artism::ismism

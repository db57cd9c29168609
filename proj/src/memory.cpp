#include "artism/memory.hpp"

#include <algorithm>
#include <cmath>

#include "artism/error.hpp"
#include "artism/text.hpp"

namespace artism::memory {

std::string_view to_string(MemoryKind kind) {
    switch (kind) {
        case MemoryKind::observation: return "observation";
        case MemoryKind::reflection: return "reflection";
        case MemoryKind::action: return "action";
        case MemoryKind::dialogue: return "dialogue";
        case MemoryKind::ism_assignment: return "ism_assignment";
    }
    return "observation";
}

MemoryKind memory_kind_from(std::string_view s) {
    for (auto k : {MemoryKind::observation, MemoryKind::reflection, MemoryKind::action, MemoryKind::dialogue,
                   MemoryKind::ism_assignment})
        if (to_string(k) == s) return k;
    fail(ErrorCode::InvalidArgument, "unknown memory kind: " + std::string(s));
}

void to_json(Json& j, const MemoryRecord& m) {
    j = Json{{"memory_id", m.memory_id}, {"agent_id", m.agent_id},     {"tick", m.tick},
             {"kind", to_string(m.kind)}, {"content", m.content},       {"importance", m.importance},
             {"salience", m.salience},   {"source_refs", m.source_refs}};
}

void from_json(const Json& j, MemoryRecord& m) {
    j.at("memory_id").get_to(m.memory_id);
    j.at("agent_id").get_to(m.agent_id);
    j.at("tick").get_to(m.tick);
    m.kind = memory_kind_from(j.at("kind").get<std::string>());
    j.at("content").get_to(m.content);
    j.at("importance").get_to(m.importance);
    j.at("salience").get_to(m.salience);
    j.at("source_refs").get_to(m.source_refs);
}

void RetrievalWeights::validate() const {
    const bool finite = std::isfinite(w_recency) && std::isfinite(w_importance) && std::isfinite(w_salience);
    require(finite && w_recency >= 0 && w_importance >= 0 && w_salience >= 0, "retrieval weights must be non-negative");
    require(w_recency + w_importance + w_salience > 0, "retrieval weights must not all be zero");
    require(half_life > 0, "half_life must be positive");
}

double recency_score(Tick now, Tick then, std::int64_t half_life) {
    require(now >= then, "recency_score: now precedes memory tick");
    require(half_life > 0, "recency_score: half_life must be positive");
    return std::pow(0.5, static_cast<double>(now - then) / static_cast<double>(half_life));
}

double score_memory(const MemoryRecord& m, Tick now, const RetrievalWeights& w) {
    const double total = w.w_recency + w.w_importance + w.w_salience;
    const double r = recency_score(now, m.tick, w.half_life);
    return (w.w_recency * r + w.w_importance * m.importance + w.w_salience * m.salience) / total;
}

bool ranks_before(const RankedMemory& a, const RankedMemory& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.record->tick != b.record->tick) return a.record->tick > b.record->tick;
    return a.record->memory_id > b.record->memory_id;
}

Scores HeuristicScorer::score(std::string_view content) const {
    const double matched = static_cast<double>(terms_->count_distinct(content));
    return {std::min(1.0, matched / 5.0), text::affect_ratio(content)};
}

std::optional<Tick> MemoryStream::last_tick() const {
    if (records_.empty()) return std::nullopt;
    return records_.back().tick;
}

MemoryRecord MemoryStream::draft(Tick tick, MemoryKind kind, std::string content, std::vector<std::string> source_refs,
                                 Scores scores, std::size_t pending) const {
    require(tick >= 0, "memory tick must be non-negative");
    if (auto last = last_tick(); last && tick < *last)
        fail(ErrorCode::TickRegression, agent_id_ + ": tick " + std::to_string(tick) + " < " + std::to_string(*last));
    const std::size_t seq = (last_tick() == tick ? count_at_last_tick_ : 0) + pending;
    MemoryRecord r;
    r.memory_id = "m-" + std::to_string(tick) + "-" + std::to_string(seq);
    r.agent_id = agent_id_;
    r.tick = tick;
    r.kind = kind;
    r.content = std::move(content);
    r.importance = std::clamp(scores.importance, 0.0, 1.0);
    r.salience = std::clamp(scores.salience, 0.0, 1.0);
    r.source_refs = std::move(source_refs);
    return r;
}

const MemoryRecord& MemoryStream::append(MemoryRecord record) {
    require(record.agent_id == agent_id_, "memory belongs to another agent");
    require(record.importance >= 0 && record.importance <= 1 && record.salience >= 0 && record.salience <= 1,
            "importance and salience must lie in [0,1]");
    const auto expected = draft(record.tick, record.kind, {}, {}, {}).memory_id;
    require(record.memory_id == expected, "memory id " + record.memory_id + " out of sequence (expected " + expected + ")");
    if (last_tick() == record.tick) ++count_at_last_tick_;
    else count_at_last_tick_ = 1;
    records_.push_back(std::move(record));
    return records_.back();
}

std::vector<MemoryRecord> MemoryStream::retrieve_top_k(Tick now, std::size_t k, const RetrievalWeights& w,
                                                       const MemoryRecord* extra) const {
    w.validate();
    require(k > 0, "k must be positive");
    std::vector<RankedMemory> ranked;
    ranked.reserve(records_.size() + 1);
    for (const auto& r : records_) ranked.push_back({score_memory(r, now, w), &r});
    if (extra) ranked.push_back({score_memory(*extra, now, w), extra});
    const auto take = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(), ranks_before);
    std::vector<MemoryRecord> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(*ranked[i].record);
    return out;
}

double MemoryStream::importance_since_reflection() const {
    double sum = 0.0;
    for (std::size_t i = reflect_cursor_; i < records_.size(); ++i) sum += records_[i].importance;
    return sum;
}

void MemoryStore::add_agent(const std::string& agent_id) {
    require(!has_agent(agent_id), "agent already has a memory stream: " + agent_id);
    streams_.emplace(agent_id, MemoryStream(agent_id));
}

const MemoryStream& MemoryStore::stream(const std::string& agent_id) const {
    auto it = streams_.find(agent_id);
    if (it == streams_.end()) fail(ErrorCode::UnknownAgent, agent_id);
    return it->second;
}

MemoryStream& MemoryStore::stream(const std::string& agent_id) {
    auto it = streams_.find(agent_id);
    if (it == streams_.end()) fail(ErrorCode::UnknownAgent, agent_id);
    return it->second;
}

const MemoryRecord& MemoryStore::append_memory(const std::string& agent_id, Tick tick, MemoryKind kind,
                                               std::string content, std::vector<std::string> source_refs,
                                               const MemoryScorer& scorer) {
    auto& s = stream(agent_id);
    const auto scores = scorer.score(content);
    return s.append(s.draft(tick, kind, std::move(content), std::move(source_refs), scores));
}

std::vector<MemoryRecord> MemoryStore::retrieve_top_k(const std::string& agent_id, Tick now, std::size_t k,
                                                      const RetrievalWeights& w) const {
    return stream(agent_id).retrieve_top_k(now, k, w);
}

bool MemoryStore::should_reflect(const std::string& agent_id, double threshold) const {
    return stream(agent_id).should_reflect(threshold);
}

}  // namespace artism::memory

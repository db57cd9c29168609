#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artism/canonical.hpp"
#include "artism/lexicon.hpp"

namespace artism::memory {

using Tick = std::int64_t;

enum class MemoryKind { observation, reflection, action, dialogue, ism_assignment };

std::string_view to_string(MemoryKind kind);
MemoryKind memory_kind_from(std::string_view s);

struct MemoryRecord {
    std::string memory_id;
    std::string agent_id;
    Tick tick = 0;
    MemoryKind kind = MemoryKind::observation;
    std::string content;
    double importance = 0.0;
    double salience = 0.0;
    std::vector<std::string> source_refs;

    bool operator==(const MemoryRecord&) const = default;
};

void to_json(Json& j, const MemoryRecord& m);
void from_json(const Json& j, MemoryRecord& m);

struct RetrievalWeights {
    double w_recency = 1.0;
    double w_importance = 1.0;
    double w_salience = 1.0;
    std::int64_t half_life = 16;

    /// Throws InvalidArgument unless weights are non-negative with a positive sum and half_life > 0.
    void validate() const;
};

/// 0.5^((now - then) / half_life).
double recency_score(Tick now, Tick then, std::int64_t half_life);

/// Weighted mean of recency, importance and salience.
double score_memory(const MemoryRecord& m, Tick now, const RetrievalWeights& w);

/// Strict ordering used by retrieval: score desc, then tick desc, then memory_id desc.
struct RankedMemory {
    double score;
    const MemoryRecord* record;
};
bool ranks_before(const RankedMemory& a, const RankedMemory& b);

struct Scores {
    double importance = 0.0;
    double salience = 0.0;
};

/// Write-time importance/salience scoring.
class MemoryScorer {
public:
    virtual ~MemoryScorer() = default;
    virtual Scores score(std::string_view content) const = 0;
};

/// importance = min(1, distinct knowledge terms matched / 5); salience = affect-lexicon hit ratio.
class HeuristicScorer final : public MemoryScorer {
public:
    explicit HeuristicScorer(const PhraseMatcher& knowledge_terms) : terms_(&knowledge_terms) {}
    HeuristicScorer(PhraseMatcher&&) = delete;
    Scores score(std::string_view content) const override;

private:
    const PhraseMatcher* terms_;
};

/// Append-only memory of one agent.
class MemoryStream {
public:
    MemoryStream() = default;
    explicit MemoryStream(std::string agent_id) : agent_id_(std::move(agent_id)) {}

    const std::string& agent_id() const { return agent_id_; }
    const std::vector<MemoryRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    std::optional<Tick> last_tick() const;

    /// Builds (without appending) the record that would be appended next. `pending`
    /// counts records already drafted at the same tick but not yet appended.
    MemoryRecord draft(Tick tick, MemoryKind kind, std::string content, std::vector<std::string> source_refs,
                       Scores scores, std::size_t pending = 0) const;

    /// Appends a drafted record. Throws TickRegression or InvalidArgument.
    const MemoryRecord& append(MemoryRecord record);

    std::vector<MemoryRecord> retrieve_top_k(Tick now, std::size_t k, const RetrievalWeights& w,
                                             const MemoryRecord* extra = nullptr) const;

    double importance_since_reflection() const;
    bool should_reflect(double threshold) const { return importance_since_reflection() >= threshold; }
    void mark_reflection() { reflect_cursor_ = records_.size(); }
    std::size_t reflect_cursor() const { return reflect_cursor_; }
    void set_reflect_cursor(std::size_t c) { reflect_cursor_ = c; }

private:
    std::string agent_id_;
    std::vector<MemoryRecord> records_;
    std::size_t count_at_last_tick_ = 0;
    std::size_t reflect_cursor_ = 0;
};

/// All agents' streams, keyed by agent id.
class MemoryStore {
public:
    void add_agent(const std::string& agent_id);
    bool has_agent(const std::string& agent_id) const { return streams_.count(agent_id) > 0; }
    const MemoryStream& stream(const std::string& agent_id) const;
    MemoryStream& stream(const std::string& agent_id);

    const MemoryRecord& append_memory(const std::string& agent_id, Tick tick, MemoryKind kind, std::string content,
                                      std::vector<std::string> source_refs, const MemoryScorer& scorer);
    std::vector<MemoryRecord> retrieve_top_k(const std::string& agent_id, Tick now, std::size_t k,
                                             const RetrievalWeights& w) const;
    bool should_reflect(const std::string& agent_id, double threshold) const;

    const std::map<std::string, MemoryStream>& streams() const { return streams_; }

private:
    std::map<std::string, MemoryStream> streams_;
};

}  // namespace artism::memory

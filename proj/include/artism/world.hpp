#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "artism/agent.hpp"
#include "artism/canonical.hpp"
#include "artism/events.hpp"
#include "artism/ismism.hpp"
#include "artism/memory.hpp"
#include "artism/social.hpp"

namespace artism {

/// Everything the event log describes. Mutated only through apply().
struct WorldState {
    /// Next tick to execute; equals the number of completed ticks.
    Tick tick = 0;
    std::uint64_t global_seed = 0;
    std::string config_digest;
    /// Number of log entries folded into this state.
    std::uint64_t applied = 0;

    std::map<std::string, agent::AgentState> agents;
    /// Agent ids in corpus order.
    std::vector<std::string> roster;
    memory::MemoryStore memories;
    social::PostStore posts;
    social::DialogueBook dialogues;
    /// (commenter, author) pairs that already produced a follower.
    std::set<std::pair<std::string, std::string>> follow_pairs;
    ismism::KnowledgeBase kb;
    ismism::IsmRegistry isms;

    /// Applies one event. Throws InvalidArgument if the event does not fit the state.
    void apply(const EventLogEntry& e);

    const agent::AgentState& agent(const std::string& id) const;
    std::int64_t followers_of(const std::string& author_id) const;

    Json to_json() const;
    static WorldState from_json(const Json& j);
};

/// Folds a whole log into a fresh state.
WorldState replay(const std::vector<EventLogEntry>& log);

struct SnapshotHeader {
    Tick tick = 0;
    std::string config_digest;
    std::uint64_t log_seq = 0;
};

/// Three lines: canonical header, canonical state, SHA-256 hex of the first two lines (joined by '\n').
std::string snapshot(const WorldState& w);
/// Throws SnapshotCorrupt when the file is truncated or its digest does not match.
WorldState restore(const std::string& snapshot_text, SnapshotHeader* header = nullptr);

void write_snapshot(const std::filesystem::path& path, const WorldState& w);
WorldState read_snapshot(const std::filesystem::path& path, SnapshotHeader* header = nullptr);

}  // namespace artism

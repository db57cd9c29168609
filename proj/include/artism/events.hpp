#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "artism/canonical.hpp"

namespace artism {

using Tick = std::int64_t;

enum class EventKind {
    SimulationStarted,
    AgentRegistered,
    KbEntryAdded,
    Perceived,
    Reflected,
    ReflectFailed,
    Planned,
    Acted,
    ActionFailed,
    PromptAudit,
    PostPublished,
    DialogueTurn,
    DialogueFailed,
    HarvestStarted,
    HarvestSkipped,
    IsmCoined,
    CoinFailed,
    CritiqueGenerated,
    CritiqueFailed,
    FedBack,
    IsmAssigned,
    TickCompleted,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from(std::string_view s);

struct EventLogEntry {
    std::uint64_t seq = 0;
    Tick tick = 0;
    EventKind kind = EventKind::TickCompleted;
    Json payload = Json::object();

    bool operator==(const EventLogEntry& o) const {
        return seq == o.seq && tick == o.tick && kind == o.kind && canonical_dump(payload) == canonical_dump(o.payload);
    }
};

Json to_json(const EventLogEntry& e);
EventLogEntry entry_from_json(const Json& j);

/// One canonical JSON line, no trailing newline.
std::string canonical_line(const EventLogEntry& e);

/// Append-only log with a running SHA-256 over the canonical lines.
class EventLog {
public:
    /// A log may start mid-stream (resumed from a snapshot taken after `first_seq` events).
    explicit EventLog(std::uint64_t first_seq = 0) : first_seq_(first_seq) {}

    /// Assigns seq = size() and appends. Throws InvalidArgument if tick decreases.
    const EventLogEntry& append(Tick tick, EventKind kind, Json payload);
    /// Appends an entry that already carries its seq (replay, file load).
    const EventLogEntry& append_entry(EventLogEntry entry);

    const std::vector<EventLogEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::uint64_t first_seq() const { return first_seq_; }
    std::uint64_t next_seq() const { return first_seq_ + entries_.size(); }

    /// SHA-256 over the concatenated canonical lines, computed incrementally.
    std::string hash_hex() const { return hasher_.hex_digest(); }

    void write_jsonl(const std::filesystem::path& path) const;
    static EventLog read_jsonl(const std::filesystem::path& path);

private:
    std::uint64_t first_seq_ = 0;
    std::vector<EventLogEntry> entries_;
    Sha256 hasher_;
};

/// SHA-256 over the concatenation of canonical serializations of `entries` in order.
std::string canonical_log_hash(const std::vector<EventLogEntry>& entries);

}  // namespace artism

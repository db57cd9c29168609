#include "artism/events.hpp"

#include <array>
#include <fstream>

#include "artism/error.hpp"

namespace artism {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 22> kNames{{
    {EventKind::SimulationStarted, "SimulationStarted"},
    {EventKind::AgentRegistered, "AgentRegistered"},
    {EventKind::KbEntryAdded, "KbEntryAdded"},
    {EventKind::Perceived, "Perceived"},
    {EventKind::Reflected, "Reflected"},
    {EventKind::ReflectFailed, "ReflectFailed"},
    {EventKind::Planned, "Planned"},
    {EventKind::Acted, "Acted"},
    {EventKind::ActionFailed, "ActionFailed"},
    {EventKind::PromptAudit, "PromptAudit"},
    {EventKind::PostPublished, "PostPublished"},
    {EventKind::DialogueTurn, "DialogueTurn"},
    {EventKind::DialogueFailed, "DialogueFailed"},
    {EventKind::HarvestStarted, "HarvestStarted"},
    {EventKind::HarvestSkipped, "HarvestSkipped"},
    {EventKind::IsmCoined, "IsmCoined"},
    {EventKind::CoinFailed, "CoinFailed"},
    {EventKind::CritiqueGenerated, "CritiqueGenerated"},
    {EventKind::CritiqueFailed, "CritiqueFailed"},
    {EventKind::FedBack, "FedBack"},
    {EventKind::IsmAssigned, "IsmAssigned"},
    {EventKind::TickCompleted, "TickCompleted"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "Unknown";
}

EventKind event_kind_from(std::string_view s) {
    for (const auto& [k, name] : kNames)
        if (name == s) return k;
    fail(ErrorCode::MalformedRecord, "unknown event kind " + std::string(s));
}

Json to_json(const EventLogEntry& e) {
    return Json{{"seq", e.seq}, {"tick", e.tick}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

EventLogEntry entry_from_json(const Json& j) {
    EventLogEntry e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.tick = j.at("tick").get<Tick>();
    e.kind = event_kind_from(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    return e;
}

std::string canonical_line(const EventLogEntry& e) { return canonical_dump(to_json(e)); }

const EventLogEntry& EventLog::append(Tick tick, EventKind kind, Json payload) {
    return append_entry(EventLogEntry{next_seq(), tick, kind, std::move(payload)});
}

const EventLogEntry& EventLog::append_entry(EventLogEntry entry) {
    require(entry.seq == next_seq(), "event seq out of order: " + std::to_string(entry.seq));
    require(entries_.empty() || entry.tick >= entries_.back().tick, "event tick regressed at seq " + std::to_string(entry.seq));
    hasher_.update(canonical_line(entry));
    entries_.push_back(std::move(entry));
    return entries_.back();
}

void EventLog::write_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::FileUnreadable, "cannot write " + path.string());
    for (const auto& e : entries_) out << canonical_line(e) << '\n';
    if (!out) fail(ErrorCode::FileUnreadable, "write failed: " + path.string());
}

EventLog EventLog::read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileUnreadable, path.string());
    EventLog log;
    bool first = true;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto entry = entry_from_json(Json::parse(line));
            if (first) log.first_seq_ = entry.seq;
            first = false;
            log.append_entry(std::move(entry));
        } catch (const Json::exception& ex) {
            fail(ErrorCode::MalformedRecord, path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return log;
}

std::string canonical_log_hash(const std::vector<EventLogEntry>& entries) {
    Sha256 h;
    for (const auto& e : entries) h.update(canonical_line(e));
    return h.hex_digest();
}

}  // namespace artism

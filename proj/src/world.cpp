#include "artism/world.hpp"

#include <fstream>
#include <sstream>

#include "artism/error.hpp"

namespace artism {

namespace {

agent::AgentState& agent_mut(WorldState& w, const std::string& id) {
    auto it = w.agents.find(id);
    if (it == w.agents.end()) fail(ErrorCode::UnknownAgent, id);
    return it->second;
}

void append_memory(WorldState& w, const Json& record) {
    auto m = record.get<memory::MemoryRecord>();
    w.memories.stream(m.agent_id).append(std::move(m));
}

}  // namespace

const agent::AgentState& WorldState::agent(const std::string& id) const {
    auto it = agents.find(id);
    if (it == agents.end()) fail(ErrorCode::UnknownAgent, id);
    return it->second;
}

std::int64_t WorldState::followers_of(const std::string& author_id) const {
    auto it = agents.find(author_id);
    return it == agents.end() ? 0 : it->second.followers_count;
}

void WorldState::apply(const EventLogEntry& e) {
    require(e.seq == applied, "event seq " + std::to_string(e.seq) + " applied out of order");
    require(e.tick == tick, "event tick " + std::to_string(e.tick) + " does not match world tick " + std::to_string(tick));
    const auto& p = e.payload;
    switch (e.kind) {
        case EventKind::SimulationStarted:
            require(applied == 0, "SimulationStarted must be the first event");
            global_seed = p.at("global_seed").get<std::uint64_t>();
            config_digest = p.at("config_digest").get<std::string>();
            break;
        case EventKind::AgentRegistered: {
            auto a = p.at("agent").get<agent::AgentState>();
            require(!agents.count(a.id()), "agent registered twice: " + a.id());
            memories.add_agent(a.id());
            roster.push_back(a.id());
            agents.emplace(a.id(), std::move(a));
            break;
        }
        case EventKind::KbEntryAdded:
        case EventKind::FedBack: {
            const auto& entry = kb.add(p.at("entry").get<ismism::KnowledgeEntry>());
            if (e.kind == EventKind::FedBack) isms.mark_fed_back(p.at("critique_id").get<std::string>(), entry.entry_id);
            break;
        }
        case EventKind::Perceived:
            for (const auto& m : p.at("memories")) append_memory(*this, m);
            break;
        case EventKind::Reflected: {
            auto& a = agent_mut(*this, p.at("agent_id").get<std::string>());
            a.private_view = p.at("private_view").get<std::string>();
            a.last_reflection_tick = e.tick;
            append_memory(*this, p.at("memory"));
            memories.stream(a.id()).mark_reflection();
            break;
        }
        case EventKind::Acted:
            append_memory(*this, p.at("memory"));
            break;
        case EventKind::PostPublished: {
            auto post = p.at("post").get<social::PublicPost>();
            if (post.kind == social::PostKind::comment) {
                const auto* target = posts.find(*post.reply_to);
                if (target && target->author_id != post.author_id && agents.count(target->author_id) &&
                    follow_pairs.emplace(post.author_id, target->author_id).second)
                    ++agent_mut(*this, target->author_id).followers_count;
            }
            posts.publish(std::move(post));
            break;
        }
        case EventKind::DialogueTurn: {
            const auto sid = p.at("session_id").get<std::string>();
            if (!dialogues.find(sid)) {
                require(sid == dialogues.next_session_id(), "session id out of sequence: " + sid);
                dialogues.open(sid, p.at("user_name").get<std::string>(), p.at("agent_id").get<std::string>(),
                               p.at("seed").get<std::uint64_t>());
            }
            dialogues.record_exchange(sid, p.at("user_text").get<std::string>(), p.at("reply").get<std::string>(), e.tick);
            append_memory(*this, p.at("memory"));
            break;
        }
        case EventKind::IsmCoined:
            isms.add_ism(p.at("ism").get<ismism::Ism>());
            break;
        case EventKind::CritiqueGenerated:
            isms.add_critique(p.at("critique").get<ismism::Critique>());
            break;
        case EventKind::IsmAssigned: {
            const auto ism_id = p.at("ism_id").get<std::string>();
            auto& a = agent_mut(*this, p.at("agent_id").get<std::string>());
            const auto* ism = isms.find_ism(ism_id);
            if (!ism) fail(ErrorCode::UnknownIsm, ism_id);
            isms.assign(ism_id, a.id());
            a.profile.attributes.push_back(ism->name);
            append_memory(*this, p.at("memory"));
            break;
        }
        case EventKind::TickCompleted:
            tick = e.tick + 1;
            break;
        case EventKind::Planned:
        case EventKind::ReflectFailed:
        case EventKind::ActionFailed:
        case EventKind::PromptAudit:
        case EventKind::DialogueFailed:
        case EventKind::HarvestStarted:
        case EventKind::HarvestSkipped:
        case EventKind::CoinFailed:
        case EventKind::CritiqueFailed:
            break;
    }
    ++applied;
}

Json WorldState::to_json() const {
    Json agents_j = Json::array();
    for (const auto& id : roster) agents_j.push_back(agents.at(id));
    Json streams = Json::object();
    for (const auto& [id, s] : memories.streams())
        streams[id] = Json{{"records", s.records()}, {"reflect_cursor", s.reflect_cursor()}};
    Json sessions = Json::array();
    for (const auto& [_, s] : dialogues.sessions()) sessions.push_back(s);
    Json pairs = Json::array();
    for (const auto& [a, b] : follow_pairs) pairs.push_back({a, b});
    return Json{{"tick", tick},
                {"global_seed", global_seed},
                {"config_digest", config_digest},
                {"applied", applied},
                {"agents", agents_j},
                {"memories", streams},
                {"posts", posts.all()},
                {"dialogues", sessions},
                {"follow_pairs", pairs},
                {"kb", kb.entries()},
                {"isms", isms.isms()},
                {"critiques", isms.critiques()}};
}

WorldState WorldState::from_json(const Json& j) {
    WorldState w;
    w.tick = j.at("tick").get<Tick>();
    w.global_seed = j.at("global_seed").get<std::uint64_t>();
    w.config_digest = j.at("config_digest").get<std::string>();
    w.applied = j.at("applied").get<std::uint64_t>();
    for (const auto& a : j.at("agents")) {
        auto state = a.get<agent::AgentState>();
        w.roster.push_back(state.id());
        w.memories.add_agent(state.id());
        w.agents.emplace(state.id(), std::move(state));
    }
    for (const auto& [id, s] : j.at("memories").items()) {
        auto& stream = w.memories.stream(id);
        for (const auto& r : s.at("records")) stream.append(r.get<memory::MemoryRecord>());
        stream.set_reflect_cursor(s.at("reflect_cursor").get<std::size_t>());
    }
    for (const auto& p : j.at("posts")) w.posts.publish(p.get<social::PublicPost>());
    for (const auto& s : j.at("dialogues")) {
        auto session = s.get<social::DialogueSession>();
        auto& opened = w.dialogues.open(session.session_id, session.user_name, session.agent_id, session.seed);
        opened.transcript = std::move(session.transcript);
    }
    for (const auto& pr : j.at("follow_pairs")) w.follow_pairs.emplace(pr.at(0).get<std::string>(), pr.at(1).get<std::string>());
    for (const auto& e : j.at("kb")) w.kb.add(e.get<ismism::KnowledgeEntry>());
    for (const auto& i : j.at("isms")) {
        auto ism = i.get<ismism::Ism>();
        ism.critiques.clear();
        ism.assigned_agent.reset();
        w.isms.add_ism(std::move(ism));
    }
    for (const auto& c : j.at("critiques")) {
        auto critique = c.get<ismism::Critique>();
        const auto fed = critique.fed_back_entry;
        critique.fed_back_entry.reset();
        const auto id = critique.critique_id;
        w.isms.add_critique(std::move(critique));
        if (fed) w.isms.mark_fed_back(id, *fed);
    }
    for (const auto& i : j.at("isms"))
        if (!i.at("assigned_agent").is_null()) w.isms.assign(i.at("ism_id"), i.at("assigned_agent"));
    return w;
}

WorldState replay(const std::vector<EventLogEntry>& log) {
    WorldState w;
    for (const auto& e : log) w.apply(e);
    return w;
}

std::string snapshot(const WorldState& w) {
    const auto header = canonical_dump(Json{{"tick", w.tick}, {"config_digest", w.config_digest}, {"log_seq", w.applied}});
    const auto body = canonical_dump(w.to_json());
    return header + "\n" + body + "\n" + sha256_hex(header + "\n" + body) + "\n";
}

WorldState restore(const std::string& text, SnapshotHeader* header) {
    std::istringstream in(text);
    std::string head, body, digest;
    if (!std::getline(in, head) || !std::getline(in, body) || !std::getline(in, digest))
        fail(ErrorCode::SnapshotCorrupt, "snapshot truncated");
    if (sha256_hex(head + "\n" + body) != digest) fail(ErrorCode::SnapshotCorrupt, "digest mismatch");
    try {
        const auto h = Json::parse(head);
        auto w = WorldState::from_json(Json::parse(body));
        if (h.at("tick").get<Tick>() != w.tick || h.at("log_seq").get<std::uint64_t>() != w.applied ||
            h.at("config_digest").get<std::string>() != w.config_digest)
            fail(ErrorCode::SnapshotCorrupt, "header does not match state");
        if (header) *header = {w.tick, w.config_digest, w.applied};
        return w;
    } catch (const Json::exception& e) {
        fail(ErrorCode::SnapshotCorrupt, e.what());
    }
}

void write_snapshot(const std::filesystem::path& path, const WorldState& w) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::FileUnreadable, "cannot write " + path.string());
    out << snapshot(w);
}

WorldState read_snapshot(const std::filesystem::path& path, SnapshotHeader* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileUnreadable, path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return restore(ss.str(), header);
}

}  // namespace artism

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "artism/agent.hpp"
#include "artism/config.hpp"
#include "artism/events.hpp"
#include "artism/gateway.hpp"
#include "artism/world.hpp"

namespace artism {

/// Gateway for the configured backend (mock, or remote via ARTISM_LLM_* variables).
std::shared_ptr<gateway::Gateway> make_gateway(const SimulationConfig& cfg);

struct DialogueOutcome {
    std::string session_id;
    std::string reply;
    social::DialogueSession session;
};

/// Tick scheduler and single writer of the world. Every mutation is an event appended to the
/// log and folded into the state; not thread-safe (the API serializes access).
class Simulation final : public agent::AgentWorld {
public:
    /// init_world: loads corpus and KB seed, emits the initialization events.
    static std::unique_ptr<Simulation> create(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw);

    /// Rebuilds the world by folding `log` (which must start at seq 0) and continues from it.
    static std::unique_ptr<Simulation> from_log(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw,
                                                EventLog log);

    /// Continues from a restored snapshot; the new log starts at the snapshot's seq.
    /// Throws ConfigError if the snapshot was produced under a different configuration.
    static std::unique_ptr<Simulation> resume(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw,
                                              WorldState world);

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs one tick; returns the events it appended.
    std::vector<EventLogEntry> tick();
    void run(std::int64_t ticks);

    /// Harvest phase for tick `now` (normally called by tick()). Returns the coined isms.
    std::vector<ismism::Ism> harvest_for_ismism(Tick now);
    /// Argmax-affinity assignment; returns the chosen agent id.
    std::string couple_ism_to_agent(const ismism::Ism& ism, Tick now);
    /// Affinity of every agent for an ism's units, in ascending agent_id order.
    std::vector<std::pair<std::string, double>> affinities(const std::vector<ismism::ConceptUnit>& units) const;

    /// One dialogue exchange. Opens a session when `session_id` is empty. Throws UnknownAgent,
    /// UnknownSession, InvalidArgument (empty text), ReplyUnavailable.
    DialogueOutcome user_message(const std::string& agent_id, const std::string& user_name, const std::string& text,
                                 const std::optional<std::string>& session_id = std::nullopt,
                                 std::optional<std::uint64_t> seed = std::nullopt);

    /// Publishes a user_post at the current tick. Throws InvalidPost for empty text.
    std::string publish_user_post(const std::string& user_name, const std::string& text);

    const WorldState& world() const { return world_; }
    const EventLog& log() const { return log_; }
    const SimulationConfig& config() const { return cfg_; }

    // AgentWorld
    const agent::AgentState& agent(const std::string& agent_id) const override { return world_.agent(agent_id); }
    const memory::MemoryStream& stream(const std::string& agent_id) const override {
        return world_.memories.stream(agent_id);
    }
    const social::PostStore& posts() const override { return world_.posts; }
    std::int64_t followers_of(const std::string& author_id) const override { return world_.followers_of(author_id); }
    const memory::MemoryScorer& scorer() const override { return scorer_; }
    const gateway::Gateway& gateway() const override { return *gw_; }
    const agent::AgentParams& params() const override { return params_; }
    std::string reserve_post_id(Tick now) override;
    void emit(Tick tick, EventKind kind, Json payload) override;

private:
    Simulation(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw, WorldState world, EventLog log);
    void init_world();
    const EventLogEntry& commit(Tick tick, EventKind kind, Json payload);

    SimulationConfig cfg_;
    std::shared_ptr<gateway::Gateway> gw_;
    agent::AgentParams params_;
    WorldState world_;
    EventLog log_;
    memory::HeuristicScorer scorer_;
    bool agent_phase_ = false;
    std::vector<Json> queued_posts_;
};

/// init_world followed by cfg.ticks ticks.
std::unique_ptr<Simulation> run_simulation(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw = nullptr);

}  // namespace artism

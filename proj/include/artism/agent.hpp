#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artism/canonical.hpp"
#include "artism/corpus.hpp"
#include "artism/events.hpp"
#include "artism/gateway.hpp"
#include "artism/memory.hpp"
#include "artism/social.hpp"

namespace artism::agent {

struct MotivationWeights {
    double w_influence = 1.0 / 3.0;
    double w_controversy = 1.0 / 3.0;
    double w_consistency = 1.0 / 3.0;

    bool operator==(const MotivationWeights&) const = default;
};

struct AgentState {
    corpus::ArtistProfile profile;
    std::string private_view;
    MotivationWeights motivation;
    std::int64_t followers_count = 0;
    std::optional<Tick> last_reflection_tick;
    std::uint64_t rng_stream_seed = 0;

    const std::string& id() const { return profile.agent_id; }
    bool operator==(const AgentState&) const = default;
};

void to_json(Json& j, const MotivationWeights& w);
void from_json(const Json& j, MotivationWeights& w);
void to_json(Json& j, const AgentState& a);
void from_json(const Json& j, AgentState& a);

/// "PRIV-<agent_id>"
std::string private_sentinel(std::string_view agent_id);

/// Weights drawn uniformly from [0.2, 1.0] by the agent's stream, normalized to sum 1.
MotivationWeights draw_motivation(std::uint64_t agent_seed);

/// Seed purposes mixed with (agent seed, tick) to key each generative call.
enum class Purpose : std::uint64_t {
    initial_view = 1,
    reflect = 2,
    create_work = 3,
    comment = 4,
    publish_view = 5,
    dialogue = 6,
    motivation = 7,
};

std::uint64_t request_seed(const AgentState& a, Tick tick, Purpose purpose);

/// Initial private view: sentinel followed by the gateway's summary of the reference text.
std::string initial_private_view(const corpus::ArtistProfile& profile, std::uint64_t agent_seed, const gateway::Gateway& gw);

enum class ActionKind { Comment, CreateWork, PublishView, Idle };
std::string_view to_string(ActionKind kind);
ActionKind action_kind_from(std::string_view s);

struct ActionDecision {
    ActionKind kind = ActionKind::Idle;
    std::optional<std::string> target_post_id;
    double score = 0.0;
    std::string rationale;

    bool operator==(const ActionDecision&) const = default;
};

void to_json(Json& j, const ActionDecision& d);
void from_json(const Json& j, ActionDecision& d);

struct Candidate {
    ActionKind kind = ActionKind::Idle;
    std::optional<std::string> target_post_id;
    double influence = 0.0;
    double controversy = 0.0;
    double consistency = 0.0;
    double score = 0.0;
};

/// followers / (followers + 5): in [0, 1), strictly increasing in followers.
double influence_estimate(std::int64_t followers);

struct AgentParams {
    memory::RetrievalWeights weights;
    double theta_reflect = 5.0;
    double theta_act = 0.15;
    std::size_t top_k = 8;
    std::size_t feed_window = 20;
    std::size_t comment_candidates = 5;
    bool prompt_audit = false;
};

/// Read access to the committed world plus the event sink. Implemented by the orchestrator:
/// emit() applies each event immediately, except PostPublished which is queued for the
/// end of the tick's agent phase.
class AgentWorld {
public:
    virtual ~AgentWorld() = default;
    virtual const AgentState& agent(const std::string& agent_id) const = 0;
    virtual const memory::MemoryStream& stream(const std::string& agent_id) const = 0;
    virtual const social::PostStore& posts() const = 0;
    /// 0 for unknown authors (users have no followers).
    virtual std::int64_t followers_of(const std::string& author_id) const = 0;
    virtual const memory::MemoryScorer& scorer() const = 0;
    virtual const gateway::Gateway& gateway() const = 0;
    virtual const AgentParams& params() const = 0;
    /// Id the next post queued during this tick will receive.
    virtual std::string reserve_post_id(Tick now) = 0;
    virtual void emit(Tick tick, EventKind kind, Json payload) = 0;
};

/// Posts with tick in [now-1, now), newest first, at most `window`.
std::vector<const social::PublicPost*> feed_slice(const social::PostStore& posts, Tick now, std::size_t window);

/// Newest `n` posts with tick < now not authored by `self`.
std::vector<const social::PublicPost*> comment_targets(const social::PostStore& posts, const std::string& self, Tick now,
                                                       std::size_t n);

/// Drafts one observation per post not authored by the agent, in feed order.
std::vector<memory::MemoryRecord> perceive(const AgentState& agent, const memory::MemoryStream& stream,
                                           const std::vector<const social::PublicPost*>& feed, Tick now,
                                           const memory::MemoryScorer& scorer);

/// Scores every candidate action: Comment on each target, CreateWork, PublishView.
std::vector<Candidate> score_candidates(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved,
                                        const std::vector<const social::PublicPost*>& targets,
                                        const std::vector<std::int64_t>& target_author_followers);

/// Argmax with ties by kind (Comment < CreateWork < PublishView) then smaller target id;
/// Idle when the best score is below theta_act.
ActionDecision choose_action(const std::vector<Candidate>& candidates, double theta_act);

ActionDecision plan_action(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved, Tick now,
                           const AgentWorld& world);

/// Bindings shared by every persona template.
gateway::Bindings persona_bindings(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved);

/// Request the gateway would receive for a non-Idle decision.
gateway::CompletionRequest action_request(const AgentState& agent, const ActionDecision& decision,
                                          const std::vector<memory::MemoryRecord>& retrieved,
                                          const social::PostStore& posts, Tick now);

/// Runs the decided action: emits PromptAudit (if enabled), queues PostPublished and emits Acted,
/// or emits ActionFailed on gateway errors. Returns the queued post.
std::optional<social::PublicPost> execute_action(const AgentState& agent, const ActionDecision& decision,
                                                 const std::vector<memory::MemoryRecord>& retrieved, Tick now,
                                                 AgentWorld& world);

/// Rewrites the private view. Emits Reflected or ReflectFailed. Precondition: should_reflect.
void reflect(const std::string& agent_id, Tick now, AgentWorld& world);

/// perceive -> reflect (if due) -> retrieve -> plan -> act.
void step_agent(const std::string& agent_id, Tick now, AgentWorld& world);

/// Text the agent would answer in a dialogue; throws gateway errors.
std::string dialogue_reply(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved,
                           const social::DialogueSession& session, const std::string& user_text, std::uint64_t seed,
                           const gateway::Gateway& gw);

}  // namespace artism::agent

#include "artism/agent.hpp"

#include <algorithm>
#include <cmath>

#include "artism/error.hpp"
#include "artism/rng.hpp"
#include "artism/text.hpp"

namespace artism::agent {

void to_json(Json& j, const MotivationWeights& w) {
    j = Json{{"w_influence", w.w_influence}, {"w_controversy", w.w_controversy}, {"w_consistency", w.w_consistency}};
}

void from_json(const Json& j, MotivationWeights& w) {
    j.at("w_influence").get_to(w.w_influence);
    j.at("w_controversy").get_to(w.w_controversy);
    j.at("w_consistency").get_to(w.w_consistency);
}

void to_json(Json& j, const AgentState& a) {
    j = Json{{"profile", a.profile},
             {"private_view", a.private_view},
             {"motivation", a.motivation},
             {"followers_count", a.followers_count},
             {"rng_stream_seed", a.rng_stream_seed}};
    j["last_reflection_tick"] = a.last_reflection_tick ? Json(*a.last_reflection_tick) : Json(nullptr);
}

void from_json(const Json& j, AgentState& a) {
    j.at("profile").get_to(a.profile);
    j.at("private_view").get_to(a.private_view);
    j.at("motivation").get_to(a.motivation);
    j.at("followers_count").get_to(a.followers_count);
    j.at("rng_stream_seed").get_to(a.rng_stream_seed);
    const auto& t = j.at("last_reflection_tick");
    a.last_reflection_tick = t.is_null() ? std::nullopt : std::optional<Tick>(t.get<Tick>());
}

std::string private_sentinel(std::string_view agent_id) { return "PRIV-" + std::string(agent_id); }

MotivationWeights draw_motivation(std::uint64_t agent_seed) {
    XorShift64Star rng(mix_seed(agent_seed, static_cast<std::uint64_t>(Purpose::motivation)));
    const double a = 0.2 + 0.8 * rng.unit();
    const double b = 0.2 + 0.8 * rng.unit();
    const double c = 0.2 + 0.8 * rng.unit();
    const double sum = a + b + c;
    return {a / sum, b / sum, c / sum};
}

std::uint64_t request_seed(const AgentState& a, Tick tick, Purpose purpose) {
    return mix_seed(a.rng_stream_seed, static_cast<std::uint64_t>(tick), static_cast<std::uint64_t>(purpose));
}

std::string initial_private_view(const corpus::ArtistProfile& profile, std::uint64_t agent_seed, const gateway::Gateway& gw) {
    gateway::CompletionRequest req{"initial_view",
                                   {{"name", profile.display_name}, {"reference_text", profile.reference_text}},
                                   mix_seed(agent_seed, 0, static_cast<std::uint64_t>(Purpose::initial_view)),
                                   2048,
                                   {},
                                   {}};
    return private_sentinel(profile.agent_id) + " " + gw.complete(req).text;
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Comment: return "Comment";
        case ActionKind::CreateWork: return "CreateWork";
        case ActionKind::PublishView: return "PublishView";
        case ActionKind::Idle: return "Idle";
    }
    return "Idle";
}

ActionKind action_kind_from(std::string_view s) {
    for (auto k : {ActionKind::Comment, ActionKind::CreateWork, ActionKind::PublishView, ActionKind::Idle})
        if (to_string(k) == s) return k;
    fail(ErrorCode::InvalidArgument, "unknown action kind " + std::string(s));
}

void to_json(Json& j, const ActionDecision& d) {
    j = Json{{"kind", to_string(d.kind)}, {"score", d.score}, {"rationale", d.rationale}};
    j["target_post_id"] = d.target_post_id ? Json(*d.target_post_id) : Json(nullptr);
}

void from_json(const Json& j, ActionDecision& d) {
    d.kind = action_kind_from(j.at("kind").get<std::string>());
    j.at("score").get_to(d.score);
    j.at("rationale").get_to(d.rationale);
    const auto& t = j.at("target_post_id");
    d.target_post_id = t.is_null() ? std::nullopt : std::optional(t.get<std::string>());
}

double influence_estimate(std::int64_t followers) {
    require(followers >= 0, "followers must be non-negative");
    const double f = static_cast<double>(followers);
    return f / (f + 5.0);
}

std::vector<const social::PublicPost*> feed_slice(const social::PostStore& posts, Tick now, std::size_t window) {
    auto out = posts.in_window(now - 1, now);
    if (out.size() > window) out.resize(window);
    return out;
}

std::vector<const social::PublicPost*> comment_targets(const social::PostStore& posts, const std::string& self, Tick now,
                                                       std::size_t n) {
    std::vector<const social::PublicPost*> out;
    const auto& all = posts.all();
    for (auto it = all.rbegin(); it != all.rend() && out.size() < n; ++it)
        if (it->tick < now && it->author_id != self) out.push_back(&*it);
    return out;
}

std::vector<memory::MemoryRecord> perceive(const AgentState& agent, const memory::MemoryStream& stream,
                                           const std::vector<const social::PublicPost*>& feed, Tick now,
                                           const memory::MemoryScorer& scorer) {
    std::vector<memory::MemoryRecord> out;
    for (const auto* post : feed) {
        require(post->tick < now, "feed slice must only hold posts from earlier ticks");
        if (post->author_id == agent.id()) continue;
        auto content = post->author_id + " (" + std::string(social::to_string(post->kind)) + "): " + post->content;
        const auto scores = scorer.score(content);
        out.push_back(stream.draft(now, memory::MemoryKind::observation, std::move(content), {post->post_id}, scores,
                                   out.size()));
    }
    return out;
}

namespace {

std::string memories_context(const std::vector<memory::MemoryRecord>& retrieved) {
    std::vector<std::string> parts;
    for (const auto& m : retrieved) parts.push_back(m.content);
    return text::join(parts, " ");
}

int kind_rank(ActionKind k) { return static_cast<int>(k); }

bool target_less(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return a.has_value() < b.has_value();
    const auto pa = social::PostId::parse(*a), pb = social::PostId::parse(*b);
    if (pa && pb) return *pa < *pb;
    return *a < *b;
}

}  // namespace

std::vector<Candidate> score_candidates(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved,
                                        const std::vector<const social::PublicPost*>& targets,
                                        const std::vector<std::int64_t>& target_author_followers) {
    require(targets.size() == target_author_followers.size(), "one follower count per comment target");
    const auto& w = agent.motivation;
    const auto& style = agent.profile.style_keywords;
    auto finish = [&](Candidate c) {
        c.score = w.w_influence * c.influence + w.w_controversy * c.controversy + w.w_consistency * c.consistency;
        return c;
    };
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& p = *targets[i];
        require(p.author_id != agent.id(), "agents do not comment on their own posts");
        out.push_back(finish({ActionKind::Comment, p.post_id, influence_estimate(target_author_followers[i]),
                              text::affect_ratio(p.content), text::keyword_overlap(style, p.content), 0.0}));
    }
    const double own = influence_estimate(agent.followers_count);
    const auto work_context = memories_context(retrieved) + " " + text::join(agent.profile.attributes, " ");
    out.push_back(finish({ActionKind::CreateWork, std::nullopt, own, text::affect_ratio(work_context),
                          text::keyword_overlap(style, work_context), 0.0}));
    out.push_back(finish({ActionKind::PublishView, std::nullopt, own, text::affect_ratio(agent.private_view),
                          text::keyword_overlap(style, agent.private_view), 0.0}));
    return out;
}

ActionDecision choose_action(const std::vector<Candidate>& candidates, double theta_act) {
    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
        if (!best || c.score > best->score) {
            best = &c;
            continue;
        }
        if (c.score < best->score) continue;
        if (kind_rank(c.kind) < kind_rank(best->kind) ||
            (c.kind == best->kind && target_less(c.target_post_id, best->target_post_id)))
            best = &c;
    }
    ActionDecision d;
    if (!best || best->score < theta_act) {
        d.score = best ? best->score : 0.0;
        d.rationale = "best score below action threshold";
        return d;
    }
    d.kind = best->kind;
    d.target_post_id = best->target_post_id;
    d.score = best->score;
    char buf[96];
    std::snprintf(buf, sizeof buf, "influence %.3f, controversy %.3f, consistency %.3f", best->influence,
                  best->controversy, best->consistency);
    d.rationale = buf;
    return d;
}

ActionDecision plan_action(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved, Tick now,
                           const AgentWorld& world) {
    const auto targets = comment_targets(world.posts(), agent.id(), now, world.params().comment_candidates);
    std::vector<std::int64_t> followers;
    for (const auto* p : targets) followers.push_back(world.followers_of(p->author_id));
    return choose_action(score_candidates(agent, retrieved, targets, followers), world.params().theta_act);
}

gateway::Bindings persona_bindings(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved) {
    std::vector<std::string> lines;
    for (const auto& m : retrieved) lines.push_back("- [" + std::to_string(m.tick) + "] " + m.content);
    return {{"name", agent.profile.display_name},
            {"style", text::join(agent.profile.style_keywords, ", ")},
            {"attributes", text::join(agent.profile.attributes, "; ")},
            {"private_view", agent.private_view},
            {"reference_text", agent.profile.reference_text},
            {"memories", lines.empty() ? std::string("(none)") : text::join(lines, "\n")}};
}

gateway::CompletionRequest action_request(const AgentState& agent, const ActionDecision& decision,
                                          const std::vector<memory::MemoryRecord>& retrieved,
                                          const social::PostStore& posts, Tick now) {
    gateway::CompletionRequest req;
    req.bindings = persona_bindings(agent, retrieved);
    switch (decision.kind) {
        case ActionKind::Comment: {
            require(decision.target_post_id.has_value(), "comment needs a target");
            const auto* target = posts.find(*decision.target_post_id);
            require(target != nullptr && target->tick < now && target->author_id != agent.id(),
                    "comment target must be an earlier post by someone else");
            req.template_id = "comment";
            req.bindings["target_author"] = target->author_id;
            req.bindings["target_text"] = target->content;
            req.seed = request_seed(agent, now, Purpose::comment);
            break;
        }
        case ActionKind::CreateWork:
            req.template_id = "create_work";
            req.seed = request_seed(agent, now, Purpose::create_work);
            break;
        case ActionKind::PublishView:
            req.template_id = "publish_view";
            req.seed = request_seed(agent, now, Purpose::publish_view);
            break;
        case ActionKind::Idle: fail(ErrorCode::InvalidArgument, "Idle has no request");
    }
    return req;
}

namespace {

social::PostKind post_kind_for(ActionKind k) {
    switch (k) {
        case ActionKind::Comment: return social::PostKind::comment;
        case ActionKind::CreateWork: return social::PostKind::artwork;
        default: return social::PostKind::published_view;
    }
}

void audit(AgentWorld& world, Tick now, const std::string& agent_id, const gateway::CompletionRequest& req) {
    if (!world.params().prompt_audit) return;
    world.emit(now, EventKind::PromptAudit,
               Json{{"agent_id", agent_id}, {"template_id", req.template_id}, {"prompt", world.gateway().render(req)}});
}

}  // namespace

std::optional<social::PublicPost> execute_action(const AgentState& agent, const ActionDecision& decision,
                                                 const std::vector<memory::MemoryRecord>& retrieved, Tick now,
                                                 AgentWorld& world) {
    if (decision.kind == ActionKind::Idle) return std::nullopt;
    const auto req = action_request(agent, decision, retrieved, world.posts(), now);
    audit(world, now, agent.id(), req);
    std::string text;
    try {
        text = world.gateway().complete(req).text;
    } catch (const Error& e) {
        world.emit(now, EventKind::ActionFailed,
                   Json{{"agent_id", agent.id()}, {"kind", to_string(decision.kind)}, {"error", e.what()}});
        return std::nullopt;
    }
    social::PublicPost post;
    post.post_id = world.reserve_post_id(now);
    post.author_id = agent.id();
    post.tick = now;
    post.kind = post_kind_for(decision.kind);
    post.content = text;
    post.provenance = social::Provenance::agent_generated;
    if (decision.kind == ActionKind::Comment) post.reply_to = decision.target_post_id;
    if (decision.kind == ActionKind::CreateWork) {
        auto kws = text::keywords(text, 8);
        if (!agent.profile.style_keywords.empty()) kws.push_back(agent.profile.style_keywords.front());
        post.image_prompt = text::join(kws, ", ");
    }

    const auto& stream = world.stream(agent.id());
    auto content = "I published " + std::string(social::to_string(post.kind)) + " " + post.post_id + ": " + text;
    const auto scores = world.scorer().score(content);
    std::vector<std::string> refs{post.post_id};
    if (post.reply_to) refs.push_back(*post.reply_to);
    const auto mem = stream.draft(now, memory::MemoryKind::action, std::move(content), std::move(refs), scores);

    world.emit(now, EventKind::PostPublished, Json{{"post", post}});
    world.emit(now, EventKind::Acted,
               Json{{"agent_id", agent.id()}, {"decision", decision}, {"post_id", post.post_id}, {"memory", mem}});
    return post;
}

void reflect(const std::string& agent_id, Tick now, AgentWorld& world) {
    const auto& agent = world.agent(agent_id);
    const auto& stream = world.stream(agent_id);
    require(stream.should_reflect(world.params().theta_reflect), "reflect called while reflection is not due");
    const auto retrieved = stream.retrieve_top_k(now, world.params().top_k, world.params().weights);
    gateway::CompletionRequest req{"reflect", persona_bindings(agent, retrieved), request_seed(agent, now, Purpose::reflect),
                                   2048, {}, {}};
    audit(world, now, agent_id, req);
    std::string summary;
    try {
        summary = world.gateway().complete(req).text;
    } catch (const Error& e) {
        world.emit(now, EventKind::ReflectFailed, Json{{"agent_id", agent_id}, {"error", e.what()}});
        return;
    }
    const auto sentinel = private_sentinel(agent_id);
    // The sentinel stays the first token even if the model echoes it back.
    std::string body = summary;
    while (text::starts_with(body, sentinel)) body = text::trim(std::string_view(body).substr(sentinel.size()));
    std::vector<std::string> refs;
    for (const auto& m : retrieved) refs.push_back(m.memory_id);
    const auto mem = stream.draft(now, memory::MemoryKind::reflection, body, std::move(refs), world.scorer().score(body));
    world.emit(now, EventKind::Reflected,
               Json{{"agent_id", agent_id}, {"private_view", sentinel + " " + body}, {"memory", mem}});
}

void step_agent(const std::string& agent_id, Tick now, AgentWorld& world) {
    const auto& params = world.params();
    {
        const auto feed = feed_slice(world.posts(), now, params.feed_window);
        const auto observed = perceive(world.agent(agent_id), world.stream(agent_id), feed, now, world.scorer());
        world.emit(now, EventKind::Perceived, Json{{"agent_id", agent_id}, {"memories", observed}});
    }
    if (world.stream(agent_id).should_reflect(params.theta_reflect)) reflect(agent_id, now, world);

    const auto& agent = world.agent(agent_id);
    const auto retrieved = world.stream(agent_id).retrieve_top_k(now, params.top_k, params.weights);
    const auto decision = plan_action(agent, retrieved, now, world);
    std::vector<std::string> ids;
    for (const auto& m : retrieved) ids.push_back(m.memory_id);
    world.emit(now, EventKind::Planned, Json{{"agent_id", agent_id}, {"decision", decision}, {"retrieved", ids}});
    execute_action(agent, decision, retrieved, now, world);
}

std::string dialogue_reply(const AgentState& agent, const std::vector<memory::MemoryRecord>& retrieved,
                           const social::DialogueSession& session, const std::string& user_text, std::uint64_t seed,
                           const gateway::Gateway& gw) {
    std::vector<std::string> lines;
    for (const auto& t : session.transcript)
        lines.push_back((t.speaker == social::Speaker::user ? session.user_name : agent.profile.display_name) + ": " + t.text);
    auto bindings = persona_bindings(agent, retrieved);
    bindings["transcript"] = lines.empty() ? std::string("(new conversation)") : text::join(lines, "\n");
    bindings["user_name"] = session.user_name;
    bindings["user_text"] = user_text;
    gateway::CompletionRequest req{"dialogue_reply", std::move(bindings), seed, 2048, {}, {}};
    return gw.complete(req).text;
}

}  // namespace artism::agent

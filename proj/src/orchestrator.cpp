#include "artism/orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "artism/corpus.hpp"
#include "artism/error.hpp"
#include "artism/lexicon.hpp"
#include "artism/rng.hpp"
#include "artism/text.hpp"

namespace artism {

namespace {

// Seed purposes for the critique engine, disjoint from agent purposes.
constexpr std::uint64_t kHarvestSample = 101;
constexpr std::uint64_t kCoinBase = 1000;

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileUnreadable, path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

agent::AgentParams params_from(const SimulationConfig& cfg) {
    agent::AgentParams p;
    p.weights = cfg.weights;
    p.theta_reflect = cfg.theta_reflect;
    p.theta_act = cfg.theta_act;
    p.top_k = cfg.top_k;
    p.feed_window = cfg.feed_window;
    p.comment_candidates = cfg.comment_candidates;
    p.prompt_audit = cfg.prompt_audit;
    return p;
}

}  // namespace

std::shared_ptr<gateway::Gateway> make_gateway(const SimulationConfig& cfg) {
    if (cfg.backend == "remote")
        return std::make_shared<gateway::Gateway>(std::make_shared<gateway::RemoteBackend>(gateway::RemoteConfig::from_env()));
    return gateway::Gateway::mock();
}

Simulation::Simulation(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw, WorldState world, EventLog log)
    : cfg_(cfg),
      gw_(gw ? std::move(gw) : make_gateway(cfg)),
      params_(params_from(cfg)),
      world_(std::move(world)),
      log_(std::move(log)),
      scorer_(world_.kb.matcher()) {}

std::unique_ptr<Simulation> Simulation::create(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw) {
    cfg.validate();
    std::unique_ptr<Simulation> sim(new Simulation(cfg, std::move(gw), WorldState{}, EventLog{}));
    sim->init_world();
    return sim;
}

std::unique_ptr<Simulation> Simulation::from_log(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw,
                                                 EventLog log) {
    cfg.validate();
    require(log.first_seq() == 0, "replay needs a log starting at seq 0");
    auto world = replay(log.entries());
    if (world.config_digest != cfg.digest())
        fail(ErrorCode::ConfigError, "event log was produced under a different configuration");
    return std::unique_ptr<Simulation>(new Simulation(cfg, std::move(gw), std::move(world), std::move(log)));
}

std::unique_ptr<Simulation> Simulation::resume(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw,
                                               WorldState world) {
    cfg.validate();
    if (world.config_digest != cfg.digest())
        fail(ErrorCode::ConfigError, "snapshot was produced under a different configuration");
    const auto seq = world.applied;
    return std::unique_ptr<Simulation>(new Simulation(cfg, std::move(gw), std::move(world), EventLog(seq)));
}

const EventLogEntry& Simulation::commit(Tick tick, EventKind kind, Json payload) {
    // Round-trip through the canonical form so live state and replayed state hold identical values.
    auto normalized = Json::parse(canonical_dump(payload));
    const auto& e = log_.append(tick, kind, std::move(normalized));
    world_.apply(e);
    return e;
}

void Simulation::emit(Tick tick, EventKind kind, Json payload) {
    if (agent_phase_ && kind == EventKind::PostPublished) {
        queued_posts_.push_back(std::move(payload));
        return;
    }
    commit(tick, kind, std::move(payload));
}

std::string Simulation::reserve_post_id(Tick now) {
    return world_.posts.next_post_id(now, agent_phase_ ? queued_posts_.size() : 0);
}

void Simulation::init_world() {
    require(log_.empty() && world_.applied == 0, "init_world on a non-empty world");
    const auto corpus = corpus::load_corpus(cfg_.corpus_path, {cfg_.l_min, cfg_.l_max});
    for (const auto& r : corpus.reports)
        if (r.rejected)
            fail(r.code, cfg_.corpus_path.string() + ":" + std::to_string(r.line) + ": " + r.message);
    require(!corpus.profiles.empty(), "corpus holds no artists");
    const auto kb_entries = ismism::read_kb_seed(cfg_.kb_seed_path.string());

    commit(0, EventKind::SimulationStarted,
           Json{{"global_seed", cfg_.global_seed},
                {"config_digest", cfg_.digest()},
                {"config", cfg_.to_json()},
                {"corpus_digest", file_digest(cfg_.corpus_path)},
                {"kb_seed_digest", file_digest(cfg_.kb_seed_path)}});
    for (const auto& profile : corpus.profiles) {
        agent::AgentState a;
        a.profile = profile;
        a.rng_stream_seed = derive_agent_seed(cfg_.global_seed, profile.agent_id);
        a.motivation = agent::draw_motivation(a.rng_stream_seed);
        a.private_view = agent::initial_private_view(profile, a.rng_stream_seed, *gw_);
        commit(0, EventKind::AgentRegistered, Json{{"agent", a}});
    }
    for (const auto& e : kb_entries) commit(0, EventKind::KbEntryAdded, Json{{"entry", e}});
}

std::vector<EventLogEntry> Simulation::tick() {
    const Tick now = world_.tick;
    const auto first = log_.next_seq();

    agent_phase_ = true;
    queued_posts_.clear();
    try {
        std::vector<std::string> ids;
        for (const auto& [id, _] : world_.agents) ids.push_back(id);
        for (const auto& id : ids) agent::step_agent(id, now, *this);
    } catch (...) {
        agent_phase_ = false;
        throw;
    }
    agent_phase_ = false;
    auto queued = std::move(queued_posts_);
    queued_posts_.clear();
    for (auto& p : queued) commit(now, EventKind::PostPublished, std::move(p));

    if (cfg_.coupling_enabled && now > 0 && now % cfg_.harvest_period == 0) harvest_for_ismism(now);

    commit(now, EventKind::TickCompleted, Json{{"tick", now}, {"posts", world_.posts.size()}, {"kb", world_.kb.size()}});

    const auto& all = log_.entries();
    return {all.begin() + static_cast<std::ptrdiff_t>(first - log_.first_seq()), all.end()};
}

void Simulation::run(std::int64_t ticks) {
    require(ticks >= 0, "ticks must be non-negative");
    for (std::int64_t i = 0; i < ticks; ++i) tick();
}

std::vector<ismism::Ism> Simulation::harvest_for_ismism(Tick now) {
    require(cfg_.harvest_period > 0 && now % cfg_.harvest_period == 0, "harvest only on multiples of the period");
    const Tick from = std::max<Tick>(0, now - cfg_.window());
    auto window = world_.posts.in_window(from, now);
    std::reverse(window.begin(), window.end());
    std::vector<std::string> texts;
    std::vector<std::string> post_ids;
    for (const auto* p : window) {
        texts.push_back(p->content);
        post_ids.push_back(p->post_id);
    }
    const auto corpus_text = text::join(texts, "\n");
    const auto units = window.empty() || world_.kb.size() == 0 ? std::vector<ismism::ConceptUnit>{}
                                                               : ismism::decompose(corpus_text, world_.kb);
    commit(now, EventKind::HarvestStarted,
           Json{{"window_from", from}, {"window_to", now}, {"post_count", window.size()}, {"units", units}});

    const auto r = cfg_.arity;
    if (window.empty()) {
        commit(now, EventKind::HarvestSkipped, Json{{"reason", "no posts in window"}, {"unit_count", 0}});
        return {};
    }
    if (units.size() < r) {
        commit(now, EventKind::HarvestSkipped, Json{{"reason", "fewer units than arity"}, {"unit_count", units.size()}});
        return {};
    }

    const auto m = cfg_.coins_per_harvest;
    const auto total = ismism::binomial(units.size(), r);
    auto strategy = cfg_.recombine == RecombineMode::exhaustive || total <= m
                        ? ismism::RecombineStrategy::exhaustive()
                        : ismism::RecombineStrategy::sample(mix_seed(cfg_.global_seed, static_cast<std::uint64_t>(now), kHarvestSample), m);
    auto combos = ismism::recombine(units, r, strategy);
    if (combos.size() > m) combos.resize(m);

    std::vector<ismism::Ism> coined;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        const auto seed = mix_seed(cfg_.global_seed, static_cast<std::uint64_t>(now), kCoinBase + i);
        ismism::Ism ism;
        try {
            ism = ismism::coin_ism(combos[i], now, world_.isms.next_ism_id(now), *gw_, seed);
        } catch (const Error& e) {
            Json labels = Json::array();
            for (const auto& u : combos[i]) labels.push_back(u.label);
            commit(now, EventKind::CoinFailed, Json{{"units", labels}, {"error", e.what()}});
            continue;
        }
        commit(now, EventKind::IsmCoined, Json{{"ism", ism}});

        try {
            auto critique = ismism::generate_critique(ism, world_.kb, now, world_.isms.next_critique_id(now), *gw_, seed);
            const auto critique_id = critique.critique_id;
            commit(now, EventKind::CritiqueGenerated, Json{{"critique", critique}});
            auto entry = ismism::feedback_to_kb(critique_id, world_.isms, world_.kb, now);
            commit(now, EventKind::FedBack, Json{{"critique_id", critique_id}, {"entry", entry}});
        } catch (const Error& e) {
            commit(now, EventKind::CritiqueFailed, Json{{"ism_id", ism.ism_id}, {"error", e.what()}});
        }
        couple_ism_to_agent(*world_.isms.find_ism(ism.ism_id), now);
        coined.push_back(*world_.isms.find_ism(ism.ism_id));
    }
    return coined;
}

std::vector<std::pair<std::string, double>> Simulation::affinities(const std::vector<ismism::ConceptUnit>& units) const {
    require(!units.empty(), "affinity needs units");
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [id, a] : world_.agents) {
        std::size_t hits = 0;
        for (const auto& u : units)
            if (contains_phrase(a.profile.reference_text, u.label)) ++hits;
        out.emplace_back(id, static_cast<double>(hits) / static_cast<double>(units.size()));
    }
    return out;
}

std::string Simulation::couple_ism_to_agent(const ismism::Ism& ism, Tick now) {
    require(!world_.agents.empty(), "coupling needs at least one agent");
    const auto scores = affinities(ism.units);
    // Ascending id order plus strict comparison: ties go to the smallest id.
    const auto* best = &scores.front();
    for (const auto& s : scores)
        if (s.second > best->second) best = &s;
    const auto& agent_id = best->first;

    auto content = "I have been named the exponent of " + ism.name + ": " + ism.description;
    const auto& stream = world_.memories.stream(agent_id);
    const auto mem = stream.draft(now, memory::MemoryKind::ism_assignment, content, {ism.ism_id}, scorer_.score(content));
    commit(now, EventKind::IsmAssigned,
           Json{{"ism_id", ism.ism_id}, {"agent_id", agent_id}, {"affinity", best->second}, {"memory", mem}});
    return agent_id;
}

DialogueOutcome Simulation::user_message(const std::string& agent_id, const std::string& user_name,
                                         const std::string& text_in, const std::optional<std::string>& session_id,
                                         std::optional<std::uint64_t> seed) {
    require(!agent_phase_, "dialogue during a tick");
    const auto text = text::trim(nfc(text_in));
    const auto user = text::trim(nfc(user_name));
    require(!text.empty(), "dialogue text must be non-empty");
    require(!user.empty(), "user_name must be non-empty");
    const auto& a = world_.agent(agent_id);
    const Tick now = world_.tick;

    social::DialogueSession session;
    if (session_id) {
        const auto* existing = world_.dialogues.find(*session_id);
        if (!existing) fail(ErrorCode::UnknownSession, *session_id);
        require(existing->agent_id == agent_id, "session " + *session_id + " belongs to another agent");
        session = *existing;
    } else {
        session.session_id = world_.dialogues.next_session_id();
        session.user_name = user;
        session.agent_id = agent_id;
        session.seed = seed.value_or(mix_seed(a.rng_stream_seed, static_cast<std::uint64_t>(agent::Purpose::dialogue),
                                              world_.dialogues.sessions().size() + 1));
    }
    const auto turn = static_cast<std::uint64_t>(session.transcript.size() / 2);

    const auto& stream = world_.memories.stream(agent_id);
    const auto heard = session.sentinel() + " " + session.user_name + " said: " + text;
    const auto draft = stream.draft(now, memory::MemoryKind::dialogue, heard, {session.session_id}, scorer_.score(heard));
    const auto retrieved = stream.retrieve_top_k(now, params_.top_k, params_.weights, &draft);

    std::string reply;
    try {
        if (params_.prompt_audit) {
            // Same request dialogue_reply() builds, rendered for the audit trail.
            std::vector<std::string> lines;
            for (const auto& t : session.transcript)
                lines.push_back((t.speaker == social::Speaker::user ? session.user_name : a.profile.display_name) + ": " + t.text);
            auto bindings = agent::persona_bindings(a, retrieved);
            bindings["transcript"] = lines.empty() ? std::string("(new conversation)") : text::join(lines, "\n");
            bindings["user_name"] = session.user_name;
            bindings["user_text"] = text;
            commit(now, EventKind::PromptAudit,
                   Json{{"agent_id", agent_id},
                        {"template_id", "dialogue_reply"},
                        {"prompt", gw_->render({"dialogue_reply", bindings, 0, 2048, {}, {}})}});
        }
        reply = agent::dialogue_reply(a, retrieved, session, text, mix_seed(session.seed, turn), *gw_);
    } catch (const Error& e) {
        commit(now, EventKind::DialogueFailed,
               Json{{"session_id", session.session_id}, {"agent_id", agent_id}, {"error", e.what()}});
        fail(ErrorCode::ReplyUnavailable, e.what());
    }

    const auto stored_text = heard + " / I replied: " + reply;
    const auto mem = stream.draft(now, memory::MemoryKind::dialogue, stored_text, {session.session_id},
                                  scorer_.score(stored_text));
    commit(now, EventKind::DialogueTurn,
           Json{{"session_id", session.session_id},
                {"user_name", session.user_name},
                {"agent_id", agent_id},
                {"seed", session.seed},
                {"user_text", text},
                {"reply", reply},
                {"memory", mem}});
    const auto* stored = world_.dialogues.find(session.session_id);
    return {session.session_id, stored->transcript.back().text, *stored};
}

std::string Simulation::publish_user_post(const std::string& user_name, const std::string& text_in) {
    require(!agent_phase_, "user post during a tick");
    const auto text = text::trim(nfc(text_in));
    const auto user = text::trim(nfc(user_name));
    if (text.empty()) fail(ErrorCode::InvalidPost, "empty text");
    if (user.empty()) fail(ErrorCode::InvalidPost, "empty user_name");
    social::PublicPost post;
    post.post_id = world_.posts.next_post_id(world_.tick);
    post.author_id = "user:" + user;
    post.tick = world_.tick;
    post.kind = social::PostKind::user_post;
    post.content = text;
    post.provenance = social::Provenance::user_authored;
    commit(world_.tick, EventKind::PostPublished, Json{{"post", post}});
    return post.post_id;
}

std::unique_ptr<Simulation> run_simulation(const SimulationConfig& cfg, std::shared_ptr<gateway::Gateway> gw) {
    auto sim = Simulation::create(cfg, std::move(gw));
    sim->run(cfg.ticks);
    return sim;
}

}  // namespace artism

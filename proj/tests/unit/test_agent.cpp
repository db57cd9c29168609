#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "artism/agent.hpp"
#include "artism/error.hpp"
#include "artism/orchestrator.hpp"
#include "artism/text.hpp"
#include "fixtures.hpp"

using namespace artism;
using namespace artism::agent;

namespace {

AgentState bare_agent(const std::string& id) {
    AgentState a;
    a.profile.agent_id = id;
    a.profile.display_name = id;
    a.profile.style_keywords = {"light", "color"};
    a.private_view = private_sentinel(id) + " calm";
    return a;
}

social::PublicPost post_by(const social::PostStore& s, const std::string& author, Tick tick, social::PostKind kind,
                           const std::string& content) {
    social::PublicPost p;
    p.post_id = s.next_post_id(tick);
    p.author_id = author;
    p.tick = tick;
    p.kind = kind;
    p.content = content;
    if (kind == social::PostKind::artwork) p.image_prompt = content;
    if (kind == social::PostKind::user_post) p.provenance = social::Provenance::user_authored;
    return p;
}

Candidate cand(ActionKind k, double score, std::optional<std::string> target = std::nullopt) {
    Candidate c;
    c.kind = k;
    c.score = score;
    c.target_post_id = std::move(target);
    return c;
}

std::string log_lines(const EventLog& log) {
    std::string out;
    for (const auto& e : log.entries()) out += canonical_line(e) + "\n";
    return out;
}

std::vector<EventLogEntry> of_kind(const EventLog& log, EventKind kind) {
    std::vector<EventLogEntry> out;
    for (const auto& e : log.entries())
        if (e.kind == kind) out.push_back(e);
    return out;
}

}  // namespace

TEST_SUITE("agent") {

TEST_CASE("initialization and tick 0 match the golden event file") {
    auto cfg = testing::desk_config();
    auto sim = Simulation::create(cfg, make_gateway(cfg));
    sim->tick();
    const auto actual = log_lines(sim->log());
    const auto path = testing::golden_dir() / "tick0_events.jsonl";
    if (const char* up = std::getenv("ARTISM_UPDATE_GOLDEN"); up && std::string(up) == "1") {
        std::ofstream(path, std::ios::binary) << actual;
    }
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file; rerun with ARTISM_UPDATE_GOLDEN=1");
    std::stringstream expected;
    expected << in.rdbuf();
    CHECK(actual == expected.str());
}

TEST_CASE("private views start with the agent's sentinel") {
    auto cfg = testing::desk_config();
    auto sim = Simulation::create(cfg, make_gateway(cfg));
    for (const auto& [id, a] : sim->world().agents) CHECK(a.private_view.rfind(private_sentinel(id) + " ", 0) == 0);
}

TEST_CASE("motivation weights are normalized and bounded away from zero") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto w = draw_motivation(seed);
        CHECK(w.w_influence + w.w_controversy + w.w_consistency == doctest::Approx(1.0));
        for (double v : {w.w_influence, w.w_controversy, w.w_consistency}) CHECK(v >= 0.2 / 2.2 - 1e-12);
    }
}

TEST_CASE("perceive skips the agent's own posts and keeps user posts") {
    social::PostStore posts;
    posts.publish(post_by(posts, "me", 3, social::PostKind::artwork, "my work"));
    posts.publish(post_by(posts, "other", 3, social::PostKind::artwork, "their work"));
    posts.publish(post_by(posts, "user:ann", 3, social::PostKind::user_post, "a visitor note"));
    const auto agent = bare_agent("me");
    memory::MemoryStream stream("me");
    const PhraseMatcher terms({"work"});
    memory::HeuristicScorer scorer(terms);
    const auto feed = feed_slice(posts, 4, 20);
    REQUIRE(feed.size() == 3);
    const auto seen = perceive(agent, stream, feed, 4, scorer);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0].source_refs == std::vector<std::string>{"p-3-2"});
    CHECK(seen[0].content.find("a visitor note") != std::string::npos);
    CHECK(seen[1].source_refs == std::vector<std::string>{"p-3-1"});
    CHECK(seen[0].memory_id == "m-4-0");
    CHECK(seen[1].memory_id == "m-4-1");
    for (const auto& m : seen) CHECK(m.kind == memory::MemoryKind::observation);
    CHECK(feed_slice(posts, 5, 20).empty());
}

TEST_CASE("comment targets are earlier posts by others, newest first") {
    social::PostStore posts;
    for (Tick t = 0; t < 4; ++t) {
        posts.publish(post_by(posts, "me", t, social::PostKind::artwork, "mine"));
        posts.publish(post_by(posts, "other", t, social::PostKind::artwork, "theirs"));
    }
    const auto targets = comment_targets(posts, "me", 3, 5);
    REQUIRE(targets.size() == 3);
    for (const auto* p : targets) {
        CHECK(p->author_id == "other");
        CHECK(p->tick < 3);
    }
    CHECK(targets.front()->post_id == "p-2-1");
}

TEST_CASE("choose_action takes the argmax and idles below the threshold") {
    CHECK(choose_action({cand(ActionKind::CreateWork, 0.3), cand(ActionKind::PublishView, 0.5)}, 0.15).kind ==
          ActionKind::PublishView);
    const auto idle = choose_action({cand(ActionKind::CreateWork, 0.1), cand(ActionKind::PublishView, 0.14)}, 0.15);
    CHECK(idle.kind == ActionKind::Idle);
    CHECK_FALSE(idle.target_post_id.has_value());
    CHECK(choose_action({}, 0.15).kind == ActionKind::Idle);
    CHECK(choose_action({cand(ActionKind::PublishView, 0.15)}, 0.15).kind == ActionKind::PublishView);
}

TEST_CASE("ties prefer Comment, then CreateWork, then the smaller target id") {
    const auto d = choose_action({cand(ActionKind::PublishView, 0.4), cand(ActionKind::CreateWork, 0.4),
                                  cand(ActionKind::Comment, 0.4, "p-10-0"), cand(ActionKind::Comment, 0.4, "p-2-5")},
                                 0.15);
    CHECK(d.kind == ActionKind::Comment);
    CHECK(d.target_post_id == std::optional<std::string>("p-2-5"));
    CHECK(choose_action({cand(ActionKind::PublishView, 0.4), cand(ActionKind::CreateWork, 0.4)}, 0.15).kind ==
          ActionKind::CreateWork);
}

TEST_CASE("influence estimate is strictly increasing and below one") {
    double prev = -1;
    for (std::int64_t f = 0; f < 1000; ++f) {
        const auto v = influence_estimate(f);
        CHECK(v > prev);
        CHECK(v < 1.0);
        prev = v;
    }
    CHECK(influence_estimate(0) == 0.0);
    CHECK(influence_estimate(5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(influence_estimate(-1), Error);
}

TEST_CASE("a better-followed author makes a comment more attractive") {
    social::PostStore posts;
    posts.publish(post_by(posts, "other", 0, social::PostKind::artwork, "light and color"));
    const auto agent = bare_agent("me");
    const auto targets = comment_targets(posts, "me", 1, 5);
    const auto low = score_candidates(agent, {}, targets, {0});
    const auto high = score_candidates(agent, {}, targets, {10});
    CHECK(high[0].score > low[0].score);
    CHECK(low.size() == 3);
    CHECK(low[1].kind == ActionKind::CreateWork);
    CHECK(low[2].kind == ActionKind::PublishView);
}

TEST_CASE("reflection keeps exactly one sentinel and records one reflection memory") {
    auto cfg = testing::desk_config();
    auto sim = Simulation::create(cfg, make_gateway(cfg));
    sim->run(40);
    const auto reflected = of_kind(sim->log(), EventKind::Reflected);
    REQUIRE_FALSE(reflected.empty());
    for (const auto& e : reflected) {
        const auto id = e.payload.at("agent_id").get<std::string>();
        const auto view = e.payload.at("private_view").get<std::string>();
        const auto sentinel = private_sentinel(id);
        CHECK(view.rfind(sentinel + " ", 0) == 0);
        CHECK(view.find(sentinel, sentinel.size()) == std::string::npos);
        CHECK(e.payload.at("memory").at("kind") == "reflection");
    }
    for (const auto& [id, a] : sim->world().agents) {
        std::size_t reflections = 0;
        for (const auto& m : sim->world().memories.stream(id).records())
            if (m.kind == memory::MemoryKind::reflection) ++reflections;
        std::size_t events = 0;
        for (const auto& e : reflected)
            if (e.payload.at("agent_id") == id) ++events;
        CHECK(reflections == events);
    }
}

TEST_CASE("a failing create_work call becomes ActionFailed and the run continues") {
    auto cfg = testing::desk_config();
    auto sim = Simulation::create(cfg, testing::failing_gateway("create_work"));
    sim->run(15);
    CHECK(sim->world().tick == 15);
    const auto failed = of_kind(sim->log(), EventKind::ActionFailed);
    REQUIRE_FALSE(failed.empty());
    for (const auto& e : failed) {
        CHECK(e.payload.at("kind") == "CreateWork");
        CHECK(e.payload.at("error").get<std::string>().find("BackendTimeout") == 0);
    }
    for (const auto& p : sim->world().posts.all()) CHECK(p.kind != social::PostKind::artwork);
}

TEST_CASE("agents step in id order and comments only target earlier posts") {
    auto cfg = testing::desk_config();
    auto sim = Simulation::create(cfg, make_gateway(cfg));
    sim->run(100);
    std::map<Tick, std::vector<std::string>> order;
    for (const auto& e : of_kind(sim->log(), EventKind::Perceived))
        order[e.tick].push_back(e.payload.at("agent_id").get<std::string>());
    CHECK(order.size() == 100);
    for (const auto& [tick, ids] : order) {
        CHECK(ids.size() == sim->world().agents.size());
        CHECK(std::is_sorted(ids.begin(), ids.end()));
    }
    std::size_t comments = 0;
    for (const auto& p : sim->world().posts.all()) {
        if (p.kind != social::PostKind::comment) continue;
        ++comments;
        const auto* target = sim->world().posts.find(*p.reply_to);
        REQUIRE(target != nullptr);
        CHECK(target->tick < p.tick);
        CHECK(target->author_id != p.author_id);
    }
    CHECK(comments > 0);
}

TEST_CASE("agent state json round trip") {
    auto cfg = testing::desk_config();
    auto sim = Simulation::create(cfg, make_gateway(cfg));
    for (const auto& [_, a] : sim->world().agents) CHECK(Json(a).get<AgentState>() == a);
    ActionDecision d{ActionKind::Comment, std::string("p-1-0"), 0.5, "why"};
    CHECK(Json(d).get<ActionDecision>() == d);
}

}

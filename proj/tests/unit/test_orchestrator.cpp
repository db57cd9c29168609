#include <doctest.h>

#include <fstream>

#include "artism/error.hpp"
#include "artism/orchestrator.hpp"
#include "artism/text.hpp"
#include "fixtures.hpp"

using namespace artism;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::unique_ptr<Simulation> fresh(SimulationConfig cfg = testing::desk_config()) {
    return Simulation::create(cfg, make_gateway(cfg));
}

std::vector<EventLogEntry> of_kind(const std::vector<EventLogEntry>& log, EventKind kind) {
    std::vector<EventLogEntry> out;
    for (const auto& e : log)
        if (e.kind == kind) out.push_back(e);
    return out;
}

}  // namespace

TEST_SUITE("orchestrator") {

TEST_CASE("initialization registers the corpus and seeds the knowledge base") {
    auto sim = fresh();
    const auto& w = sim->world();
    CHECK(w.tick == 0);
    CHECK(w.agents.size() == 12);
    CHECK(w.posts.size() == 0);
    CHECK(w.kb.size() == 64);
    CHECK(w.kb.synthetic_ratio(0) == 0.0);
    CHECK(sim->log().entries().front().kind == EventKind::SimulationStarted);
    CHECK(sim->log().size() == 1 + 12 + 64);
    for (const auto& e : sim->log().entries()) CHECK(e.tick == 0);
}

TEST_CASE("a malformed KB seed or corpus record aborts initialization") {
    testing::TempDir dir;
    {
        std::ofstream kb(dir / "kb.jsonl");
        kb << R"({"term": "white cube", "definition": "d", "category": "terminology"})" << "\n" << "{oops\n";
    }
    auto cfg = testing::desk_config();
    cfg.kb_seed_path = dir / "kb.jsonl";
    CHECK(code_of([&] { fresh(cfg); }) == ErrorCode::MalformedRecord);

    {
        std::ofstream corpus(dir / "corpus.jsonl");
        std::ifstream src(testing::data_dir() / "sample_corpus.jsonl");
        corpus << src.rdbuf() << R"({"name": "No Id"})" << "\n";
    }
    cfg = testing::desk_config();
    cfg.corpus_path = dir / "corpus.jsonl";
    CHECK(code_of([&] { fresh(cfg); }) == ErrorCode::MissingField);

    cfg = testing::desk_config();
    cfg.corpus_path = dir / "missing.jsonl";
    CHECK(code_of([&] { fresh(cfg); }) == ErrorCode::FileUnreadable);
}

TEST_CASE("each tick ends with TickCompleted and harvests run on the period") {
    auto sim = fresh();
    for (Tick t = 0; t < 21; ++t) {
        const auto events = sim->tick();
        REQUIRE_FALSE(events.empty());
        CHECK(events.back().kind == EventKind::TickCompleted);
        const bool harvested = !of_kind(events, EventKind::HarvestStarted).empty();
        CHECK(harvested == (t > 0 && t % 10 == 0));
        for (const auto& e : events) CHECK(e.tick == t);
    }
    CHECK(sim->world().tick == 21);
}

TEST_CASE("harvests coin, critique, feed back and assign every ism") {
    auto sim = fresh();
    sim->run(41);
    const auto& log = sim->log().entries();
    const auto& w = sim->world();
    REQUIRE_FALSE(w.isms.isms().empty());
    for (const auto& h : of_kind(log, EventKind::HarvestStarted)) {
        CHECK(h.payload.at("window_to") == h.tick);
        CHECK(h.payload.at("window_from") == h.tick - 10);
    }
    for (Tick t : {10, 20, 30, 40}) {
        std::size_t coined = 0;
        for (const auto& i : w.isms.isms())
            if (i.created_tick == t) ++coined;
        CHECK(coined <= 3);
    }
    for (const auto& ism : w.isms.isms()) {
        CHECK(ism.assigned_agent.has_value());
        CHECK(ism.image_prompt == ismism::to_image_prompt(ism));
        REQUIRE(ism.critiques.size() == 1);
        const auto* c = w.isms.find_critique(ism.critiques[0]);
        REQUIRE(c != nullptr);
        REQUIRE(c->fed_back_entry.has_value());
        const auto* e = w.kb.find(*c->fed_back_entry);
        REQUIRE(e != nullptr);
        CHECK(e->origin == ismism::Origin::synthetic);
        CHECK(e->generation >= 1);
        CHECK(e->created_tick == ism.created_tick);
        for (const auto& u : ism.units) CHECK(std::find(e->source_refs.begin(), e->source_refs.end(), u.origin_entry) != e->source_refs.end());
    }
    for (const auto& e : w.kb.entries())
        if (e.origin == ismism::Origin::human) CHECK(e.created_tick == 0);
}

TEST_CASE("coupling goes to the highest affinity, ties to the smallest agent id") {
    auto sim = fresh();
    sim->run(31);
    const auto assigned = of_kind(sim->log().entries(), EventKind::IsmAssigned);
    REQUIRE_FALSE(assigned.empty());
    for (const auto& e : assigned) {
        const auto* ism = sim->world().isms.find_ism(e.payload.at("ism_id").get<std::string>());
        REQUIRE(ism != nullptr);
        const auto scores = sim->affinities(ism->units);
        double best = -1;
        std::string expected;
        for (const auto& [id, s] : scores)
            if (s > best || (s == best && id < expected)) {
                best = s;
                expected = id;
            }
        CHECK(e.payload.at("agent_id") == expected);
        CHECK(e.payload.at("affinity").get<double>() == doctest::Approx(best));
    }
}

TEST_CASE("assigned isms reach the agent's attributes and later prompts") {
    auto cfg = testing::desk_config();
    cfg.prompt_audit = true;
    auto sim = fresh(cfg);
    sim->run(21);
    const auto& w = sim->world();
    REQUIRE_FALSE(w.isms.isms().empty());
    const auto& ism = w.isms.isms().front();
    const auto& a = w.agent(*ism.assigned_agent);
    CHECK(std::find(a.profile.attributes.begin(), a.profile.attributes.end(), ism.name) != a.profile.attributes.end());
    bool seen_in_prompt = false;
    for (const auto& e : of_kind(sim->log().entries(), EventKind::PromptAudit))
        if (e.tick > ism.created_tick && e.payload.at("agent_id") == a.id() &&
            e.payload.at("prompt").get<std::string>().find(ism.name) != std::string::npos)
            seen_in_prompt = true;
    CHECK(seen_in_prompt);
}

TEST_CASE("with coupling disabled nothing is harvested") {
    auto cfg = testing::desk_config();
    cfg.coupling_enabled = false;
    auto sim = fresh(cfg);
    sim->run(30);
    CHECK(sim->world().isms.isms().empty());
    CHECK(sim->world().kb.size() == 64);
    CHECK(of_kind(sim->log().entries(), EventKind::HarvestStarted).empty());
}

TEST_CASE("replaying the log reproduces the live state at every harvest boundary") {
    auto sim = fresh();
    for (int block = 0; block < 5; ++block) {
        sim->run(10);
        const auto replayed = replay(sim->log().entries());
        CHECK(canonical_dump(replayed.to_json()) == canonical_dump(sim->world().to_json()));
    }
    const auto cfg = testing::desk_config();
    auto rebuilt = Simulation::from_log(cfg, make_gateway(cfg), sim->log());
    rebuilt->run(5);
    sim->run(5);
    CHECK(rebuilt->log().hash_hex() == sim->log().hash_hex());
}

TEST_CASE("a resumed snapshot continues exactly like the uninterrupted run") {
    const auto cfg = testing::desk_config();
    auto full = fresh();
    full->run(60);

    auto part = fresh();
    part->run(50);
    const auto text = snapshot(part->world());
    SnapshotHeader header;
    auto restored = restore(text, &header);
    CHECK(header.tick == 50);
    CHECK(header.log_seq == part->log().size());
    auto resumed = Simulation::resume(cfg, make_gateway(cfg), std::move(restored));
    resumed->run(10);
    CHECK(canonical_dump(resumed->world().to_json()) == canonical_dump(full->world().to_json()));
    const auto& tail = resumed->log().entries();
    const auto& whole = full->log().entries();
    REQUIRE(header.log_seq + tail.size() == whole.size());
    for (std::size_t i = 0; i < tail.size(); ++i) CHECK(tail[i] == whole[header.log_seq + i]);

    auto other = cfg;
    other.global_seed = 7;
    CHECK(code_of([&] { Simulation::resume(other, make_gateway(other), restore(text)); }) == ErrorCode::ConfigError);
}

TEST_CASE("truncated or altered snapshots are SnapshotCorrupt") {
    auto sim = fresh();
    sim->run(3);
    const auto text = snapshot(sim->world());
    CHECK(code_of([&] { restore(text.substr(0, text.size() / 2)); }) == ErrorCode::SnapshotCorrupt);
    auto tampered = text;
    tampered[text.find("\"tick\"") + 7] = '9';
    CHECK(code_of([&] { restore(tampered); }) == ErrorCode::SnapshotCorrupt);
    CHECK(code_of([&] { restore(""); }) == ErrorCode::SnapshotCorrupt);

    testing::TempDir dir;
    write_snapshot(dir / "s.json", sim->world());
    CHECK(canonical_dump(read_snapshot(dir / "s.json").to_json()) == canonical_dump(sim->world().to_json()));
}

TEST_CASE("log hashing") {
    CHECK(canonical_log_hash({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    auto sim = fresh();
    sim->run(1);
    auto entries = sim->log().entries();
    CHECK(canonical_log_hash(entries) == sim->log().hash_hex());
    std::swap(entries[1], entries[2]);
    CHECK(canonical_log_hash(entries) != sim->log().hash_hex());

    testing::TempDir dir;
    sim->log().write_jsonl(dir / "events.jsonl");
    CHECK(EventLog::read_jsonl(dir / "events.jsonl").hash_hex() == sim->log().hash_hex());
}

TEST_CASE("dialogue errors and session continuity") {
    auto sim = fresh();
    sim->run(2);
    const auto agent = sim->world().roster.front();
    CHECK(code_of([&] { sim->user_message("nobody", "ann", "hi"); }) == ErrorCode::UnknownAgent);
    CHECK(code_of([&] { sim->user_message(agent, "ann", "hi", std::string("s-404")); }) == ErrorCode::UnknownSession);
    CHECK(code_of([&] { sim->user_message(agent, "ann", "   "); }) == ErrorCode::InvalidArgument);

    const auto first = sim->user_message(agent, "ann", "What do you paint?");
    CHECK(first.session_id == "s-1");
    CHECK_FALSE(first.reply.empty());
    const auto second = sim->user_message(agent, "ann", "And why?", first.session_id);
    CHECK(second.session.transcript.size() == 4);
    const auto& mem = sim->world().memories.stream(agent).records();
    CHECK(mem.back().kind == memory::MemoryKind::dialogue);
    CHECK(mem.back().content.find("SESS-s-1") != std::string::npos);

    const auto cfg = testing::desk_config();
    auto broken = Simulation::create(cfg, testing::failing_gateway("dialogue_reply"));
    CHECK(code_of([&] { broken->user_message(agent, "ann", "hello"); }) == ErrorCode::ReplyUnavailable);
    CHECK(broken->log().entries().back().kind == EventKind::DialogueFailed);
}

TEST_CASE("user posts become visible to agents on the next tick") {
    auto sim = fresh();
    sim->run(3);
    const auto id = sim->publish_user_post("ann", "Where is the light in the white cube?");
    CHECK(code_of([&] { sim->publish_user_post("ann", "  "); }) == ErrorCode::InvalidPost);
    const auto* post = sim->world().posts.find(id);
    REQUIRE(post != nullptr);
    CHECK(post->tick == 3);
    CHECK(post->provenance == social::Provenance::user_authored);

    auto perceived_at = [&](const std::vector<EventLogEntry>& events) {
        std::size_t n = 0;
        for (const auto& e : of_kind(events, EventKind::Perceived))
            for (const auto& m : e.payload.at("memories"))
                for (const auto& r : m.at("source_refs"))
                    if (r == id) ++n;
        return n;
    };
    CHECK(perceived_at(sim->tick()) == 0);
    CHECK(perceived_at(sim->tick()) == sim->world().agents.size());
}

}

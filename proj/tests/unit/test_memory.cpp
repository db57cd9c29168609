#include <doctest.h>

#include <random>

#include "artism/error.hpp"
#include "artism/memory.hpp"
#include "artism/text.hpp"
#include "oracles.hpp"

using namespace artism;
using namespace artism::memory;

namespace {

MemoryRecord put(MemoryStream& s, Tick tick, double importance, double salience = 0.0) {
    return s.append(s.draft(tick, MemoryKind::observation, "x", {}, {importance, salience}));
}

}  // namespace

TEST_SUITE("memory") {

TEST_CASE("memory ids follow m-<tick>-<n>") {
    MemoryStream s("a");
    CHECK(put(s, 0, 0).memory_id == "m-0-0");
    CHECK(put(s, 0, 0).memory_id == "m-0-1");
    CHECK(put(s, 3, 0).memory_id == "m-3-0");
    // drafts count pending records that are not yet appended
    CHECK(s.draft(3, MemoryKind::action, "y", {}, {}, 2).memory_id == "m-3-3");
}

TEST_CASE("appending before the last tick is a TickRegression") {
    MemoryStream s("a");
    put(s, 5, 0);
    try {
        put(s, 3, 0);
        FAIL("expected TickRegression");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TickRegression);
    }
}

TEST_CASE("heuristic scorer: salience is the affect hit ratio, importance counts knowledge terms") {
    PhraseMatcher terms({"white cube", "hollow form", "absence", "aura", "frame", "object"});
    HeuristicScorer scorer(terms);
    const auto& lex = text::affect_lexicon();
    const std::string s = lex[0] + " " + lex[1] + " " + lex[2] + " a b c d e f g";
    CHECK(scorer.score(s).salience == doctest::Approx(0.3));
    CHECK(scorer.score("white cube and hollow forms").importance == doctest::Approx(0.4));
    CHECK(scorer.score("white cube hollow form absence aura frame object").importance == 1.0);
}

TEST_CASE("recency halves every half_life") {
    CHECK(recency_score(10, 10, 16) == 1.0);
    CHECK(recency_score(16, 0, 16) == doctest::Approx(0.5));
    CHECK(recency_score(32, 0, 16) == doctest::Approx(0.25));
    CHECK_THROWS_AS(recency_score(0, 1, 16), Error);
}

TEST_CASE("score_memory is a weighted mean") {
    MemoryRecord m;
    m.tick = 0;
    m.importance = 0.2;
    m.salience = 0.1;
    // recency 0.9 would need a fractional exponent; use half_life so that recency is exactly 0.5
    // and check the arithmetic mean against the hand value.
    RetrievalWeights w{1, 1, 1, 16};
    CHECK(score_memory(m, 16, w) == doctest::Approx((0.5 + 0.2 + 0.1) / 3));
    CHECK(score_memory(m, 16, {1, 0, 0, 16}) == recency_score(16, 0, 16));
    m.importance = 0.7;
    CHECK(score_memory(m, 16, {0, 1, 0, 16}) == doctest::Approx(0.7));
}

TEST_CASE("weights must be non-negative with a positive sum") {
    CHECK_THROWS_AS((RetrievalWeights{0, 0, 0, 16}.validate()), Error);
    CHECK_THROWS_AS((RetrievalWeights{-1, 1, 1, 16}.validate()), Error);
    CHECK_THROWS_AS((RetrievalWeights{1, 1, 1, 0}.validate()), Error);
    CHECK_NOTHROW((RetrievalWeights{}.validate()));
}

TEST_CASE("retrieve_top_k returns everything when k exceeds the stream") {
    MemoryStream s("a");
    put(s, 0, 0.1);
    put(s, 1, 0.2);
    CHECK(s.retrieve_top_k(2, 5, {}).size() == 2);
}

TEST_CASE("equal scores break ties toward the newer tick") {
    MemoryStream s("a");
    put(s, 4, 0.5);
    put(s, 7, 0.5);
    const auto top = s.retrieve_top_k(7, 2, {0, 1, 0, 16});
    REQUIRE(top.size() == 2);
    CHECK(top[0].tick == 7);
}

TEST_CASE("retrieval matches the brute-force sort oracle on random streams") {
    std::mt19937_64 rng(20240601);
    int mismatches = 0;
    for (int trial = 0; trial < 400; ++trial) {
        Tick now = 0;
        const auto s = oracle::random_stream(rng, trial < 200 ? 64 : 256, &now);
        const auto w = oracle::random_weights(rng);
        const std::size_t k = 1 + rng() % 12;
        if (s.retrieve_top_k(now, k, w) != oracle::top_k(s.records(), now, k, w)) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("with recency only, retrieval is newest first") {
    MemoryStream s("a");
    for (Tick t = 0; t < 30; ++t) put(s, t, (t % 7) / 7.0);
    const auto top = s.retrieve_top_k(30, 10, {1, 0, 0, 16});
    for (std::size_t i = 1; i < top.size(); ++i) CHECK(top[i - 1].tick > top[i].tick);
}

TEST_CASE("score_memory stays within [0, 1]") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        Tick now = 0;
        const auto s = oracle::random_stream(rng, 32, &now);
        const auto w = oracle::random_weights(rng);
        for (const auto& m : s.records()) {
            const auto v = score_memory(m, now, w);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("reflection trigger sums importance since the last reflection") {
    MemoryStream s("a");
    CHECK_FALSE(s.should_reflect(5.0));
    put(s, 0, 0.9);
    put(s, 0, 0.9);
    CHECK_FALSE(s.should_reflect(5.0));
    MemoryStream t("b");
    for (int i = 0; i < 6; ++i) put(t, 1, 1.0);
    CHECK(t.should_reflect(5.0));
    t.mark_reflection();
    CHECK_FALSE(t.should_reflect(5.0));
    CHECK(t.importance_since_reflection() == 0.0);
}

TEST_CASE("appends never modify earlier records") {
    MemoryStream s("a");
    put(s, 0, 0.3);
    const auto first = s.records().front();
    for (int i = 0; i < 50; ++i) put(s, i, 0.1);
    CHECK(s.records().front() == first);
}

TEST_CASE("memory record json round trip") {
    MemoryStream s("a");
    const auto m = s.append(s.draft(2, MemoryKind::reflection, "text", {"p-1-0"}, {0.25, 0.5}));
    CHECK(Json(m).get<MemoryRecord>() == m);
}

}

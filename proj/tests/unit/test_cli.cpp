#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "artism/api.hpp"
#include "artism/cli.hpp"
#include "artism/events.hpp"
#include "artism/world.hpp"
#include "fixtures.hpp"

using namespace artism;
using artism::testing::TempDir;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome artism_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string corpus_file() { return (testing::data_dir() / "sample_corpus.jsonl").string(); }
std::string kb_file() { return (testing::data_dir() / "kb_seed.jsonl").string(); }

std::size_t line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 1, help exits 0") {
    CHECK(artism_cli({}).code == cli::kUsage);
    CHECK(artism_cli({"frobnicate"}).code == cli::kUsage);
    CHECK(artism_cli({"run"}).code == cli::kUsage);
    CHECK(artism_cli({"run", "--out", "/tmp/x", "--ticks", "many"}).code == cli::kUsage);
    CHECK(artism_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("ingest writes normalized profiles, the KB and a report") {
    TempDir dir;
    const auto r = artism_cli({"ingest", "--corpus", corpus_file(), "--kb", kb_file(), "--out", dir.path().string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("12 profiles") != std::string::npos);
    CHECK(line_count(dir / "profiles.jsonl") == 12);
    CHECK(line_count(dir / "kb.jsonl") == 64);
    CHECK(slurp(dir / "report.txt").find("0 rejected") != std::string::npos);
}

TEST_CASE("ingest reports rejects and fails under --strict") {
    TempDir dir;
    {
        std::ofstream c(dir / "corpus.jsonl");
        c << slurp(corpus_file()) << R"({"name": "Nameless"})" << "\n";
    }
    const auto lenient = artism_cli({"ingest", "--corpus", (dir / "corpus.jsonl").string(), "--kb", kb_file(), "--out",
                                     (dir / "a").string()});
    CHECK(lenient.code == cli::kOk);
    CHECK(lenient.out.find("1 rejected") != std::string::npos);
    CHECK(lenient.out.find("MissingField") != std::string::npos);
    const auto strict = artism_cli({"ingest", "--corpus", (dir / "corpus.jsonl").string(), "--kb", kb_file(), "--out",
                                    (dir / "b").string(), "--strict"});
    CHECK(strict.code == cli::kDataError);
    CHECK(artism_cli({"ingest", "--corpus", "/nonexistent.jsonl", "--kb", kb_file(), "--out", (dir / "c").string()}).code ==
          cli::kDataError);
}

TEST_CASE("run is deterministic and its config file reproduces the run") {
    TempDir dir;
    const auto a = artism_cli({"run", "--ticks", "12", "--out", (dir / "a").string()});
    const auto b = artism_cli({"run", "--ticks", "12", "--out", (dir / "b").string()});
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out.find("log_hash: ") != std::string::npos);
    CHECK(a.out == b.out);
    CHECK(slurp(dir / "a" / "events.jsonl") == slurp(dir / "b" / "events.jsonl"));

    const auto again = artism_cli({"run", "--config", (dir / "a" / "config.conf").string(), "--out", (dir / "c").string()});
    CHECK(again.out == a.out);

    const auto other = artism_cli({"run", "--ticks", "12", "--seed", "7", "--out", (dir / "d").string()});
    CHECK(other.out != a.out);

    const auto log = EventLog::read_jsonl(dir / "a" / "events.jsonl");
    CHECK(a.out.find(log.hash_hex()) != std::string::npos);
    CHECK(read_snapshot(dir / "a" / "snapshot.json").tick == 12);
}

TEST_CASE("a bad configuration exits 3") {
    TempDir dir;
    std::ofstream(dir / "bad.conf") << "top_k = -4\n";
    CHECK(artism_cli({"run", "--config", (dir / "bad.conf").string(), "--out", (dir / "o").string()}).code ==
          cli::kRuntimeError);
    std::ofstream(dir / "unknown.conf") << "colour = blue\n";
    CHECK(artism_cli({"run", "--config", (dir / "unknown.conf").string(), "--out", (dir / "o").string()}).code ==
          cli::kRuntimeError);
    CHECK(artism_cli({"run", "--config", (dir / "missing.conf").string(), "--out", (dir / "o").string()}).code ==
          cli::kRuntimeError);
}

TEST_CASE("export writes each stream in chronological order") {
    TempDir dir;
    REQUIRE(artism_cli({"run", "--ticks", "21", "--out", dir.path().string()}).code == cli::kOk);
    for (const std::string what : {"timeline", "feed", "kb"}) {
        const auto r = artism_cli({"export", "--state", dir.path().string(), "--what", what});
        CHECK(r.code == cli::kOk);
        CHECK(r.out.find(" records -> ") != std::string::npos);
        std::ifstream in(dir / (what + ".jsonl"));
        std::int64_t prev = -1;
        std::size_t rows = 0;
        for (std::string line; std::getline(in, line); ++rows) {
            const auto j = Json::parse(line);
            const auto tick = j.contains("tick") ? j.at("tick").get<std::int64_t>() : j.at("created_tick").get<std::int64_t>();
            CHECK(tick >= prev);
            prev = tick;
        }
        CHECK(rows > 0);
    }
    CHECK(artism_cli({"export", "--state", dir.path().string(), "--what", "memories"}).code == cli::kDataError);
    CHECK(artism_cli({"export", "--state", dir.path().string(), "--what", "kb", "--format", "csv"}).code ==
          cli::kDataError);
    CHECK(artism_cli({"export", "--state", (dir / "nope").string(), "--what", "kb"}).code == cli::kDataError);
}

TEST_CASE("serve refuses a corrupt snapshot and a busy port") {
    TempDir dir;
    REQUIRE(artism_cli({"run", "--ticks", "12", "--out", dir.path().string()}).code == cli::kOk);
    const auto snap = slurp(dir / "snapshot.json");
    std::ofstream(dir / "snapshot.json", std::ios::binary) << snap.substr(0, snap.size() / 2);
    CHECK(artism_cli({"serve", "--state", dir.path().string(), "--port", "0"}).code == cli::kDataError);

    auto cfg = testing::desk_config();
    api::Service svc(Simulation::create(cfg, make_gateway(cfg)));
    api::Server holder(svc, {"127.0.0.1", 0, std::nullopt});
    REQUIRE(holder.bind());
    const auto busy = artism_cli({"serve", "--port", std::to_string(holder.port())});
    CHECK(busy.code == cli::kRuntimeError);
}

}

#include "artism/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include <CLI11.hpp>

#include "artism/api.hpp"
#include "artism/corpus.hpp"
#include "artism/error.hpp"
#include "artism/ismism.hpp"
#include "artism/orchestrator.hpp"

#ifndef ARTISM_SOURCE_DATA_DIR
#define ARTISM_SOURCE_DATA_DIR "data"
#endif

namespace artism::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

void write_lines(const fs::path& path, const std::vector<Json>& rows) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::FileUnreadable, "cannot write " + path.string());
    for (const auto& r : rows) f << canonical_dump(r) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::FileUnreadable, "cannot write " + path.string());
    f << text;
}

SimulationConfig config_for(const std::optional<fs::path>& path) {
    return path ? load_config(*path) : default_config(data_dir());
}

// Rebuilds a simulation from a state directory written by `run` (or a previous `serve`).
std::unique_ptr<Simulation> load_state(const fs::path& state, const std::optional<fs::path>& config) {
    const auto cfg = load_config(config ? *config : state / "config.conf");
    auto sim = Simulation::from_log(cfg, make_gateway(cfg), EventLog::read_jsonl(state / "events.jsonl"));
    if (fs::exists(state / "snapshot.json")) {
        const auto snap = read_snapshot(state / "snapshot.json");
        if (snap.applied != sim->world().applied || snap.to_json() != sim->world().to_json())
            fail(ErrorCode::SnapshotCorrupt, "snapshot.json disagrees with events.jsonl");
    }
    return sim;
}

WorldState load_world(const fs::path& state) {
    if (fs::exists(state / "snapshot.json")) return read_snapshot(state / "snapshot.json");
    if (fs::exists(state / "events.jsonl")) return replay(EventLog::read_jsonl(state / "events.jsonl").entries());
    fail(ErrorCode::FileUnreadable, "no snapshot.json or events.jsonl in " + state.string());
}

}  // namespace

fs::path data_dir() {
    if (const char* d = std::getenv("ARTISM_DATA_DIR"); d && *d) return d;
    return ARTISM_SOURCE_DATA_DIR;
}

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
    try {
        const auto corpus = corpus::load_corpus(a.corpus);
        const auto kb = ismism::read_kb_seed(a.kb.string());
        fs::create_directories(a.out);

        std::vector<Json> profiles(corpus.profiles.begin(), corpus.profiles.end());
        write_lines(a.out / "profiles.jsonl", profiles);
        std::vector<Json> entries(kb.begin(), kb.end());
        write_lines(a.out / "kb.jsonl", entries);

        std::ostringstream report;
        report << corpus.profiles.size() << " profiles\n";
        report << kb.size() << " kb entries\n";
        report << corpus.rejected_count() << " rejected\n";
        for (const auto& r : corpus.reports)
            report << (r.rejected ? "reject" : "warn") << " line " << r.line << ": " << to_string(r.code) << ": "
                   << r.message << '\n';
        write_text(a.out / "report.txt", report.str());
        out << report.str();
        if (a.strict && corpus.rejected_count() > 0) {
            err << "strict mode: " << corpus.rejected_count() << " rejected record(s)\n";
            return kDataError;
        }
        return kOk;
    } catch (const Error& e) {
        err << "ingest: " << e.what() << '\n';
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        err << "ingest: " << e.what() << '\n';
        return kDataError;
    }
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    std::unique_ptr<Simulation> sim;
    SimulationConfig cfg;
    try {
        cfg = config_for(a.config);
        if (a.seed) cfg.global_seed = *a.seed;
        if (a.ticks) cfg.ticks = *a.ticks;
        if (a.audit) cfg.prompt_audit = true;
        cfg.validate();
        sim = Simulation::create(cfg, make_gateway(cfg));
    } catch (const std::exception& e) {
        err << "run: initialization failed: " << e.what() << '\n';
        return kRuntimeError;
    }
    try {
        sim->run(cfg.ticks);
        fs::create_directories(a.out);
        sim->log().write_jsonl(a.out / "events.jsonl");
        write_snapshot(a.out / "snapshot.json", sim->world());
        write_text(a.out / "config.conf", cfg.to_config_text());
        out << "log_hash: " << sim->log().hash_hex() << '\n';
        return kOk;
    } catch (const std::exception& e) {
        err << "run: " << e.what() << '\n';
        return kRuntimeError;
    }
}

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    std::unique_ptr<Simulation> sim;
    try {
        if (a.state && fs::exists(*a.state / "events.jsonl")) {
            sim = load_state(*a.state, a.config);
        } else {
            const auto cfg = config_for(a.config);
            sim = Simulation::create(cfg, make_gateway(cfg));
        }
    } catch (const Error& e) {
        err << "serve: " << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError ? kRuntimeError : kDataError;
    } catch (const std::exception& e) {
        err << "serve: " << e.what() << '\n';
        return kRuntimeError;
    }

    // Keep the effective configuration next to the log so the state directory reloads as-is.
    const auto cfg_text = sim->config().to_config_text();
    api::Service service(std::move(sim), api::Options{a.debug});
    api::ServeOptions opts;
    opts.host = a.host;
    opts.port = a.port ? *a.port : api::port_from_env();
    opts.ui_dir = a.ui;
    api::Server server(service, opts);
    if (!server.bind()) {
        err << "serve: cannot bind " << opts.host << ":" << opts.port << '\n';
        return kRuntimeError;
    }

    g_interrupted = false;
    auto prev_int = std::signal(SIGINT, on_signal);
    auto prev_term = std::signal(SIGTERM, on_signal);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
        while (!done && !g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
    });
    out << "listening on http://" << opts.host << ":" << server.port() << std::endl;
    server.listen();
    done = true;
    watcher.join();
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);

    if (a.state) {
        try {
            service.persist(*a.state);
            write_text(*a.state / "config.conf", cfg_text);
        } catch (const std::exception& e) {
            err << "serve: flush failed: " << e.what() << '\n';
            return kRuntimeError;
        }
    }
    out << "stopped" << std::endl;
    return kOk;
}

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
    if (a.what != "timeline" && a.what != "feed" && a.what != "kb") {
        err << "export: unknown target '" << a.what << "' (timeline, feed, kb)\n";
        return kDataError;
    }
    if (a.format != "jsonl") {
        err << "export: unknown format '" << a.format << "' (jsonl)\n";
        return kDataError;
    }
    try {
        const auto w = load_world(a.state);
        std::vector<Json> rows;
        if (a.what == "timeline") {
            for (const auto& it :
                 ismism::timeline_query(w.kb, w.isms, 0, std::numeric_limits<std::int64_t>::max()))
                rows.push_back({{"tick", it.tick}, {"kind", it.kind}, {"id", it.id}, {"payload", it.payload}});
        } else if (a.what == "feed") {
            for (const auto& p : w.posts.all()) rows.emplace_back(p);
        } else {
            for (const auto& e : w.kb.entries()) rows.emplace_back(e);
        }
        const auto path = a.state / (a.what + ".jsonl");
        write_lines(path, rows);
        out << rows.size() << " records -> " << path.string() << '\n';
        return kOk;
    } catch (const std::exception& e) {
        err << "export: " << e.what() << '\n';
        return kDataError;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Artism: artist agents and an ism engine in one deterministic loop", "artism"};
    app.require_subcommand(1);

    IngestArgs ia;
    auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus and KB seed");
    ingest->add_option("--corpus", ia.corpus, "Artist corpus (JSONL)")->required();
    ingest->add_option("--kb", ia.kb, "KB seed (JSONL)")->required();
    ingest->add_option("--out", ia.out, "Output directory")->required();
    ingest->add_flag("--strict", ia.strict, "Exit 2 if any record is rejected");

    RunArgs ra;
    std::uint64_t seed = 0;
    std::int64_t ticks = 0;
    auto* run = app.add_subcommand("run", "Run headless and write the event log and snapshot");
    auto* config_opt = run->add_option("--config", "Config file (key = value)");
    auto* seed_opt = run->add_option("--seed", seed, "Global seed (overrides config)");
    auto* ticks_opt = run->add_option("--ticks", ticks, "Tick budget (overrides config)");
    run->add_option("--out", ra.out, "Output directory")->required();
    run->add_flag("--audit", ra.audit, "Record rendered prompts (PromptAudit events)");

    ServeArgs sa;
    int port = 0;
    auto* serve = app.add_subcommand("serve", "Serve /api/v1 over a state directory or a fresh world");
    auto* state_opt = serve->add_option("--state", "State directory (from run); persisted on shutdown");
    auto* serve_config = serve->add_option("--config", "Config file (for a fresh world)");
    auto* port_opt = serve->add_option("--port", port, "Port (default ARTISM_PORT or 8646; 0 picks one)");
    serve->add_option("--host", sa.host, "Bind address");
    auto* ui_opt = serve->add_option("--ui", "Static UI directory mounted at /");
    serve->add_flag("--debug", sa.debug, "Expose private views and memories");

    ExportArgs ea;
    auto* exp = app.add_subcommand("export", "Export a stream from a state directory");
    exp->add_option("--state", ea.state, "State directory")->required();
    exp->add_option("--what", ea.what, "timeline | feed | kb")->required();
    exp->add_option("--format", ea.format, "jsonl");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << "run with --help for usage\n";
        return kUsage;
    }

    if (*ingest) return cmd_ingest(ia, out, err);
    if (*run) {
        if (*config_opt) ra.config = config_opt->as<std::string>();
        if (*seed_opt) ra.seed = seed;
        if (*ticks_opt) ra.ticks = ticks;
        return cmd_run(ra, out, err);
    }
    if (*serve) {
        if (*state_opt) sa.state = state_opt->as<std::string>();
        if (*serve_config) sa.config = serve_config->as<std::string>();
        if (*port_opt) sa.port = port;
        if (*ui_opt) sa.ui = ui_opt->as<std::string>();
        return cmd_serve(sa, out, err);
    }
    return cmd_export(ea, out, err);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"artism"};
    for (const auto& s : args) argv.push_back(s.c_str());
    return main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace artism::cli

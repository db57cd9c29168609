#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "artism/canonical.hpp"
#include "artism/orchestrator.hpp"

namespace artism::api {

inline constexpr const char* kBasePath = "/api/v1";
inline constexpr int kDefaultPort = 8646;
inline constexpr std::int64_t kMaxStep = 1000;

struct Response {
    int status = 200;
    Json body;
};

using Query = std::map<std::string, std::string>;

struct Options {
    /// Enables GET /agents/{id}/private and /agents/{id}/memories.
    bool debug = false;
};

/// HTTP-independent router over a Simulation. Every 2xx body is an envelope
/// {data, generated, provenance {origin, source_ids}, server_tick}; errors are
/// {error {code, message}, server_tick}. Reads share a lock; mutations take it exclusively,
/// and a step in progress makes further step requests fail with 409.
class Service {
public:
    explicit Service(std::unique_ptr<Simulation> sim, Options options = {});

    /// `path` includes the /api/v1 prefix.
    Response handle(const std::string& method, const std::string& path, const Query& query, const std::string& body);

    /// Writes events.jsonl and snapshot.json into `dir` under a shared lock.
    void persist(const std::filesystem::path& dir) const;

    /// Runs `f` with shared access to the simulation.
    void with_simulation(const std::function<void(const Simulation&)>& f) const;

    bool stepping() const { return stepping_.load(); }

private:
    Response route(const std::string& method, const std::vector<std::string>& parts, const Query& query,
                   const std::string& body);
    Response get_feed(const Query& q);
    Response get_agents();
    Response get_agent(const std::string& id);
    Response get_private(const std::string& id);
    Response get_memories(const std::string& id, const Query& q);
    Response post_dialogue(const std::string& id, const std::string& body);
    Response post_user_post(const std::string& body);
    Response get_isms();
    Response get_ism(const std::string& id);
    Response get_timeline(const Query& q);
    Response post_step(const std::string& body);
    Response get_status();

    Json status_json() const;
    std::int64_t server_tick() const;

    std::unique_ptr<Simulation> sim_;
    Options options_;
    mutable std::shared_mutex mutex_;
    std::atomic<bool> stepping_{false};
};

/// Envelope helper: {data, generated, provenance {origin, source_ids}, server_tick}.
Json envelope(Json data, bool generated, std::optional<std::string> origin, std::vector<std::string> source_ids,
              std::int64_t server_tick);

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = kDefaultPort;
    /// Static UI directory mounted at "/" when set.
    std::optional<std::filesystem::path> ui_dir;
};

class Server {
public:
    Server(Service& service, ServeOptions options);
    ~Server();
    /// Binds the socket; false when the port is unavailable. A port of 0 picks a free one.
    bool bind();
    /// Blocks until stop().
    void listen();
    void stop();
    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

/// ARTISM_PORT if set and valid, else the default port.
int port_from_env();

}  // namespace artism::api

#include "artism/api.hpp"

#include <charconv>
#include <cstdlib>
#include <mutex>
#include <set>

#include <httplib.h>

#include "artism/error.hpp"
#include "artism/text.hpp"

namespace artism::api {

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const auto j = path.find('/', i);
        const auto end = j == std::string::npos ? path.size() : j;
        if (end > i) parts.push_back(path.substr(i, end - i));
        i = end;
    }
    return parts;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
}

Json error_body(const std::string& code, const std::string& message, std::int64_t tick) {
    return Json{{"error", {{"code", code}, {"message", message}}}, {"server_tick", tick}};
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownAgent:
        case ErrorCode::UnknownIsm:
        case ErrorCode::UnknownCritique:
        case ErrorCode::UnknownSession: return 404;
        case ErrorCode::ReplyUnavailable:
        case ErrorCode::BackendTimeout:
        case ErrorCode::BackendRefused: return 503;
        default: return 400;
    }
}

Json post_item(const social::PublicPost& p) {
    Json j = p;
    j["generated"] = p.provenance == social::Provenance::agent_generated;
    return j;
}

std::set<std::string> ism_names_of(const WorldState& w, const std::string& agent_id) {
    std::set<std::string> out;
    for (const auto& i : w.isms.isms())
        if (i.assigned_agent == agent_id) out.insert(i.name);
    return out;
}

// Public projection: everything except the private view and memories.
Json agent_item(const WorldState& w, const agent::AgentState& a) {
    const auto isms = ism_names_of(w, a.id());
    Json assigned = Json::array();
    for (const auto& i : w.isms.isms())
        if (i.assigned_agent == a.id()) assigned.push_back(i.ism_id);
    Json generated_attributes = Json::array();
    for (const auto& attr : a.profile.attributes)
        if (isms.count(attr)) generated_attributes.push_back(attr);
    return Json{{"agent_id", a.id()},
                {"display_name", a.profile.display_name},
                {"era_label", a.profile.era_label},
                {"reference_text", a.profile.reference_text},
                {"style_keywords", a.profile.style_keywords},
                {"attributes", a.profile.attributes},
                {"generated_attributes", generated_attributes},
                {"assigned_isms", assigned},
                {"followers_count", a.followers_count},
                {"generated", !generated_attributes.empty()}};
}

Json ism_item(const ismism::Ism& i) {
    Json j = i;
    j["generated"] = true;
    return j;
}

Json parse_body(const std::string& body) {
    try {
        auto j = body.empty() ? Json::object() : Json::parse(body);
        if (!j.is_object()) fail(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return j;
    } catch (const Json::parse_error&) {
        fail(ErrorCode::InvalidArgument, "request body is not valid JSON");
    }
}

std::string string_field(const Json& j, const char* name, bool required = true) {
    if (!j.contains(name) || j[name].is_null()) {
        if (required) fail(ErrorCode::InvalidArgument, std::string("missing field ") + name);
        return {};
    }
    if (!j[name].is_string()) fail(ErrorCode::InvalidArgument, std::string(name) + " must be a string");
    return j[name].get<std::string>();
}

}  // namespace

Json envelope(Json data, bool generated, std::optional<std::string> origin, std::vector<std::string> source_ids,
              std::int64_t server_tick) {
    return Json{{"data", std::move(data)},
                {"generated", generated},
                {"provenance", {{"origin", origin ? Json(*origin) : Json(nullptr)}, {"source_ids", std::move(source_ids)}}},
                {"server_tick", server_tick}};
}

Service::Service(std::unique_ptr<Simulation> sim, Options options) : sim_(std::move(sim)), options_(options) {
    require(sim_ != nullptr, "service needs a simulation");
}

std::int64_t Service::server_tick() const { return sim_->world().tick; }

void Service::with_simulation(const std::function<void(const Simulation&)>& f) const {
    std::shared_lock lock(mutex_);
    f(*sim_);
}

void Service::persist(const std::filesystem::path& dir) const {
    std::shared_lock lock(mutex_);
    std::filesystem::create_directories(dir);
    sim_->log().write_jsonl(dir / "events.jsonl");
    write_snapshot(dir / "snapshot.json", sim_->world());
}

Response Service::handle(const std::string& method, const std::string& path, const Query& query, const std::string& body) {
    auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api" || parts[1] != "v1") {
        std::shared_lock lock(mutex_);
        return {404, error_body("NotFound", "no route " + path, server_tick())};
    }
    parts.erase(parts.begin(), parts.begin() + 2);
    try {
        return route(method, parts, query, body);
    } catch (const Error& e) {
        std::shared_lock lock(mutex_);
        return {status_for(e.code()), error_body(std::string(to_string(e.code())), e.what(), server_tick())};
    } catch (const Json::exception& e) {
        std::shared_lock lock(mutex_);
        return {400, error_body("InvalidArgument", e.what(), server_tick())};
    }
}

Response Service::route(const std::string& method, const std::vector<std::string>& p, const Query& q,
                        const std::string& body) {
    const bool get = method == "GET", post = method == "POST";
    auto not_allowed = [&]() -> Response {
        std::shared_lock lock(mutex_);
        return {405, error_body("MethodNotAllowed", method + " not allowed here", server_tick())};
    };
    auto not_found = [&]() -> Response {
        std::shared_lock lock(mutex_);
        return {404, error_body("NotFound", "no such endpoint", server_tick())};
    };
    if (p.size() == 1 && p[0] == "feed") return get ? get_feed(q) : not_allowed();
    if (p.size() == 1 && p[0] == "agents") return get ? get_agents() : not_allowed();
    if (p.size() == 2 && p[0] == "agents") return get ? get_agent(p[1]) : not_allowed();
    if (p.size() == 3 && p[0] == "agents" && p[2] == "dialogue") return post ? post_dialogue(p[1], body) : not_allowed();
    if (p.size() == 3 && p[0] == "agents" && p[2] == "private" && options_.debug)
        return get ? get_private(p[1]) : not_allowed();
    if (p.size() == 3 && p[0] == "agents" && p[2] == "memories" && options_.debug)
        return get ? get_memories(p[1], q) : not_allowed();
    if (p.size() == 1 && p[0] == "posts") return post ? post_user_post(body) : not_allowed();
    if (p.size() == 1 && p[0] == "isms") return get ? get_isms() : not_allowed();
    if (p.size() == 2 && p[0] == "isms") return get ? get_ism(p[1]) : not_allowed();
    if (p.size() == 1 && p[0] == "timeline") return get ? get_timeline(q) : not_allowed();
    if (p.size() == 2 && p[0] == "simulation" && p[1] == "step") return post ? post_step(body) : not_allowed();
    if (p.size() == 2 && p[0] == "simulation" && p[1] == "status") return get ? get_status() : not_allowed();
    return not_found();
}

Response Service::get_feed(const Query& q) {
    std::size_t page = 20;
    if (auto it = q.find("page"); it != q.end()) {
        const auto v = parse_int(it->second);
        if (!v || *v < 1 || *v > static_cast<std::int64_t>(social::kMaxPageSize))
            fail(ErrorCode::InvalidArgument, "page must be an integer within [1, 100]");
        page = static_cast<std::size_t>(*v);
    }
    std::optional<std::string> cursor;
    if (auto it = q.find("cursor"); it != q.end() && !it->second.empty()) cursor = it->second;

    std::shared_lock lock(mutex_);
    const auto feed = sim_->world().posts.build_feed(std::nullopt, cursor, page);
    Json posts = Json::array();
    std::vector<std::string> ids;
    bool generated = false;
    for (const auto& p : feed.posts) {
        posts.push_back(post_item(p));
        ids.push_back(p.post_id);
        generated = generated || p.provenance == social::Provenance::agent_generated;
    }
    Json data{{"posts", posts}, {"next_cursor", feed.next_cursor ? Json(*feed.next_cursor) : Json(nullptr)}};
    // A page mixing both kinds is labeled by its generated members; per-item flags stay exact.
    std::optional<std::string> origin;
    if (!feed.posts.empty()) origin = generated ? "agent_generated" : "user_authored";
    return {200, envelope(std::move(data), generated, origin, ids, server_tick())};
}

Response Service::get_agents() {
    std::shared_lock lock(mutex_);
    const auto& w = sim_->world();
    Json items = Json::array();
    std::vector<std::string> ids;
    bool generated = false;
    for (const auto& [id, a] : w.agents) {
        auto item = agent_item(w, a);
        generated = generated || item["generated"].get<bool>();
        items.push_back(std::move(item));
        ids.push_back(id);
    }
    return {200, envelope(std::move(items), generated, generated ? "agent_generated" : "human_kb", ids, server_tick())};
}

Response Service::get_agent(const std::string& id) {
    std::shared_lock lock(mutex_);
    const auto& w = sim_->world();
    auto item = agent_item(w, w.agent(id));
    const bool generated = item["generated"].get<bool>();
    std::vector<std::string> sources{id};
    for (const auto& i : item["assigned_isms"]) sources.push_back(i.get<std::string>());
    return {200, envelope(std::move(item), generated, generated ? "agent_generated" : "human_kb", sources, server_tick())};
}

Response Service::get_private(const std::string& id) {
    std::shared_lock lock(mutex_);
    const auto& a = sim_->world().agent(id);
    return {200, envelope(Json{{"agent_id", id}, {"private_view", a.private_view}}, true, "agent_generated", {id},
                          server_tick())};
}

Response Service::get_memories(const std::string& id, const Query& q) {
    std::size_t limit = 50;
    if (auto it = q.find("limit"); it != q.end()) {
        const auto v = parse_int(it->second);
        if (!v || *v < 1 || *v > 1000) fail(ErrorCode::InvalidArgument, "limit must be within [1, 1000]");
        limit = static_cast<std::size_t>(*v);
    }
    std::shared_lock lock(mutex_);
    const auto& records = sim_->world().memories.stream(id).records();
    Json items = Json::array();
    std::vector<std::string> ids;
    // newest first
    for (auto it = records.rbegin(); it != records.rend() && items.size() < limit; ++it) {
        Json item = *it;
        item["generated"] = true;
        items.push_back(std::move(item));
        ids.push_back(it->memory_id);
    }
    return {200, envelope(std::move(items), true, "agent_generated", ids, server_tick())};
}

Response Service::post_dialogue(const std::string& id, const std::string& body) {
    const auto j = parse_body(body);
    const auto user_name = string_field(j, "user_name", false);
    const auto text = string_field(j, "text");
    std::optional<std::string> session;
    if (auto s = string_field(j, "session_id", false); !s.empty()) session = s;
    if (text::trim(text).empty()) fail(ErrorCode::InvalidArgument, "text must be non-empty");

    std::unique_lock lock(mutex_);
    const auto out = sim_->user_message(id, user_name.empty() ? "visitor" : user_name, text, session);
    Json transcript = Json::array();
    for (const auto& t : out.session.transcript)
        transcript.push_back({{"speaker", t.speaker == social::Speaker::user ? "user" : "agent"},
                              {"text", t.text},
                              {"tick", t.tick},
                              {"generated", t.speaker == social::Speaker::agent}});
    Json data{{"session_id", out.session_id}, {"agent_id", id}, {"reply", out.reply}, {"transcript", transcript}};
    return {200, envelope(std::move(data), true, "agent_generated", {out.session_id, id}, server_tick())};
}

Response Service::post_user_post(const std::string& body) {
    const auto j = parse_body(body);
    const auto user_name = string_field(j, "user_name", false);
    const auto text = string_field(j, "text");
    std::unique_lock lock(mutex_);
    const auto post_id = sim_->publish_user_post(user_name.empty() ? "visitor" : user_name, text);
    const auto* post = sim_->world().posts.find(post_id);
    return {201, envelope(Json{{"post_id", post_id}, {"post", post_item(*post)}}, false, "user_authored", {post_id},
                          server_tick())};
}

Response Service::get_isms() {
    std::shared_lock lock(mutex_);
    Json items = Json::array();
    std::vector<std::string> ids;
    for (const auto& i : sim_->world().isms.isms()) {
        items.push_back(ism_item(i));
        ids.push_back(i.ism_id);
    }
    const bool any = !items.empty();
    return {200, envelope(std::move(items), any, any ? std::optional<std::string>("agent_generated") : std::nullopt, ids,
                          server_tick())};
}

Response Service::get_ism(const std::string& id) {
    std::shared_lock lock(mutex_);
    const auto& reg = sim_->world().isms;
    const auto* ism = reg.find_ism(id);
    if (!ism) fail(ErrorCode::UnknownIsm, id);
    auto item = ism_item(*ism);
    Json critiques = Json::array();
    std::vector<std::string> sources{ism->ism_id};
    for (const auto& cid : ism->critiques) {
        Json c = *reg.find_critique(cid);
        c["generated"] = true;
        critiques.push_back(std::move(c));
        sources.push_back(cid);
    }
    item["critique_texts"] = critiques;
    for (const auto& u : ism->units) sources.push_back(u.origin_entry);
    return {200, envelope(std::move(item), true, "agent_generated", sources, server_tick())};
}

Response Service::get_timeline(const Query& q) {
    std::shared_lock lock(mutex_);
    const auto tick = server_tick();
    auto bound = [&](const char* name, std::int64_t fallback) {
        auto it = q.find(name);
        if (it == q.end() || it->second.empty()) return fallback;
        const auto v = parse_int(it->second);
        if (!v) fail(ErrorCode::InvalidArgument, std::string(name) + " must be an integer");
        return *v;
    };
    const auto from = bound("from", 0);
    const auto to = bound("to", tick);
    if (from > to) fail(ErrorCode::InvalidArgument, "from must not exceed to");
    const auto& w = sim_->world();
    Json items = Json::array();
    std::vector<std::string> ids;
    bool generated = false;
    for (const auto& it : ismism::timeline_query(w.kb, w.isms, from, to)) {
        bool gen = true;
        std::string origin = "agent_generated";
        if (it.kind == "kb_entry") {
            gen = it.payload.at("origin") == "synthetic";
            origin = gen ? "synthetic_kb" : "human_kb";
        }
        Json item{{"tick", it.tick}, {"kind", it.kind}, {"id", it.id}, {"payload", it.payload},
                  {"generated", gen},    {"provenance", origin}};
        if (it.kind == "kb_entry") item["generation"] = it.payload.at("generation");
        generated = generated || gen;
        items.push_back(std::move(item));
        ids.push_back(it.id);
    }
    std::optional<std::string> origin;
    if (!items.empty()) origin = generated ? "agent_generated" : "human_kb";
    return {200, envelope(Json{{"from", from}, {"to", to}, {"items", items}}, generated, origin, ids, tick)};
}

Json Service::status_json() const {
    const auto& w = sim_->world();
    return Json{{"tick", w.tick},
                {"agents", w.agents.size()},
                {"posts", w.posts.size()},
                {"isms", w.isms.isms().size()},
                {"kb_entries", w.kb.size()},
                {"synthetic_ratio", w.kb.synthetic_ratio(w.tick)},
                {"log_hash", sim_->log().hash_hex()},
                {"log_seq", w.applied},
                {"stepping", stepping_.load()}};
}

Response Service::post_step(const std::string& body) {
    const auto j = parse_body(body);
    std::int64_t n = 1;
    if (j.contains("n")) {
        if (!j["n"].is_number_integer()) fail(ErrorCode::InvalidArgument, "n must be an integer");
        n = j["n"].get<std::int64_t>();
    }
    if (n < 1 || n > kMaxStep) fail(ErrorCode::InvalidArgument, "n must be within [1, 1000]");
    if (stepping_.exchange(true)) {
        std::shared_lock lock(mutex_);
        return {409, error_body("StepInProgress", "a step is already in progress", server_tick())};
    }
    struct Reset {
        std::atomic<bool>& flag;
        ~Reset() { flag = false; }
    } reset{stepping_};
    for (std::int64_t i = 0; i < n; ++i) {
        std::unique_lock lock(mutex_);
        sim_->tick();
    }
    std::shared_lock lock(mutex_);
    auto data = status_json();
    data["stepping"] = false;
    return {200, envelope(std::move(data), false, std::nullopt, {}, server_tick())};
}

Response Service::get_status() {
    std::shared_lock lock(mutex_);
    return {200, envelope(status_json(), false, std::nullopt, {}, server_tick())};
}

// ---------------------------------------------------------------------------

struct Server::Impl {
    Service& service;
    ServeOptions options;
    httplib::Server http;
};

Server::Server(Service& service, ServeOptions options) : impl_(new Impl{service, std::move(options), {}}) {
    auto& http = impl_->http;
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
    http.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        Query q;
        for (const auto& [k, v] : req.params) q.emplace(k, v);
        const auto out = impl_->service.handle(req.method, req.path, q, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json; charset=utf-8");
    };
    const std::string pattern = std::string(kBasePath) + "/.*";
    http.Get(pattern, dispatch);
    http.Post(pattern, dispatch);
    http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    if (impl_->options.ui_dir) http.set_mount_point("/", impl_->options.ui_dir->string());
}

Server::~Server() { stop(); }

bool Server::bind() {
    auto& http = impl_->http;
    if (impl_->options.port == 0) {
        port_ = http.bind_to_any_port(impl_->options.host);
        return port_ > 0;
    }
    if (!http.bind_to_port(impl_->options.host, impl_->options.port)) return false;
    port_ = impl_->options.port;
    return true;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

int port_from_env() {
    if (const char* p = std::getenv("ARTISM_PORT")) {
        const auto v = parse_int(p);
        if (v && *v > 0 && *v < 65536) return static_cast<int>(*v);
    }
    return kDefaultPort;
}

}  // namespace artism::api

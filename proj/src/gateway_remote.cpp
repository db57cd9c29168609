#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "artism/error.hpp"
#include "artism/gateway.hpp"

namespace artism::gateway {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    require(scheme_end != std::string::npos, "ARTISM_LLM_URL must include a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class PermitGuard {
public:
    explicit PermitGuard(std::counting_semaphore<64>& s) : s_(s) { s_.acquire(); }
    ~PermitGuard() { s_.release(); }
    PermitGuard(const PermitGuard&) = delete;
    PermitGuard& operator=(const PermitGuard&) = delete;

private:
    std::counting_semaphore<64>& s_;
};

}  // namespace

RemoteConfig RemoteConfig::from_env() {
    RemoteConfig c;
    if (const char* url = std::getenv("ARTISM_LLM_URL")) c.url = url;
    if (const char* key = std::getenv("ARTISM_LLM_KEY")) c.api_key = key;
    if (const char* model = std::getenv("ARTISM_LLM_MODEL")) c.model = model;
    return c;
}

RemoteBackend::RemoteBackend(RemoteConfig config, std::ptrdiff_t max_in_flight)
    : config_(std::move(config)), in_flight_(max_in_flight) {
    require(!config_.url.empty(), "remote backend requires ARTISM_LLM_URL");
    require(max_in_flight > 0 && max_in_flight <= 64, "max_in_flight must be in [1, 64]");
    require(config_.retries >= 0, "retries must be non-negative");
}

std::string RemoteBackend::generate(const PromptTemplate&, const CompletionRequest& req, const std::string& prompt) {
    const auto target = split_url(config_.url);
    const Json body{{"model", config_.model}, {"prompt", prompt}, {"seed", req.seed}, {"max_length", req.max_length}};
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            const auto idx = std::min<std::size_t>(static_cast<std::size_t>(attempt - 1), config_.backoff.size() - 1);
            if (!config_.backoff.empty()) std::this_thread::sleep_for(config_.backoff[idx]);
        }
        httplib::Result res;
        {
            PermitGuard permit(in_flight_);
            httplib::Client client(target.origin);
            client.set_connection_timeout(config_.timeout);
            client.set_read_timeout(config_.timeout);
            client.set_write_timeout(config_.timeout);
            ++attempts_;
            res = client.Post(target.path, headers, body.dump(), "application/json");
        }
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            fail(ErrorCode::BackendRefused, "HTTP " + std::to_string(res->status));
        try {
            return Json::parse(res->body).at("text").get<std::string>();
        } catch (const Json::exception& e) {
            fail(ErrorCode::BackendRefused, std::string("malformed response body: ") + e.what());
        }
    }
    fail(ErrorCode::BackendTimeout, last_error + " after " + std::to_string(config_.retries) + " retries");
}

}  // namespace artism::gateway

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "artism/config.hpp"
#include "artism/error.hpp"
#include "artism/gateway.hpp"

#ifndef ARTISM_TEST_DATA_DIR
#define ARTISM_TEST_DATA_DIR "data"
#endif
#ifndef ARTISM_TEST_GOLDEN_DIR
#define ARTISM_TEST_GOLDEN_DIR "tests/golden"
#endif

namespace artism::testing {

inline std::filesystem::path data_dir() { return ARTISM_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return ARTISM_TEST_GOLDEN_DIR; }

inline SimulationConfig desk_config() { return default_config(data_dir()); }

/// Fresh, unique directory under the system temp dir; removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("artism-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Backend that always times out, or times out only for chosen templates.
class FailingBackend final : public gateway::Backend {
public:
    explicit FailingBackend(std::string only_template = {}) : only_(std::move(only_template)) {}
    gateway::BackendKind kind() const override { return gateway::BackendKind::remote; }
    std::string generate(const gateway::PromptTemplate& t, const gateway::CompletionRequest& req,
                         const std::string& prompt) override {
        if (only_.empty() || t.template_id == only_) fail(ErrorCode::BackendTimeout, "simulated timeout");
        return mock_.generate(t, req, prompt);
    }

private:
    std::string only_;
    gateway::MockBackend mock_;
};

inline std::shared_ptr<gateway::Gateway> failing_gateway(std::string only_template = {}) {
    return std::make_shared<gateway::Gateway>(std::make_shared<FailingBackend>(std::move(only_template)));
}

}  // namespace artism::testing

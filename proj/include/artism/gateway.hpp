#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "artism/canonical.hpp"

namespace artism::gateway {

enum class TemplateKind {
    artwork,
    comment,
    publish_view,
    reflection,
    dialogue_reply,
    ism_naming,
    ism_description,
    critique,
    importance_rating,
};

std::string_view to_string(TemplateKind kind);

using Bindings = std::map<std::string, std::string>;

struct PromptTemplate {
    std::string template_id;
    TemplateKind kind = TemplateKind::artwork;
    std::string body;
    std::vector<std::string> required_bindings;

    /// Builds a template whose required bindings are exactly the placeholders of `body`.
    static PromptTemplate make(std::string id, TemplateKind kind, std::string body);
    /// Throws InvalidArgument if a placeholder of body is missing from required_bindings.
    void validate() const;
};

/// Placeholder names `{name}` in order of first appearance.
std::vector<std::string> placeholders(std::string_view body);

/// Substitutes every `{name}`. Throws MissingBinding; bindings that match no
/// placeholder are reported through `unknown` and otherwise ignored.
std::string render_prompt(const PromptTemplate& t, const Bindings& bindings, std::vector<std::string>* unknown = nullptr);

struct CompletionRequest {
    std::string template_id;
    Bindings bindings;
    std::uint64_t seed = 0;
    std::size_t max_length = 2048;
    std::vector<std::string> schema;
    /// Appended to the rendered prompt; set by structured-output repair.
    std::string suffix;
};

/// SHA-256 hex of the canonical serialization of the request. Binding order is irrelevant.
std::string request_digest(const CompletionRequest& req);

enum class BackendKind { mock, remote };
std::string_view to_string(BackendKind kind);

struct CompletionResult {
    std::string text;
    BackendKind backend = BackendKind::mock;
    std::string request_digest;
    double latency_ms = 0.0;
};

class TemplateRegistry {
public:
    void add(PromptTemplate t);
    const PromptTemplate& get(const std::string& template_id) const;
    bool contains(const std::string& template_id) const { return templates_.count(template_id) > 0; }
    const std::map<std::string, PromptTemplate>& all() const { return templates_; }

private:
    std::map<std::string, PromptTemplate> templates_;
};

/// The prompt set used by the simulation (artist actions, reflection, dialogue, critique engine).
TemplateRegistry default_templates();

/// Deterministic stand-in for a language model: a pure function of (template, request).
/// Filler words come from the bundled 256-word list, indexed by xorshift64* seeded with
/// hash64(seed, request_digest). See docs/determinism.md.
std::string mock_complete(const PromptTemplate& t, const CompletionRequest& req);

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendKind kind() const = 0;
    /// Returns raw completion text for an already rendered prompt.
    virtual std::string generate(const PromptTemplate& t, const CompletionRequest& req, const std::string& prompt) = 0;
};

class MockBackend final : public Backend {
public:
    BackendKind kind() const override { return BackendKind::mock; }
    std::string generate(const PromptTemplate& t, const CompletionRequest& req, const std::string& prompt) override;
};

struct RemoteConfig {
    std::string url;  // e.g. http://host:port/v1/complete
    std::string api_key;
    std::string model = "artism-default";
    int retries = 2;
    std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(250), std::chrono::milliseconds(1000)};
    std::chrono::seconds timeout{30};

    /// Reads ARTISM_LLM_URL, ARTISM_LLM_KEY and (optionally) ARTISM_LLM_MODEL.
    static RemoteConfig from_env();
};

/// HTTP client for a completion service. Request body: {model, prompt, seed, max_length};
/// response body: {"text": ...}. Transport failures are retried with backoff and end in
/// BackendTimeout; non-2xx statuses raise BackendRefused.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config, std::ptrdiff_t max_in_flight = 4);
    BackendKind kind() const override { return BackendKind::remote; }
    std::string generate(const PromptTemplate& t, const CompletionRequest& req, const std::string& prompt) override;

    /// Total HTTP attempts made so far (all requests).
    std::uint64_t attempts() const { return attempts_.load(); }

private:
    RemoteConfig config_;
    std::counting_semaphore<64> in_flight_;
    std::atomic<std::uint64_t> attempts_{0};
};

/// The single choke point for generative calls.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, TemplateRegistry templates = default_templates());

    /// Convenience: mock backend with the default templates.
    static std::shared_ptr<Gateway> mock();

    const PromptTemplate& get_template(const std::string& template_id) const { return templates_.get(template_id); }
    const TemplateRegistry& templates() const { return templates_; }
    BackendKind backend_kind() const { return backend_->kind(); }

    /// Renders the prompt the backend would see (template + suffix).
    std::string render(const CompletionRequest& req) const;

    /// Throws MissingBinding, EmptyCompletion, BackendTimeout, BackendRefused.
    CompletionResult complete(const CompletionRequest& req) const;

    /// Extracts `field: value` lines for every schema field. On failure re-requests with a
    /// repair suffix up to `max_repairs` times, then throws MalformedOutput.
    std::map<std::string, std::string> parse_structured(const CompletionRequest& req, const CompletionResult& first,
                                                        const std::vector<std::string>& schema,
                                                        int max_repairs = 2) const;

private:
    std::shared_ptr<Backend> backend_;
    TemplateRegistry templates_;
};

/// Field extraction without retries; nullopt if a schema field is missing.
std::optional<std::map<std::string, std::string>> extract_fields(std::string_view text,
                                                                 const std::vector<std::string>& schema);

}  // namespace artism::gateway

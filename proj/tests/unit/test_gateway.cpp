#include <doctest.h>

#include <deque>
#include <random>
#include <thread>

#include <httplib.h>

#include "artism/error.hpp"
#include "artism/gateway.hpp"
#include "artism/rng.hpp"
#include "artism/text.hpp"

using namespace artism;
using namespace artism::gateway;

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

/// Returns queued texts in order; counts calls.
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(std::deque<std::string> replies) : replies_(std::move(replies)) {}
    BackendKind kind() const override { return BackendKind::remote; }
    std::string generate(const PromptTemplate&, const CompletionRequest&, const std::string& prompt) override {
        ++calls;
        last_prompt = prompt;
        if (replies_.empty()) return "nothing useful";
        auto r = replies_.front();
        replies_.pop_front();
        return r;
    }
    int calls = 0;
    std::string last_prompt;

private:
    std::deque<std::string> replies_;
};

CompletionRequest naming_request(std::uint64_t seed) {
    return CompletionRequest{"ism_naming", {{"units", "negative volume | object"}}, seed};
}

}  // namespace

TEST_SUITE("gateway") {

TEST_CASE("render_prompt substitutes placeholders") {
    const auto t = PromptTemplate::make("t", TemplateKind::artwork, "I am {name}.");
    CHECK(t.required_bindings == std::vector<std::string>{"name"});
    CHECK(render_prompt(t, {{"name", "AIDA"}}) == "I am AIDA.");
    const auto plain = PromptTemplate::make("p", TemplateKind::artwork, "No placeholders here.");
    CHECK(render_prompt(plain, {}) == "No placeholders here.");
}

TEST_CASE("a missing binding is MissingBinding; unknown bindings are reported and ignored") {
    const auto t = PromptTemplate::make("t", TemplateKind::artwork, "{name} paints in {style}.");
    CHECK(code_of([&] { render_prompt(t, {{"name", "A"}}); }) == ErrorCode::MissingBinding);
    std::vector<std::string> unknown;
    CHECK(render_prompt(t, {{"name", "A"}, {"style", "B"}, {"extra", "C"}}, &unknown) == "A paints in B.");
    CHECK(unknown == std::vector<std::string>{"extra"});
}

TEST_CASE("template validation catches undeclared placeholders") {
    PromptTemplate t{"t", TemplateKind::artwork, "{a} and {b}", {"a"}};
    CHECK_THROWS_AS(t.validate(), Error);
    TemplateRegistry r;
    r.add(PromptTemplate::make("x", TemplateKind::artwork, "{a}"));
    CHECK_THROWS_AS(r.add(PromptTemplate::make("x", TemplateKind::artwork, "{b}")), Error);
    CHECK(code_of([&] { r.get("missing"); }) == ErrorCode::UnknownTemplate);
}

TEST_CASE("every default template validates") {
    const auto r = default_templates();
    for (const auto& [id, t] : r.all()) CHECK_NOTHROW(t.validate());
    for (const auto* id : {"initial_view", "reflect", "create_work", "comment", "publish_view", "dialogue_reply",
                           "ism_naming", "ism_description", "critique", "rate_importance"})
        CHECK(r.contains(id));
}

TEST_CASE("request digest ignores binding insertion order and tracks every field") {
    CompletionRequest a{"t", {}, 1};
    a.bindings.emplace("b", "2");
    a.bindings.emplace("a", "1");
    CompletionRequest b{"t", {{"a", "1"}, {"b", "2"}}, 1};
    CHECK(request_digest(a) == request_digest(b));
    b.seed = 2;
    CHECK(request_digest(a) != request_digest(b));
    b.seed = 1;
    b.bindings["a"] = "x";
    CHECK(request_digest(a) != request_digest(b));
}

TEST_CASE("the mock names the exemplar movement") {
    auto gw = Gateway::mock();
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL})
        CHECK(gw->complete(naming_request(seed)).text == "Negative-Volume Objectism");
}

TEST_CASE("the mock is a pure function of the request") {
    auto gw = Gateway::mock();
    std::mt19937_64 rng(11);
    const auto& words = text::mock_words();
    for (int i = 0; i < 300; ++i) {
        CompletionRequest req{"create_work", {}, rng()};
        for (const auto& name : gw->get_template("create_work").required_bindings)
            req.bindings[name] = words[rng() % words.size()] + " " + words[rng() % words.size()];
        const auto first = gw->complete(req);
        const auto second = gw->complete(req);
        CHECK(first.text == second.text);
        CHECK(first.request_digest == second.request_digest);
        CHECK(first.backend == BackendKind::mock);
    }
}

TEST_CASE("different seeds change filler words but keep the skeleton") {
    auto gw = Gateway::mock();
    CompletionRequest req{"critique",
                          {{"name", "X"},
                           {"description", "d"},
                           {"units", "a | b"},
                           {"glosses", "a: g"},
                           {"excerpts", "white cube: gallery"}},
                          1};
    const auto one = gw->complete(req).text;
    req.seed = 2;
    const auto two = gw->complete(req).text;
    CHECK(one != two);
    CHECK(one.rfind("In X, ", 0) == 0);
    CHECK(two.rfind("In X, ", 0) == 0);
}

TEST_CASE("an empty template body is EmptyCompletion") {
    TemplateRegistry r;
    r.add(PromptTemplate::make("empty", TemplateKind::artwork, ""));
    Gateway gw(std::make_shared<MockBackend>(), r);
    CHECK(code_of([&] { gw.complete({"empty", {}, 1}); }) == ErrorCode::EmptyCompletion);
}

TEST_CASE("completions are truncated to max_length on a UTF-8 boundary") {
    auto backend = std::make_shared<ScriptedBackend>(std::deque<std::string>{"ab\xC3\xA9" "cd"});
    TemplateRegistry r;
    r.add(PromptTemplate::make("t", TemplateKind::artwork, "x"));
    Gateway gw(backend, r);
    CompletionRequest req{"t", {}, 1};
    req.max_length = 3;
    CHECK(gw.complete(req).text == "ab");
}

TEST_CASE("structured output parsing and repair") {
    CHECK(extract_fields("action: comment\ntarget: p-7\nnoise: yes", {"action", "target"}) ==
          std::map<std::string, std::string>{{"action", "comment"}, {"target", "p-7"}});
    CHECK_FALSE(extract_fields("action: comment", {"action", "target"}).has_value());

    TemplateRegistry r;
    r.add(PromptTemplate::make("t", TemplateKind::artwork, "decide"));
    {
        auto backend = std::make_shared<ScriptedBackend>(std::deque<std::string>{"action: idle\ntarget: none"});
        Gateway gw(backend, r);
        CompletionRequest req{"t", {}, 1};
        CompletionResult first;
        first.text = "action: comment";
        const auto fields = gw.parse_structured(req, first, {"action", "target"});
        CHECK(fields.at("action") == "idle");
        CHECK(backend->calls == 1);
        CHECK(backend->last_prompt.find("field: value") != std::string::npos);
    }
    {
        auto backend = std::make_shared<ScriptedBackend>(std::deque<std::string>{"action: a", "action: b"});
        Gateway gw(backend, r);
        CompletionResult first;
        first.text = "action: comment";
        CHECK(code_of([&] { gw.parse_structured({"t", {}, 1}, first, {"action", "target"}); }) ==
              ErrorCode::MalformedOutput);
        CHECK(backend->calls == 2);
    }
}

TEST_CASE("an unreachable remote backend times out after two retries") {
    RemoteConfig cfg;
    cfg.url = "http://127.0.0.1:1/v1/complete";
    cfg.backoff = {std::chrono::milliseconds(1), std::chrono::milliseconds(1)};
    cfg.timeout = std::chrono::seconds(1);
    auto backend = std::make_shared<RemoteBackend>(cfg);
    Gateway gw(backend);
    CHECK(code_of([&] { gw.complete(naming_request(1)); }) == ErrorCode::BackendTimeout);
    CHECK(backend->attempts() == 3);
}

TEST_CASE("remote backend speaks the documented wire format") {
    httplib::Server srv;
    Json seen;
    srv.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
        seen = Json::parse(req.body);
        if (seen.at("prompt").get<std::string>().find("refuse") != std::string::npos) {
            res.status = 500;
            return;
        }
        res.set_content(Json{{"text", "  Remote Objectism  "}}.dump(), "application/json");
    });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread t([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    RemoteConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
    cfg.api_key = "k";
    Gateway gw(std::make_shared<RemoteBackend>(cfg));
    const auto out = gw.complete(naming_request(9));
    CHECK(out.text == "Remote Objectism");
    CHECK(out.backend == BackendKind::remote);
    CHECK(seen.at("seed") == 9);
    CHECK(seen.contains("max_length"));
    CHECK(seen.contains("model"));

    CompletionRequest refuse{"ism_naming", {{"units", "refuse | this"}}, 1};
    CHECK(code_of([&] { gw.complete(refuse); }) == ErrorCode::BackendRefused);

    srv.stop();
    t.join();
}

}

#include "artism/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "artism/error.hpp"
#include "artism/text.hpp"

namespace artism {

namespace {

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) fail(ErrorCode::ConfigError, key + ": not an integer: " + v);
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, key + ": not a number: " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    const auto s = text::to_lower(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(ErrorCode::ConfigError, key + ": not a boolean: " + v);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

void SimulationConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir) {
    if (key == "global_seed") global_seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "ticks") ticks = parse_integer<std::int64_t>(key, value);
    else if (key == "corpus_path") corpus_path = resolve(base_dir, value);
    else if (key == "kb_seed_path") kb_seed_path = resolve(base_dir, value);
    else if (key == "w_recency") weights.w_recency = parse_real(key, value);
    else if (key == "w_importance") weights.w_importance = parse_real(key, value);
    else if (key == "w_salience") weights.w_salience = parse_real(key, value);
    else if (key == "half_life") weights.half_life = parse_integer<std::int64_t>(key, value);
    else if (key == "theta_reflect") theta_reflect = parse_real(key, value);
    else if (key == "theta_act") theta_act = parse_real(key, value);
    else if (key == "top_k") top_k = parse_integer<std::size_t>(key, value);
    else if (key == "coupling_enabled") coupling_enabled = parse_bool(key, value);
    else if (key == "harvest_period") harvest_period = parse_integer<std::int64_t>(key, value);
    else if (key == "harvest_window") harvest_window = parse_integer<std::int64_t>(key, value);
    else if (key == "coins_per_harvest") coins_per_harvest = parse_integer<std::size_t>(key, value);
    else if (key == "arity") arity = parse_integer<std::size_t>(key, value);
    else if (key == "recombine_strategy") {
        if (value == "sample") recombine = RecombineMode::sample;
        else if (value == "exhaustive") recombine = RecombineMode::exhaustive;
        else fail(ErrorCode::ConfigError, "recombine_strategy must be sample or exhaustive");
    } else if (key == "backend") backend = value;
    else if (key == "prompt_audit") prompt_audit = parse_bool(key, value);
    else if (key == "feed_window") feed_window = parse_integer<std::size_t>(key, value);
    else if (key == "comment_candidates") comment_candidates = parse_integer<std::size_t>(key, value);
    else if (key == "l_min") l_min = parse_integer<std::size_t>(key, value);
    else if (key == "l_max") l_max = parse_integer<std::size_t>(key, value);
    else if (key == "critiques_as_posts") critiques_as_posts = parse_bool(key, value);
    else fail(ErrorCode::ConfigError, "unknown key " + key);
}

void SimulationConfig::validate() const {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::ConfigError, what);
    };
    check(ticks >= 0, "ticks must be >= 0");
    check(!corpus_path.empty(), "corpus_path is required");
    check(!kb_seed_path.empty(), "kb_seed_path is required");
    try {
        weights.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    check(theta_reflect > 0, "theta_reflect must be > 0");
    check(theta_act >= 0 && theta_act <= 1, "theta_act must be within [0, 1]");
    check(top_k >= 1, "top_k must be >= 1");
    check(harvest_period >= 1, "harvest_period must be >= 1");
    check(harvest_window >= 0, "harvest_window must be >= 0");
    check(ticks == 0 || window() <= ticks, "harvest_window must not exceed ticks");
    check(coins_per_harvest >= 1, "coins_per_harvest must be >= 1");
    check(arity >= 2 && arity <= 8, "arity must be within [2, 8]");
    check(backend == "mock" || backend == "remote", "backend must be mock or remote");
    check(feed_window >= 1 && feed_window <= 100, "feed_window must be within [1, 100]");
    check(comment_candidates <= 100, "comment_candidates must be <= 100");
    check(l_min > 0 && l_min < l_max, "need 0 < l_min < l_max");
    check(!critiques_as_posts, "critiques_as_posts is reserved and must be false");
}

Json SimulationConfig::to_json() const {
    return Json{{"global_seed", global_seed},
                {"w_recency", weights.w_recency},
                {"w_importance", weights.w_importance},
                {"w_salience", weights.w_salience},
                {"half_life", weights.half_life},
                {"theta_reflect", theta_reflect},
                {"theta_act", theta_act},
                {"top_k", top_k},
                {"coupling_enabled", coupling_enabled},
                {"harvest_period", harvest_period},
                {"harvest_window", window()},
                {"coins_per_harvest", coins_per_harvest},
                {"arity", arity},
                {"recombine_strategy", recombine == RecombineMode::sample ? "sample" : "exhaustive"},
                {"backend", backend},
                {"prompt_audit", prompt_audit},
                {"feed_window", feed_window},
                {"comment_candidates", comment_candidates},
                {"l_min", l_min},
                {"l_max", l_max}};
}

std::string SimulationConfig::to_config_text() const {
    std::ostringstream out;
    out << "ticks = " << ticks << "\n";
    out << "corpus_path = " << std::filesystem::absolute(corpus_path).lexically_normal().string() << "\n";
    out << "kb_seed_path = " << std::filesystem::absolute(kb_seed_path).lexically_normal().string() << "\n";
    const auto settings = to_json();
    for (const auto& [key, value] : settings.items()) {
        out << key << " = ";
        if (value.is_string()) out << value.get<std::string>();
        else if (value.is_number_float()) out << canonical_dump(value);
        else out << value.dump();
        out << "\n";
    }
    out << "critiques_as_posts = false\n";
    return out.str();
}

std::string SimulationConfig::digest() const { return sha256_hex(canonical_dump(to_json())); }

SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot read config " + path.string());
    SimulationConfig cfg;
    const auto base = path.parent_path();
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto s = text::trim(line);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        cfg.set(text::trim(std::string_view(s).substr(0, eq)), text::trim(std::string_view(s).substr(eq + 1)), base);
    }
    return cfg;
}

SimulationConfig default_config(const std::filesystem::path& data_dir) {
    SimulationConfig cfg;
    cfg.corpus_path = data_dir / "sample_corpus.jsonl";
    cfg.kb_seed_path = data_dir / "kb_seed.jsonl";
    return cfg;
}

}  // namespace artism

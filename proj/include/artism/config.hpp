#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "artism/canonical.hpp"
#include "artism/memory.hpp"

namespace artism {

enum class RecombineMode { sample, exhaustive };

struct SimulationConfig {
    std::uint64_t global_seed = 42;
    std::int64_t ticks = 200;
    std::filesystem::path corpus_path;
    std::filesystem::path kb_seed_path;
    memory::RetrievalWeights weights;
    double theta_reflect = 5.0;
    double theta_act = 0.15;
    std::size_t top_k = 8;
    bool coupling_enabled = true;
    std::int64_t harvest_period = 10;
    /// 0 means "same as harvest_period".
    std::int64_t harvest_window = 0;
    std::size_t coins_per_harvest = 3;
    std::size_t arity = 2;
    RecombineMode recombine = RecombineMode::sample;
    std::string backend = "mock";
    bool prompt_audit = false;
    std::size_t feed_window = 20;
    std::size_t comment_candidates = 5;
    std::size_t l_min = 400;
    std::size_t l_max = 1200;
    /// Reserved; only `false` is accepted.
    bool critiques_as_posts = false;

    std::int64_t window() const { return harvest_window > 0 ? harvest_window : harvest_period; }

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    /// Parameters that shape the event log. Paths and the tick budget are excluded, so a
    /// shorter run's log is a prefix of a longer one.
    Json to_json() const;
    /// SHA-256 of the canonical to_json().
    std::string digest() const;

    /// Every setting, paths included, in the load_config format.
    std::string to_config_text() const;

    /// Applies one `key=value` setting. Throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir = {});
};

/// Flat `key = value` file; '#' starts a comment; relative paths resolve against the file's directory.
SimulationConfig load_config(const std::filesystem::path& path);

/// Sample-corpus defaults with paths under `data_dir`.
SimulationConfig default_config(const std::filesystem::path& data_dir);

}  // namespace artism

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srgvf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Child seed for (trial, component):
///   splitmix64(splitmix64(splitmix64(master) ^ trial) ^ fnv1a64(component)).
std::uint64_t seed_tree(std::uint64_t master_seed, std::uint64_t trial, std::string_view component);

std::uint64_t fnv1a64(std::string_view text);

/// Every knob of the grid-world and replay studies. The file format is flat
/// `key = value` text, lists comma-separated, `#` comments; unknown keys are
/// errors.
struct ExperimentConfig {
    // grid world
    std::string map;  // empty: built-in 13x13 maze
    double epsilon = 0.3;
    std::vector<double> gammas{0.0, 0.5, 0.9};
    std::vector<double> alphas{0.1, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> sr_alphas{0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> sr_alpha_by_gamma;  // empty: chosen by an SR sweep
    std::int64_t episodes = 0;              // 0: signals * interval
    std::int64_t sr_episodes = 10000;
    std::int64_t interval = 50;
    std::size_t signals = 50;
    std::size_t trials = 30;
    bool randomize_order = true;
    double noise_sigma = 0.3;
    double shortest_path_probability = 1.0 / 7.0;
    std::int64_t step_cap = 10000;
    std::string reference = "analytic";  // analytic | mc
    std::uint64_t mc_episodes_sr = 30000;
    std::uint64_t mc_episodes_signal = 10000;
    std::string reference_dir;  // cache for Monte Carlo references

    // replay
    std::string dataset;  // empty: synthetic
    std::size_t dataset_steps = 21600;
    std::vector<std::string> input_channels{"shoulder_pos", "elbow_pos"};
    std::vector<std::string> target_channels{"shoulder_current", "shoulder_pos", "shoulder_speed",
                                             "elbow_current",    "elbow_pos",    "elbow_speed"};
    double replay_gamma = 0.95;
    std::int64_t replay_interval = 2000;
    double alpha0 = 0.1;
    std::size_t tilings = 100;
    double tile_width = 1.0;
    std::size_t memory_size = 2048;
    std::uint64_t hash_seed = 0;
    bool from_start = false;
    bool write_records = true;

    // execution; not part of the config hash
    std::uint64_t seed = 1;
    std::string out = "out";
    unsigned parallel = 1;

    std::int64_t total_episodes() const
    {
        return episodes > 0 ? episodes : static_cast<std::int64_t>(signals) * interval;
    }

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    /// Canonical text; parse(to_text()) == *this.
    std::string to_text() const;
    /// Hash of the canonical text minus `out` and `parallel`.
    std::uint64_t hash() const;

    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::string& path);
    /// "paper" (defaults) or "desk" (small, fast).
    static ExperimentConfig preset(std::string_view name);

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

}  // namespace srgvf

#pragma once

#include "srgvf/config.hpp"
#include "srgvf/gridworld.hpp"
#include "srgvf/metrics.hpp"
#include "srgvf/replay.hpp"
#include "srgvf/signals.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace srgvf {

/// Map, its epsilon-greedy chain and the experiment's fixed signal set.
struct GridContext {
    GridMap map;
    Eigen::MatrixXd transitions;
    std::vector<SignalSpec> signals;
};

GridContext make_grid_context(const ExperimentConfig& config);

/// Reference predictions for one gamma. Row-major psi; `known[s]` is false
/// for states a Monte Carlo reference never visited.
struct GridReferences {
    double gamma = 0.0;
    std::size_t states = 0;
    std::vector<double> psi;
    std::vector<std::vector<double>> values;  // per signal
    std::vector<char> sr_known;
    std::vector<std::vector<char>> value_known;
};

GridReferences make_references(const ExperimentConfig& config, const GridContext& ctx, double gamma,
                               bool with_signals = true);

struct GridRunSpec {
    double epsilon = 0.3;
    double gamma = 0.0;
    double alpha_sr = 0.1;
    double alpha = 0.1;
    std::vector<std::size_t> order;  // signal indices by activation slot
    std::int64_t interval = 50;
    std::int64_t episodes = 1;
    std::int64_t step_cap = 10000;
    std::uint64_t policy_seed = 0;
    std::uint64_t noise_seed = 0;
};

struct GridRunOutput {
    std::vector<double> sr_error;          // per episode, summed squared distance
    std::vector<std::int64_t> steps;       // per episode
    std::vector<std::int64_t> activation;  // per signal index; -1 when not in the order
    /// Per-episode error sums; series 2*i is direct, 2*i+1 SR-based, for signal i.
    ErrorAccumulator errors;
    std::int64_t capped_episodes = 0;
    bool diverged = false;
};

/// One trial: SR and every scheduled predictor pair learn together from the
/// same epsilon-greedy stream; errors are measured against the references
/// at each visited state before the update.
GridRunOutput run_grid_trial(const GridContext& ctx, const GridReferences& refs, const GridRunSpec& spec);

/// Activation order for a trial: identity, or shuffled from the trial's seed.
std::vector<std::size_t> activation_order(const ExperimentConfig& config, std::size_t trial);

struct SrSweepResult {
    std::vector<double> gammas;
    std::vector<double> alphas;
    /// [gamma][alpha][trial] summed squared distance over the run; +inf if diverged.
    std::vector<std::vector<std::vector<double>>> errors;
    std::vector<std::vector<MeanCi>> summary;
    std::vector<std::vector<std::size_t>> diverged;
    std::vector<double> best_alpha;  // per gamma
};

SrSweepResult run_sr_sweep(const ExperimentConfig& config, const GridContext& ctx);

/// Argmin of the means, ties toward the smaller alpha; non-finite means are skipped.
std::size_t best_index(const std::vector<double>& alphas, const std::vector<double>& means);

/// SR step size per gamma: configured, or taken from an SR sweep.
std::vector<double> resolve_sr_alphas(const ExperimentConfig& config, const GridContext& ctx);

struct PredictorSweepResult {
    std::vector<double> gammas;
    std::vector<double> alphas;
    std::vector<double> alpha_sr;  // per gamma
    std::size_t signals = 0;
    std::size_t trials = 0;
    /// [gamma][alpha][signal][method][trial]
    std::vector<std::vector<std::vector<std::array<std::vector<double>, 2>>>> mse;
    std::vector<std::vector<std::vector<std::array<std::vector<double>, 2>>>> nmse;
    /// [gamma][alpha][method][trial]: NMSE summed across signals.
    std::vector<std::vector<std::array<std::vector<double>, 2>>> summed;
    std::vector<std::vector<std::size_t>> diverged_trials;
    std::vector<std::size_t> zero_signal_groups;  // per gamma, count over trials

    double mean_nmse(std::size_t g, std::size_t a, std::size_t signal, Method m) const;
    MeanCi summed_nmse(std::size_t g, std::size_t a, Method m) const;
    /// (direct better, SR better) by trial-mean NMSE; ties count as direct.
    std::pair<std::size_t, std::size_t> win_counts(std::size_t g, std::size_t a) const;
    /// Best-alpha summed NMSE for a method at gamma index g.
    double best_summed(std::size_t g, Method m) const;
};

PredictorSweepResult run_predictor_sweep(const ExperimentConfig& config, const GridContext& ctx,
                                         const std::vector<double>& alpha_sr);

struct IncrementalResult {
    double gamma = 0.0;
    double alpha = 0.0;
    double alpha_sr = 0.0;
    std::size_t episodes = 0;
    std::vector<std::int64_t> activation;  // per signal
    std::array<std::vector<MeanCi>, 2> summed;  // per method, per episode
    std::vector<MeanCi> sr_error;               // per episode, mean per step
    /// [signal][method][episode]: trial-mean NMSE.
    std::vector<std::array<std::vector<double>, 2>> signal_nmse;
};

/// Fixed signal order; gamma = gammas[0], alpha = alphas[0].
IncrementalResult run_incremental_curves(const ExperimentConfig& config, const GridContext& ctx, double alpha_sr);

struct ReplayTrial {
    ReplayResult run;
    std::vector<ReplaySignalError> errors;
    std::vector<std::array<double, 2>> final_mse;  // per target
};

struct ReplayExperimentResult {
    std::vector<std::string> targets;
    std::vector<ReplayTrial> trials;
    std::size_t steps = 0;

    /// Per target: trial-mean of the final running MSE.
    std::vector<std::array<double, 2>> mean_final_mse() const;
};

ReplayConfig make_replay_config(const ExperimentConfig& config);
/// Dataset for a trial: the configured file, or a synthetic stream seeded per trial.
Dataset load_replay_dataset(const ExperimentConfig& config, std::size_t trial);
ReplayExperimentResult run_replay_experiment(const ExperimentConfig& config);

/// Runs body(0..n-1) on up to `workers` threads; results must be written to
/// per-index slots so output never depends on scheduling.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

/// CSV writers. Every file begins with "# srgvf <command>" and
/// "# config_hash=<hex>" lines.
void write_sr_sweep(const SrSweepResult& r, const ExperimentConfig& config, const std::filesystem::path& dir);
void write_predictor_sweep(const PredictorSweepResult& r, const ExperimentConfig& config,
                           const std::filesystem::path& dir);
void write_incremental(const IncrementalResult& r, const ExperimentConfig& config, const std::filesystem::path& dir);
void write_replay(const ReplayExperimentResult& r, const ExperimentConfig& config, const std::filesystem::path& dir);

}  // namespace srgvf

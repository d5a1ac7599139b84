#pragma once

#include "srgvf/gridworld.hpp"
#include "srgvf/signals.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace srgvf {

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form SR (I - gamma P)^{-1} by linear solve. P's terminal rows
/// must be zero. Throws SingularSystemError when the system has no unique
/// solution (gamma = 1 with a recurrent non-terminal class).
Eigen::MatrixXd analytic_sr(const Eigen::MatrixXd& transitions, double gamma);

/// GVF values solving (I - gamma P) v = cbar.
Eigen::VectorXd analytic_gvf(const Eigen::MatrixXd& transitions, double gamma, const Eigen::VectorXd& cbar);

struct AnalyticSolution {
    Eigen::MatrixXd psi;
    std::vector<Eigen::VectorXd> values;  // indexed like the signal list
    double gamma = 0.0;
};

AnalyticSolution analytic_solution(const GridMap& map, double epsilon, double gamma,
                                   const std::vector<SignalSpec>& signals);

/// Every-visit Monte Carlo averages from the start state. `width` is 1 for
/// signal returns and |S| for SR returns (row-major per state).
struct MonteCarloReference {
    std::size_t width = 1;
    std::vector<double> sums;
    std::vector<std::uint64_t> visits;
    std::uint64_t episodes_used = 0;

    bool has(std::size_t state) const { return visits[state] > 0; }
    double mean(std::size_t state, std::size_t k = 0) const;
    std::vector<double> mean_row(std::size_t state) const;
};

/// Count-weighted union of two shards over the same map and target.
MonteCarloReference merge(const MonteCarloReference& a, const MonteCarloReference& b);

struct RolloutLimits {
    std::int64_t step_cap = 10000;
};

MonteCarloReference mc_reference_signal(const GridMap& map, double epsilon, const SignalSpec& spec, double gamma,
                                        std::uint64_t episodes, std::mt19937_64& rng, RolloutLimits limits = {});

/// SR target: discounted indicator returns, counting the current state and
/// the terminal visit.
MonteCarloReference mc_reference_sr(const GridMap& map, double epsilon, double gamma, std::uint64_t episodes,
                                    std::mt19937_64& rng, RolloutLimits limits = {});

struct ReferenceHeader {
    std::uint64_t map_hash = 0;
    double gamma = 0.0;
    double epsilon = 0.0;
    std::uint64_t episodes = 0;
    std::uint64_t seed = 0;
};

/// CSV: "# map_hash=..,gamma=..,epsilon=..,episodes=..,seed=.." then
/// "state,visits,v0[,v1..]". States without visits are omitted.
void write_reference(std::ostream& os, const ReferenceHeader& header, const MonteCarloReference& ref);
MonteCarloReference read_reference(std::istream& is, ReferenceHeader& header, std::size_t state_count);

struct ScalingCounts {
    std::uint64_t direct = 0;
    std::uint64_t sr_based = 0;
    /// h above which direct needs more weights; +inf for a single discount.
    double crossover_h = std::numeric_limits<double>::infinity();
};

/// Weights needed for f*h tabular predictions: f*h*|S| direct versus
/// f*|S|^2 + h*|S| with f SRs and h one-step predictors.
ScalingCounts scaling_weights(std::uint64_t discounts, std::uint64_t predictors, std::uint64_t states);

}  // namespace srgvf

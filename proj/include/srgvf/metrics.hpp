#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace srgvf {

enum class Method { direct, sr };

const char* method_name(Method m);

/// Per-episode squared-error sums for a set of series, keyed by
/// (signal, method, alpha, gamma). Series are registered up front and
/// addressed by handle on the hot path.
class ErrorAccumulator {
public:
    struct Key {
        std::size_t signal = 0;
        Method method = Method::direct;
        double alpha = 0.0;
        double gamma = 0.0;
    };

    std::size_t add_series(const Key& key);
    void add(std::size_t series, double squared_error);
    /// Closes the current episode for every series.
    void end_episode();

    std::size_t series_count() const { return keys_.size(); }
    const Key& key(std::size_t series) const { return keys_[series]; }
    std::size_t episodes() const { return episodes_; }
    std::size_t calls(std::size_t series) const { return calls_[series]; }
    std::span<const double> episode_sums(std::size_t series) const { return sums_[series]; }
    /// Cumulative MSE over all closed episodes.
    double mse(std::size_t series) const;

private:
    std::vector<Key> keys_;
    std::vector<std::vector<double>> sums_;
    std::vector<double> open_;
    std::vector<std::size_t> calls_;
    std::size_t episodes_ = 0;
};

/// (1/E) * sum of per-episode squared-error sums; E = per_episode_sums.size().
double grid_mse(std::span<const double> per_episode_sums);

struct MseEntry {
    std::size_t signal = 0;
    Method method = Method::direct;
    double alpha = 0.0;
    double mse = 0.0;
    double nmse = 0.0;
};

struct NmseTable {
    std::vector<MseEntry> entries;
    /// Signals whose errors are all zero; their entries stay zero.
    std::vector<std::size_t> zero_signals;
};

/// Divides each signal's errors by that signal's maximum over every alpha
/// and both methods. The table must hold a single gamma.
NmseTable grid_nmse(std::vector<MseEntry> table);

/// G_t = C_{t+1} + gamma * G_{t+1}, with the last return 0. Throws for gamma >= 1.
std::vector<double> discounted_returns(std::span<const double> cumulants, double gamma);

/// Running mean of (V_t - G_t)^2 from index 0 to t.
std::vector<double> running_mse(std::span<const double> predictions, std::span<const double> returns);

std::vector<double> replay_mse_vs_return(std::span<const double> predictions, std::span<const double> cumulants,
                                         double gamma);

struct NormalizedPair {
    double direct = 0.0;
    double sr = 0.0;
    bool all_zero = false;
};

NormalizedPair replay_nmse(double direct_mse, double sr_mse);

/// Divides every value by the group maximum; all-zero groups stay zero and
/// return false.
bool normalize_by_max(std::span<double> values);

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;  // 1.96 * sample std / sqrt(n)
};

MeanCi mean_ci95(std::span<const double> samples);

}  // namespace srgvf

#include "srgvf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace srgvf {

const char* method_name(Method m)
{
    return m == Method::direct ? "direct" : "sr";
}

std::size_t ErrorAccumulator::add_series(const Key& key)
{
    keys_.push_back(key);
    sums_.emplace_back(episodes_, 0.0);
    open_.push_back(0.0);
    calls_.push_back(0);
    return keys_.size() - 1;
}

void ErrorAccumulator::add(std::size_t series, double squared_error)
{
    if (!(squared_error >= 0.0))
        throw std::invalid_argument("error accumulator: squared error must be non-negative");
    open_[series] += squared_error;
    calls_[series] += 1;
}

void ErrorAccumulator::end_episode()
{
    for (std::size_t s = 0; s < keys_.size(); ++s) {
        sums_[s].push_back(open_[s]);
        open_[s] = 0.0;
    }
    ++episodes_;
}

double ErrorAccumulator::mse(std::size_t series) const
{
    return grid_mse(sums_[series]);
}

double grid_mse(std::span<const double> per_episode_sums)
{
    if (per_episode_sums.empty())
        throw std::invalid_argument("grid_mse: at least one episode is required");
    double total = 0.0;
    for (double s : per_episode_sums)
        total += s;
    return total / static_cast<double>(per_episode_sums.size());
}

NmseTable grid_nmse(std::vector<MseEntry> table)
{
    if (table.empty())
        throw std::invalid_argument("grid_nmse: empty table");
    std::map<std::size_t, double> max_by_signal;
    for (const auto& e : table) {
        if (!(e.mse >= 0.0))
            throw std::invalid_argument("grid_nmse: MSE values must be non-negative");
        auto [it, inserted] = max_by_signal.try_emplace(e.signal, e.mse);
        if (!inserted)
            it->second = std::max(it->second, e.mse);
    }
    NmseTable out;
    for (const auto& [signal, peak] : max_by_signal)
        if (peak == 0.0)
            out.zero_signals.push_back(signal);
    for (auto& e : table) {
        const double peak = max_by_signal[e.signal];
        e.nmse = peak > 0.0 ? e.mse / peak : 0.0;
    }
    out.entries = std::move(table);
    return out;
}

std::vector<double> discounted_returns(std::span<const double> cumulants, double gamma)
{
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("discounted_returns: gamma must lie in [0, 1)");
    std::vector<double> g(cumulants.size(), 0.0);
    for (std::size_t t = cumulants.size(); t-- > 1;)
        g[t - 1] = cumulants[t] + gamma * g[t];
    return g;
}

std::vector<double> running_mse(std::span<const double> predictions, std::span<const double> returns)
{
    if (predictions.size() != returns.size())
        throw std::invalid_argument("running_mse: length mismatch");
    std::vector<double> out(predictions.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < predictions.size(); ++t) {
        const double e = predictions[t] - returns[t];
        sum += e * e;
        out[t] = sum / static_cast<double>(t + 1);
    }
    return out;
}

std::vector<double> replay_mse_vs_return(std::span<const double> predictions, std::span<const double> cumulants,
                                         double gamma)
{
    const auto g = discounted_returns(cumulants, gamma);
    return running_mse(predictions, g);
}

NormalizedPair replay_nmse(double direct_mse, double sr_mse)
{
    if (!(direct_mse >= 0.0 && sr_mse >= 0.0))
        throw std::invalid_argument("replay_nmse: MSE values must be non-negative");
    const double peak = std::max(direct_mse, sr_mse);
    if (peak == 0.0)
        return {0.0, 0.0, true};
    return {direct_mse / peak, sr_mse / peak, false};
}

bool normalize_by_max(std::span<double> values)
{
    double peak = 0.0;
    for (double v : values) {
        if (!(v >= 0.0))
            throw std::invalid_argument("normalize_by_max: values must be non-negative");
        peak = std::max(peak, v);
    }
    if (peak == 0.0)
        return false;
    for (double& v : values)
        v /= peak;
    return true;
}

MeanCi mean_ci95(std::span<const double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("mean_ci95: no samples");
    double mean = 0.0;
    for (double s : samples)
        mean += s;
    mean /= static_cast<double>(samples.size());
    if (samples.size() < 2)
        return {mean, 0.0};
    double var = 0.0;
    for (double s : samples)
        var += (s - mean) * (s - mean);
    var /= static_cast<double>(samples.size() - 1);
    return {mean, 1.96 * std::sqrt(var / static_cast<double>(samples.size()))};
}

}  // namespace srgvf

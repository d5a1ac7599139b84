#pragma once

#include "srgvf/features.hpp"
#include "srgvf/metrics.hpp"
#include "srgvf/tilecode.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srgvf {

class DatasetError : public std::runtime_error {
public:
    DatasetError(std::size_t row, const std::string& what);
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// Time series replayed in place of a live robot stream. Channel ranges come
/// from a full pass over the data.
struct Dataset {
    std::vector<std::string> names;            // channel names, without the t column
    std::vector<std::vector<double>> columns;  // one per channel
    std::vector<double> time;
    std::vector<double> min;
    std::vector<double> max;
    double rate_hz = 30.0;
    std::vector<std::string> warnings;

    std::size_t length() const { return time.size(); }
    std::size_t channel(const std::string& name) const;
    /// Maps into [0, 1] by the observed range; degenerate channels map to 0.
    double normalize(std::size_t channel, double value) const;
};

/// Parses "t,<channel>..." CSV. Rows are 1-based in diagnostics, counting the header.
Dataset ingest(std::istream& is);
Dataset ingest_file(const std::string& path);
void write_dataset(std::ostream& os, const Dataset& ds);

struct SyntheticDatasetConfig {
    std::size_t steps = 21600;  // 12 minutes at 30 Hz
    std::uint64_t seed = 1;
    double rate_hz = 30.0;
    double circuit_steps = 430.0;  // ~50 circuits in 12 minutes
};

/// Two-joint arm tracing a loop: shoulder/elbow position, speed and current.
Dataset synthetic_dataset(const SyntheticDatasetConfig& config);

/// tr_{t+1} = 0.8 tr_t + 0.2 x_{t+1}, seeded with the first observation.
class TraceState {
public:
    static constexpr double decay = 0.8;
    static constexpr double mix = 0.2;

    explicit TraceState(double first_observation) : value_(first_observation) {}
    double value() const { return value_; }
    double update(double observation)
    {
        value_ = decay * value_ + mix * observation;
        return value_;
    }

private:
    double value_;
};

/// Per timestep: [pos_1, trace_1, pos_2, trace_2, ...] normalized, then tile coded.
std::vector<FeatureVector> build_features(const Dataset& ds, std::span<const std::string> input_channels,
                                          const TileCoder& coder);

struct StepSizeSchedule {
    double alpha0 = 0.1;
    std::int64_t total_steps = 1;
    std::int64_t activation_offset = 0;
};

/// max(0, alpha0 - (t - t_i) * alpha0 / T) / active_features.
double schedule_alpha(const StepSizeSchedule& s, std::int64_t t, std::size_t active_features);

struct ReplayConfig {
    std::vector<std::string> input_channels;
    std::vector<std::string> target_channels;  // activation order
    std::int64_t activation_interval = 2000;
    double gamma = 0.95;
    double alpha0 = 0.1;
    TileCoderConfig coder;
    bool from_start = false;  // every target active at t = 0
};

struct ReplayRecord {
    std::int64_t t = 0;
    std::size_t signal = 0;  // index into target_channels
    Method method = Method::direct;
    double prediction = 0.0;
    double cumulant = 0.0;  // target channel at t
    double alpha = 0.0;
};

struct ReplayResult {
    std::vector<ReplayRecord> records;
    std::vector<std::int64_t> activation;  // per target; -1 if never active
    std::size_t steps = 0;
    std::uint64_t clamped_inputs = 0;
};

/// Streams the dataset through one SR and a registry of predictors in a
/// continuing task (gamma at every step, no terminal flush). Throws
/// DivergenceError naming the offending timestep.
ReplayResult run_replay(const Dataset& ds, const ReplayConfig& config);

struct ReplaySignalError {
    std::size_t signal = 0;
    Method method = Method::direct;
    std::vector<std::int64_t> t;
    std::vector<double> running_mse;
};

/// Running MSE against truncated returns, per target and method.
std::vector<ReplaySignalError> replay_errors(const ReplayResult& result, std::size_t targets, double gamma);

}  // namespace srgvf

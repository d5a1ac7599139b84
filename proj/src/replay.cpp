#include "srgvf/replay.hpp"

#include "srgvf/gvf.hpp"
#include "srgvf/successor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace srgvf {

namespace {

std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& s, double& out)
{
    if (s.empty())
        return false;
    const char* first = s.data();
    if (*first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

DatasetError::DatasetError(std::size_t row, const std::string& what)
    : std::runtime_error("dataset row " + std::to_string(row) + ": " + what), row_(row)
{
}

std::size_t Dataset::channel(const std::string& name) const
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw std::invalid_argument("dataset: no channel named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

double Dataset::normalize(std::size_t ch, double value) const
{
    const double range = max[ch] - min[ch];
    if (range <= 0.0)
        return 0.0;
    return (value - min[ch]) / range;
}

Dataset ingest(std::istream& is)
{
    Dataset ds;
    std::string line;
    if (!std::getline(is, line))
        throw DatasetError(1, "empty file");
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "t")
        throw DatasetError(1, "header must start with 't' followed by at least one channel");
    ds.names.assign(header.begin() + 1, header.end());
    for (std::size_t i = 0; i < ds.names.size(); ++i) {
        if (ds.names[i].empty())
            throw DatasetError(1, "empty channel name");
        for (std::size_t j = 0; j < i; ++j)
            if (ds.names[j] == ds.names[i])
                throw DatasetError(1, "duplicate channel '" + ds.names[i] + "'");
    }
    ds.columns.resize(ds.names.size());

    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw DatasetError(row, "expected " + std::to_string(header.size()) + " columns, found " +
                                        std::to_string(cells.size()));
        double v = 0.0;
        if (!parse_double(cells[0], v))
            throw DatasetError(row, "non-numeric value '" + cells[0] + "' in column t");
        ds.time.push_back(v);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (!parse_double(cells[c], v))
                throw DatasetError(row, "non-numeric value '" + cells[c] + "' in column " + header[c]);
            ds.columns[c - 1].push_back(v);
        }
    }
    if (ds.time.empty())
        throw DatasetError(row, "no data rows");

    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        const auto [lo, hi] = std::minmax_element(ds.columns[c].begin(), ds.columns[c].end());
        ds.min.push_back(*lo);
        ds.max.push_back(*hi);
        if (*lo == *hi)
            ds.warnings.push_back("channel '" + ds.names[c] + "' is constant; it normalizes to 0");
    }
    if (ds.time.size() > 1 && ds.time[1] > ds.time[0])
        ds.rate_hz = 1.0 / (ds.time[1] - ds.time[0]);
    return ds;
}

Dataset ingest_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open dataset '" + path + "'");
    return ingest(in);
}

void write_dataset(std::ostream& os, const Dataset& ds)
{
    const auto old_precision = os.precision(17);
    os << 't';
    for (const auto& n : ds.names)
        os << ',' << n;
    os << '\n';
    for (std::size_t t = 0; t < ds.length(); ++t) {
        os << ds.time[t];
        for (const auto& col : ds.columns)
            os << ',' << col[t];
        os << '\n';
    }
    os.precision(old_precision);
}

Dataset synthetic_dataset(const SyntheticDatasetConfig& config)
{
    if (config.steps < 2)
        throw std::invalid_argument("synthetic dataset: at least two steps are required");
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> jitter(0.0, 1.0);

    const std::size_t n = config.steps;
    const double dt = 1.0 / config.rate_hz;
    const double base_rate = 2.0 * std::numbers::pi / config.circuit_steps;

    // The operator's speed wanders slowly around the nominal circuit rate.
    std::vector<double> phase(n);
    double pace = 1.0;
    for (std::size_t t = 1; t < n; ++t) {
        pace += 0.02 * (1.0 - pace) + 0.01 * jitter(rng);
        pace = std::clamp(pace, 0.5, 1.5);
        phase[t] = phase[t - 1] + base_rate * pace;
    }

    auto shoulder = [](double p) { return 0.6 * std::sin(p) + 0.15 * std::sin(2.0 * p + 0.7); };
    auto elbow = [](double p) { return 0.5 * std::cos(p) + 0.10 * std::sin(3.0 * p + 0.3); };

    Dataset ds;
    ds.rate_hz = config.rate_hz;
    ds.names = {"shoulder_current", "shoulder_pos", "shoulder_speed", "elbow_current", "elbow_pos", "elbow_speed"};
    ds.columns.assign(ds.names.size(), std::vector<double>(n));
    ds.time.resize(n);

    double prev_speed[2] = {0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
        ds.time[t] = static_cast<double>(t) * dt;
        const double p = phase[t];
        const double pp = t > 0 ? phase[t - 1] : phase[t];
        const double pos[2] = {shoulder(p), elbow(p)};
        const double prev_pos[2] = {shoulder(pp), elbow(pp)};
        for (int j = 0; j < 2; ++j) {
            const double speed = (pos[j] - prev_pos[j]) / dt;
            const double accel = t > 0 ? (speed - prev_speed[j]) / dt : 0.0;
            const double load = j == 0 ? 0.35 : 0.2;
            const double current = 0.8 * speed + 0.05 * accel + load * std::cos(pos[j]);
            prev_speed[j] = speed;
            ds.columns[static_cast<std::size_t>(3 * j)][t] = current + 0.02 * jitter(rng);
            ds.columns[static_cast<std::size_t>(3 * j + 1)][t] = pos[j] + 0.002 * jitter(rng);
            ds.columns[static_cast<std::size_t>(3 * j + 2)][t] = speed + 0.01 * jitter(rng);
        }
    }
    for (const auto& col : ds.columns) {
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        ds.min.push_back(*lo);
        ds.max.push_back(*hi);
    }
    return ds;
}

std::vector<FeatureVector> build_features(const Dataset& ds, std::span<const std::string> input_channels,
                                          const TileCoder& coder)
{
    if (coder.config().input_dim != 2 * input_channels.size())
        throw std::invalid_argument("build_features: coder input dimension must be twice the channel count");
    std::vector<std::size_t> channels;
    for (const auto& name : input_channels)
        channels.push_back(ds.channel(name));

    std::vector<TraceState> traces;
    for (auto ch : channels)
        traces.emplace_back(ds.columns[ch][0]);

    std::vector<FeatureVector> out;
    out.reserve(ds.length());
    std::vector<double> input(2 * channels.size());
    for (std::size_t t = 0; t < ds.length(); ++t) {
        for (std::size_t j = 0; j < channels.size(); ++j) {
            const double pos = ds.columns[channels[j]][t];
            const double tr = t == 0 ? traces[j].value() : traces[j].update(pos);
            input[2 * j] = ds.normalize(channels[j], pos);
            input[2 * j + 1] = ds.normalize(channels[j], tr);
        }
        out.push_back(coder.encode(input));
    }
    return out;
}

double schedule_alpha(const StepSizeSchedule& s, std::int64_t t, std::size_t active_features)
{
    if (t < s.activation_offset)
        throw std::invalid_argument("schedule_alpha: t precedes the activation offset");
    if (active_features == 0)
        throw std::invalid_argument("schedule_alpha: at least one active feature is required");
    if (s.total_steps <= 0)
        throw std::invalid_argument("schedule_alpha: total_steps must be positive");
    const double elapsed = static_cast<double>(t - s.activation_offset);
    const double base = std::max(0.0, s.alpha0 - elapsed * s.alpha0 / static_cast<double>(s.total_steps));
    return base / static_cast<double>(active_features);
}

ReplayResult run_replay(const Dataset& ds, const ReplayConfig& config)
{
    if (config.target_channels.empty())
        throw std::invalid_argument("replay: no target channels");
    if (config.activation_interval <= 0)
        throw std::invalid_argument("replay: activation interval must be positive");

    TileCoder coder(config.coder);
    const auto features = build_features(ds, config.input_channels, coder);
    const auto steps = static_cast<std::int64_t>(ds.length());
    const std::size_t d = coder.output_dimension();

    std::vector<std::size_t> targets;
    for (const auto& name : config.target_channels)
        targets.push_back(ds.channel(name));

    ReplayResult result;
    result.steps = ds.length();

    SuccessorMatrix sr(d, config.gamma, 0.0);
    const StepSizeSchedule sr_schedule{config.alpha0, steps, 0};
    PredictorRegistry registry(d);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::int64_t activation = config.from_start ? 0 : static_cast<std::int64_t>(i) * config.activation_interval;
        const StepSizeSchedule schedule{config.alpha0, steps, activation};
        auto step = [schedule](std::int64_t t, std::size_t k) { return schedule_alpha(schedule, t, k); };
        registry.add_slot(i, activation, step, step);
        result.activation.push_back(activation < steps ? activation : -1);
    }

    std::vector<double> psi(d);
    std::vector<double> cumulants(targets.size());
    for (std::int64_t t = 0; t < steps; ++t) {
        const auto& phi = features[static_cast<std::size_t>(t)];
        registry.activate_due(t);
        sr.predict_into(phi, psi);
        const std::size_t k = phi.active_count();
        for (const auto& slot : registry.slots()) {
            if (!slot.active)
                continue;
            const double c = ds.columns[targets[slot.signal_id]][static_cast<std::size_t>(t)];
            const double alpha = slot.direct.step_size()(t, k);
            const auto w = slot.cumulant.weights();
            double v_sr = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                v_sr += psi[j] * w[j];
            result.records.push_back({t, slot.signal_id, Method::direct, slot.direct.predict(phi), c, alpha});
            result.records.push_back({t, slot.signal_id, Method::sr, v_sr, c, alpha});
        }
        if (t + 1 == steps)
            break;

        const auto& phi_next = features[static_cast<std::size_t>(t + 1)];
        for (std::size_t i = 0; i < targets.size(); ++i)
            cumulants[i] = ds.columns[targets[i]][static_cast<std::size_t>(t + 1)];
        sr.set_step_size(schedule_alpha(sr_schedule, t, k));
        registry.step(sr, Transition{phi, phi_next, config.gamma, false, cumulants}, t);
        if (sr.diverged() || registry.any_diverged())
            throw DivergenceError("replay: learner diverged at timestep " + std::to_string(t));
    }
    result.clamped_inputs = coder.clamped_count();
    return result;
}

std::vector<ReplaySignalError> replay_errors(const ReplayResult& result, std::size_t targets, double gamma)
{
    std::vector<ReplaySignalError> out;
    for (std::size_t i = 0; i < targets; ++i) {
        for (Method m : {Method::direct, Method::sr}) {
            ReplaySignalError e;
            e.signal = i;
            e.method = m;
            std::vector<double> predictions, cumulants;
            for (const auto& r : result.records) {
                if (r.signal != i || r.method != m)
                    continue;
                e.t.push_back(r.t);
                predictions.push_back(r.prediction);
                cumulants.push_back(r.cumulant);
            }
            if (!predictions.empty())
                e.running_mse = replay_mse_vs_return(predictions, cumulants, gamma);
            out.push_back(std::move(e));
        }
    }
    return out;
}

}  // namespace srgvf

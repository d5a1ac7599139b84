#include "srgvf/experiments.hpp"

#include "srgvf/gvf.hpp"
#include "srgvf/oracle.hpp"
#include "srgvf/successor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace srgvf {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double inf = std::numeric_limits<double>::infinity();

std::string format_gamma(double g)
{
    std::ostringstream os;
    os << std::setprecision(6) << g;
    return os.str();
}

std::ofstream open_csv(const std::filesystem::path& path, const char* command, const ExperimentConfig& config)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    os << "# srgvf " << command << '\n';
    os << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << config.hash() << std::dec
       << std::setfill(' ') << '\n';
    os << std::setprecision(10);
    return os;
}

// Loads a cached Monte Carlo reference when its header matches, otherwise
// computes it and, with a cache directory configured, stores it.
template <class Compute>
MonteCarloReference cached_reference(const ExperimentConfig& config, const GridContext& ctx, const std::string& name,
                                     const ReferenceHeader& want, Compute&& compute)
{
    std::filesystem::path path;
    if (!config.reference_dir.empty()) {
        path = std::filesystem::path(config.reference_dir) / name;
        std::ifstream in(path);
        if (in) {
            ReferenceHeader got;
            try {
                auto ref = read_reference(in, got, ctx.map.state_count());
                if (got.map_hash == want.map_hash && got.gamma == want.gamma && got.epsilon == want.epsilon &&
                    got.episodes == want.episodes && got.seed == want.seed)
                    return ref;
            } catch (const std::exception&) {
                // stale or foreign file; recompute below
            }
        }
    }
    auto ref = compute();
    if (!path.empty()) {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path);
        write_reference(out, want, ref);
    }
    return ref;
}

}  // namespace

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body)
{
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    const auto count = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

GridContext make_grid_context(const ExperimentConfig& config)
{
    GridMap map = config.map.empty() ? make_dayan_map() : load_map_file(config.map);
    Eigen::MatrixXd transitions = transition_matrix(map, config.epsilon);
    std::mt19937_64 rng(seed_tree(config.seed, 0, "signals"));
    SignalSampling sampling{map.width(), map.height(), config.shortest_path_probability, config.noise_sigma};
    std::vector<SignalSpec> signals;
    for (std::size_t i = 0; i < config.signals; ++i)
        signals.push_back(sample_spec(rng, sampling, i));
    return {std::move(map), std::move(transitions), std::move(signals)};
}

GridReferences make_references(const ExperimentConfig& config, const GridContext& ctx, double gamma,
                               bool with_signals)
{
    const auto n = ctx.map.state_count();
    GridReferences refs;
    refs.gamma = gamma;
    refs.states = n;
    refs.psi.resize(n * n);

    if (config.reference == "analytic") {
        const Eigen::MatrixXd psi = analytic_sr(ctx.transitions, gamma);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                refs.psi[i * n + j] = psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        refs.sr_known.assign(n, 1);
        if (with_signals) {
            for (const auto& spec : ctx.signals) {
                const auto mf = mean_field(spec, ctx.map, config.epsilon);
                const Eigen::VectorXd v =
                    psi * Eigen::Map<const Eigen::VectorXd>(mf.data(), static_cast<Eigen::Index>(n));
                refs.values.emplace_back(v.data(), v.data() + n);
                refs.value_known.emplace_back(n, 1);
            }
        }
        return refs;
    }

    const RolloutLimits limits{config.step_cap};
    const std::string tag = format_gamma(gamma);
    {
        const auto seed = seed_tree(config.seed, 0, "mc_sr_" + tag);
        const ReferenceHeader header{ctx.map.hash(), gamma, config.epsilon, config.mc_episodes_sr, seed};
        const auto mc = cached_reference(config, ctx, "sr_g" + tag + ".csv", header, [&] {
            std::mt19937_64 rng(seed);
            return mc_reference_sr(ctx.map, config.epsilon, gamma, config.mc_episodes_sr, rng, limits);
        });
        refs.sr_known.assign(n, 0);
        for (std::size_t s = 0; s < n; ++s) {
            if (!mc.has(s))
                continue;
            refs.sr_known[s] = 1;
            for (std::size_t j = 0; j < n; ++j)
                refs.psi[s * n + j] = mc.mean(s, j);
        }
    }
    if (with_signals) {
        for (const auto& spec : ctx.signals) {
            const auto seed = seed_tree(config.seed, spec.id, "mc_signal_" + tag);
            const ReferenceHeader header{ctx.map.hash(), gamma, config.epsilon, config.mc_episodes_signal, seed};
            const auto mc = cached_reference(
                config, ctx, "signal" + std::to_string(spec.id) + "_g" + tag + ".csv", header, [&] {
                    std::mt19937_64 rng(seed);
                    return mc_reference_signal(ctx.map, config.epsilon, spec, gamma, config.mc_episodes_signal, rng,
                                               limits);
                });
            std::vector<double> values(n, 0.0);
            std::vector<char> known(n, 0);
            for (std::size_t s = 0; s < n; ++s) {
                if (mc.has(s)) {
                    values[s] = mc.mean(s);
                    known[s] = 1;
                }
            }
            refs.values.push_back(std::move(values));
            refs.value_known.push_back(std::move(known));
        }
    }
    return refs;
}

std::vector<std::size_t> activation_order(const ExperimentConfig& config, std::size_t trial)
{
    std::vector<std::size_t> order(config.signals);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.randomize_order) {
        std::mt19937_64 rng(seed_tree(config.seed, trial, "order"));
        std::shuffle(order.begin(), order.end(), rng);
    }
    return order;
}

GridRunOutput run_grid_trial(const GridContext& ctx, const GridReferences& refs, const GridRunSpec& spec)
{
    const auto& map = ctx.map;
    const auto n = map.state_count();
    const auto signal_count = ctx.signals.size();
    if (refs.states != n)
        throw std::invalid_argument("grid trial: references do not match the map");
    if (!spec.order.empty() && refs.values.size() != signal_count)
        throw std::invalid_argument("grid trial: references lack signal values");

    std::vector<FeatureVector> one_hot;
    one_hot.reserve(n);
    for (std::size_t s = 0; s < n; ++s)
        one_hot.push_back(encode_one_hot(s, n));

    SuccessorMatrix sr(n, spec.gamma, spec.alpha_sr);
    PredictorRegistry registry(n);
    GridRunOutput out;
    out.activation.assign(signal_count, -1);
    for (std::size_t k = 0; k < spec.order.size(); ++k) {
        const auto signal = spec.order[k];
        if (signal >= signal_count)
            throw std::invalid_argument("grid trial: signal index out of range");
        const auto activation = static_cast<std::int64_t>(k) * spec.interval;
        registry.add_slot(signal, activation, constant_step_size(spec.alpha), constant_step_size(spec.alpha));
        out.activation[signal] = activation;
    }
    for (std::size_t i = 0; i < signal_count; ++i) {
        out.errors.add_series({i, Method::direct, spec.alpha, spec.gamma});
        out.errors.add_series({i, Method::sr, spec.alpha, spec.gamma});
    }

    std::mt19937_64 policy_rng(spec.policy_seed);
    std::mt19937_64 noise_rng(spec.noise_seed);
    std::vector<double> cumulants(signal_count, nan);

    for (std::int64_t episode = 0; episode < spec.episodes && !out.diverged; ++episode) {
        registry.activate_due(episode);
        GridState state{map.start(), 0};
        double sr_error = 0.0;
        std::int64_t steps = 0;
        while (true) {
            if (state.episode_step >= spec.step_cap) {
                ++out.capped_episodes;
                break;
            }
            const auto s = map.state_index(state.position);
            const auto row = std::as_const(sr).row(s);
            if (refs.sr_known[s]) {
                const double* ref = refs.psi.data() + s * n;
                for (std::size_t j = 0; j < n; ++j) {
                    const double e = row[j] - ref[j];
                    sr_error += e * e;
                }
            }
            for (const auto& slot : std::as_const(registry).slots()) {
                if (!slot.active)
                    continue;
                const auto i = slot.signal_id;
                if (!refs.value_known[i][s])
                    continue;
                const double target = refs.values[i][s];
                const double v_direct = slot.direct.weights()[s] - target;
                const auto w = slot.cumulant.weights();
                double v_sr = -target;
                for (std::size_t j = 0; j < n; ++j)
                    v_sr += row[j] * w[j];
                out.errors.add(2 * i, v_direct * v_direct);
                out.errors.add(2 * i + 1, v_sr * v_sr);
            }

            const Action action = select_action(map, state, spec.epsilon, policy_rng);
            const StepResult next = step(map, state, action);
            for (std::size_t i = 0; i < signal_count; ++i)
                cumulants[i] = evaluate(ctx.signals[i], state.position.x, state.position.y, next.terminal, noise_rng);
            const auto s_next = map.state_index(next.next.position);
            try {
                registry.step(sr, Transition{one_hot[s], one_hot[s_next], spec.gamma, next.terminal, cumulants},
                              episode);
            } catch (const DivergenceError&) {
                out.diverged = true;
            }
            ++steps;
            if (out.diverged || sr.diverged() || registry.any_diverged()) {
                out.diverged = true;
                break;
            }
            if (next.terminal)
                break;
            state = next.next;
        }
        out.errors.end_episode();
        out.sr_error.push_back(sr_error);
        out.steps.push_back(steps);
    }
    return out;
}

std::size_t best_index(const std::vector<double>& alphas, const std::vector<double>& means)
{
    if (alphas.size() != means.size() || alphas.empty())
        throw std::invalid_argument("best_index: alphas and means must match and be non-empty");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (!std::isfinite(means[i]))
            continue;
        if (!best || means[i] < means[*best] || (means[i] == means[*best] && alphas[i] < alphas[*best]))
            best = i;
    }
    if (!best)
        throw std::runtime_error("best_index: every step size diverged");
    return *best;
}

SrSweepResult run_sr_sweep(const ExperimentConfig& config, const GridContext& ctx)
{
    SrSweepResult r;
    r.gammas = config.gammas;
    r.alphas = config.sr_alphas;
    const auto G = r.gammas.size();
    const auto A = r.alphas.size();
    const auto T = config.trials;
    r.errors.assign(G, std::vector<std::vector<double>>(A, std::vector<double>(T, 0.0)));

    std::vector<GridReferences> refs;
    for (double g : r.gammas)
        refs.push_back(make_references(config, ctx, g, false));

    parallel_for(G * A * T, config.parallel, [&](std::size_t cell) {
        const auto trial = cell % T;
        const auto a = (cell / T) % A;
        const auto g = cell / (T * A);
        GridRunSpec spec;
        spec.epsilon = config.epsilon;
        spec.gamma = r.gammas[g];
        spec.alpha_sr = r.alphas[a];
        spec.episodes = config.sr_episodes;
        spec.step_cap = config.step_cap;
        spec.policy_seed = seed_tree(config.seed, trial, "policy");
        spec.noise_seed = seed_tree(config.seed, trial, "noise");
        const auto run = run_grid_trial(ctx, refs[g], spec);
        r.errors[g][a][trial] =
            run.diverged ? inf : std::accumulate(run.sr_error.begin(), run.sr_error.end(), 0.0);
    });

    r.summary.assign(G, std::vector<MeanCi>(A));
    r.diverged.assign(G, std::vector<std::size_t>(A, 0));
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<double> means(A);
        for (std::size_t a = 0; a < A; ++a) {
            const auto& e = r.errors[g][a];
            r.diverged[g][a] = static_cast<std::size_t>(std::count(e.begin(), e.end(), inf));
            r.summary[g][a] = r.diverged[g][a] ? MeanCi{inf, inf} : mean_ci95(e);
            means[a] = r.summary[g][a].mean;
        }
        r.best_alpha.push_back(r.alphas[best_index(r.alphas, means)]);
    }
    return r;
}

std::vector<double> resolve_sr_alphas(const ExperimentConfig& config, const GridContext& ctx)
{
    if (!config.sr_alpha_by_gamma.empty())
        return config.sr_alpha_by_gamma;
    return run_sr_sweep(config, ctx).best_alpha;
}

namespace {

double finite_mean(const std::vector<double>& values)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        if (std::isfinite(v)) {
            sum += v;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : nan;
}

std::vector<double> finite_only(const std::vector<double>& values)
{
    std::vector<double> out;
    for (double v : values)
        if (std::isfinite(v))
            out.push_back(v);
    return out;
}

std::size_t method_index(Method m) { return m == Method::direct ? 0 : 1; }

}  // namespace

double PredictorSweepResult::mean_nmse(std::size_t g, std::size_t a, std::size_t signal, Method m) const
{
    return finite_mean(nmse[g][a][signal][method_index(m)]);
}

MeanCi PredictorSweepResult::summed_nmse(std::size_t g, std::size_t a, Method m) const
{
    const auto values = finite_only(summed[g][a][method_index(m)]);
    if (values.empty())
        return {nan, nan};
    return mean_ci95(values);
}

std::pair<std::size_t, std::size_t> PredictorSweepResult::win_counts(std::size_t g, std::size_t a) const
{
    std::size_t direct = 0;
    std::size_t sr = 0;
    for (std::size_t i = 0; i < signals; ++i) {
        if (mean_nmse(g, a, i, Method::sr) < mean_nmse(g, a, i, Method::direct))
            ++sr;
        else
            ++direct;
    }
    return {direct, sr};
}

double PredictorSweepResult::best_summed(std::size_t g, Method m) const
{
    double best = inf;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double v = summed_nmse(g, a, m).mean;
        if (std::isfinite(v))
            best = std::min(best, v);
    }
    return best;
}

PredictorSweepResult run_predictor_sweep(const ExperimentConfig& config, const GridContext& ctx,
                                         const std::vector<double>& alpha_sr)
{
    if (alpha_sr.size() != config.gammas.size())
        throw std::invalid_argument("predictor sweep: one SR step size per gamma required");
    PredictorSweepResult r;
    r.gammas = config.gammas;
    r.alphas = config.alphas;
    r.alpha_sr = alpha_sr;
    r.signals = ctx.signals.size();
    r.trials = config.trials;
    const auto G = r.gammas.size();
    const auto A = r.alphas.size();
    const auto S = r.signals;
    const auto T = r.trials;

    using PerMethod = std::array<std::vector<double>, 2>;
    const PerMethod blank{std::vector<double>(T, 0.0), std::vector<double>(T, 0.0)};
    r.mse.assign(G, std::vector<std::vector<PerMethod>>(A, std::vector<PerMethod>(S, blank)));
    r.nmse = r.mse;
    r.summed.assign(G, std::vector<PerMethod>(A, blank));
    r.diverged_trials.assign(G, std::vector<std::size_t>(A, 0));
    r.zero_signal_groups.assign(G, 0);
    std::vector<std::vector<std::vector<char>>> diverged(G, std::vector<std::vector<char>>(A, std::vector<char>(T, 0)));

    std::vector<GridReferences> refs;
    for (double g : r.gammas)
        refs.push_back(make_references(config, ctx, g));

    std::vector<std::vector<std::size_t>> orders;
    for (std::size_t t = 0; t < T; ++t)
        orders.push_back(activation_order(config, t));

    parallel_for(G * A * T, config.parallel, [&](std::size_t cell) {
        const auto trial = cell % T;
        const auto a = (cell / T) % A;
        const auto g = cell / (T * A);
        GridRunSpec spec;
        spec.epsilon = config.epsilon;
        spec.gamma = r.gammas[g];
        spec.alpha_sr = alpha_sr[g];
        spec.alpha = r.alphas[a];
        spec.order = orders[trial];
        spec.interval = config.interval;
        spec.episodes = config.total_episodes();
        spec.step_cap = config.step_cap;
        spec.policy_seed = seed_tree(config.seed, trial, "policy");
        spec.noise_seed = seed_tree(config.seed, trial, "noise");
        const auto run = run_grid_trial(ctx, refs[g], spec);
        diverged[g][a][trial] = run.diverged;
        for (std::size_t i = 0; i < S; ++i) {
            for (std::size_t m = 0; m < 2; ++m)
                r.mse[g][a][i][m][trial] = run.diverged ? inf : grid_mse(run.errors.episode_sums(2 * i + m));
        }
    });

    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<MseEntry> table;
            for (std::size_t a = 0; a < A; ++a) {
                if (diverged[g][a][t])
                    continue;
                for (std::size_t i = 0; i < S; ++i)
                    for (Method m : {Method::direct, Method::sr})
                        table.push_back({i, m, r.alphas[a], r.mse[g][a][i][method_index(m)][t], 0.0});
            }
            for (std::size_t a = 0; a < A; ++a) {
                if (!diverged[g][a][t])
                    continue;
                ++r.diverged_trials[g][a];
                for (std::size_t i = 0; i < S; ++i)
                    for (std::size_t m = 0; m < 2; ++m)
                        r.nmse[g][a][i][m][t] = nan;
                for (std::size_t m = 0; m < 2; ++m)
                    r.summed[g][a][m][t] = nan;
            }
            if (table.empty())
                continue;
            const auto normalized = grid_nmse(std::move(table));
            r.zero_signal_groups[g] += normalized.zero_signals.size();
            for (const auto& e : normalized.entries) {
                const auto a = static_cast<std::size_t>(
                    std::find(r.alphas.begin(), r.alphas.end(), e.alpha) - r.alphas.begin());
                r.nmse[g][a][e.signal][method_index(e.method)][t] = e.nmse;
                r.summed[g][a][method_index(e.method)][t] += e.nmse;
            }
        }
    }
    return r;
}

IncrementalResult run_incremental_curves(const ExperimentConfig& config, const GridContext& ctx, double alpha_sr)
{
    IncrementalResult r;
    r.gamma = config.gammas.front();
    r.alpha = config.alphas.front();
    r.alpha_sr = alpha_sr;
    const auto S = ctx.signals.size();
    const auto T = config.trials;
    const auto E = static_cast<std::size_t>(config.total_episodes());
    r.episodes = E;

    const auto refs = make_references(config, ctx, r.gamma);
    std::vector<std::size_t> order(S);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<GridRunOutput> runs(T);
    parallel_for(T, config.parallel, [&](std::size_t trial) {
        GridRunSpec spec;
        spec.epsilon = config.epsilon;
        spec.gamma = r.gamma;
        spec.alpha_sr = alpha_sr;
        spec.alpha = r.alpha;
        spec.order = order;
        spec.interval = config.interval;
        spec.episodes = config.total_episodes();
        spec.step_cap = config.step_cap;
        spec.policy_seed = seed_tree(config.seed, trial, "policy");
        spec.noise_seed = seed_tree(config.seed, trial, "noise");
        runs[trial] = run_grid_trial(ctx, refs, spec);
        if (runs[trial].diverged)
            throw DivergenceError("incremental: trial " + std::to_string(trial) + " diverged");
    });
    r.activation = runs.front().activation;

    // [trial][method][episode] summed, [signal][method][episode] trial sums
    std::vector<std::array<std::vector<double>, 2>> summed(T);
    r.signal_nmse.assign(S, {std::vector<double>(E, 0.0), std::vector<double>(E, 0.0)});
    for (std::size_t t = 0; t < T; ++t) {
        summed[t] = {std::vector<double>(E, 0.0), std::vector<double>(E, 0.0)};
        for (std::size_t i = 0; i < S; ++i) {
            std::vector<double> both;
            for (std::size_t m = 0; m < 2; ++m) {
                const auto sums = runs[t].errors.episode_sums(2 * i + m);
                both.insert(both.end(), sums.begin(), sums.end());
            }
            normalize_by_max(both);
            for (std::size_t m = 0; m < 2; ++m) {
                for (std::size_t e = 0; e < E; ++e) {
                    const double v = both[m * E + e];
                    summed[t][m][e] += v;
                    r.signal_nmse[i][m][e] += v / static_cast<double>(T);
                }
            }
        }
    }
    for (std::size_t m = 0; m < 2; ++m) {
        r.summed[m].resize(E);
        for (std::size_t e = 0; e < E; ++e) {
            std::vector<double> samples(T);
            for (std::size_t t = 0; t < T; ++t)
                samples[t] = summed[t][m][e];
            r.summed[m][e] = mean_ci95(samples);
        }
    }
    r.sr_error.resize(E);
    for (std::size_t e = 0; e < E; ++e) {
        std::vector<double> samples(T);
        for (std::size_t t = 0; t < T; ++t) {
            const auto steps = runs[t].steps[e];
            samples[t] = steps > 0 ? runs[t].sr_error[e] / static_cast<double>(steps) : 0.0;
        }
        r.sr_error[e] = mean_ci95(samples);
    }
    return r;
}

std::vector<std::array<double, 2>> ReplayExperimentResult::mean_final_mse() const
{
    std::vector<std::array<double, 2>> out(targets.size(), {0.0, 0.0});
    if (trials.empty())
        return out;
    for (const auto& trial : trials)
        for (std::size_t i = 0; i < targets.size(); ++i)
            for (std::size_t m = 0; m < 2; ++m)
                out[i][m] += trial.final_mse[i][m] / static_cast<double>(trials.size());
    return out;
}

ReplayConfig make_replay_config(const ExperimentConfig& config)
{
    ReplayConfig rc;
    rc.input_channels = config.input_channels;
    rc.target_channels = config.target_channels;
    rc.activation_interval = config.replay_interval;
    rc.gamma = config.replay_gamma;
    rc.alpha0 = config.alpha0;
    rc.coder.input_dim = 2 * config.input_channels.size();
    rc.coder.tilings = config.tilings;
    rc.coder.tile_width.assign(1, config.tile_width);
    rc.coder.memory_size = config.memory_size;
    rc.coder.hash_seed = config.hash_seed;
    rc.from_start = config.from_start;
    return rc;
}

Dataset load_replay_dataset(const ExperimentConfig& config, std::size_t trial)
{
    if (!config.dataset.empty())
        return ingest_file(config.dataset);
    SyntheticDatasetConfig sc;
    sc.steps = config.dataset_steps;
    sc.seed = seed_tree(config.seed, trial, "dataset");
    return synthetic_dataset(sc);
}

ReplayExperimentResult run_replay_experiment(const ExperimentConfig& config)
{
    ReplayExperimentResult r;
    r.targets = config.target_channels;
    r.trials.resize(config.trials);
    const auto rc = make_replay_config(config);
    std::vector<std::size_t> lengths(config.trials);
    parallel_for(config.trials, config.parallel, [&](std::size_t trial) {
        const auto ds = load_replay_dataset(config, trial);
        auto& out = r.trials[trial];
        out.run = run_replay(ds, rc);
        out.errors = replay_errors(out.run, r.targets.size(), rc.gamma);
        out.final_mse.assign(r.targets.size(), {nan, nan});
        for (const auto& e : out.errors)
            if (!e.running_mse.empty())
                out.final_mse[e.signal][method_index(e.method)] = e.running_mse.back();
        lengths[trial] = ds.length();
    });
    r.steps = lengths.empty() ? 0 : lengths.front();
    return r;
}

void write_sr_sweep(const SrSweepResult& r, const ExperimentConfig& config, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        auto os = open_csv(dir / "sr_sweep.csv", "sweep-sr", config);
        os << "gamma,alpha,trial,error\n";
        for (std::size_t g = 0; g < r.gammas.size(); ++g)
            for (std::size_t a = 0; a < r.alphas.size(); ++a)
                for (std::size_t t = 0; t < r.errors[g][a].size(); ++t)
                    os << r.gammas[g] << ',' << r.alphas[a] << ',' << t << ',' << r.errors[g][a][t] << '\n';
    }
    {
        auto os = open_csv(dir / "sr_sweep_summary.csv", "sweep-sr", config);
        os << "gamma,alpha,mean,ci95,diverged\n";
        for (std::size_t g = 0; g < r.gammas.size(); ++g)
            for (std::size_t a = 0; a < r.alphas.size(); ++a)
                os << r.gammas[g] << ',' << r.alphas[a] << ',' << r.summary[g][a].mean << ','
                   << r.summary[g][a].half_width << ',' << r.diverged[g][a] << '\n';
    }
    {
        auto os = open_csv(dir / "best_alpha.csv", "sweep-sr", config);
        os << "gamma,alpha_sr\n";
        for (std::size_t g = 0; g < r.gammas.size(); ++g)
            os << r.gammas[g] << ',' << r.best_alpha[g] << '\n';
    }
}

void write_predictor_sweep(const PredictorSweepResult& r, const ExperimentConfig& config,
                           const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        auto os = open_csv(dir / "predictor_metrics.csv", "sweep-predictors", config);
        os << "gamma,alpha,signal_id,method,mse,nmse\n";
        for (std::size_t g = 0; g < r.gammas.size(); ++g)
            for (std::size_t a = 0; a < r.alphas.size(); ++a)
                for (std::size_t i = 0; i < r.signals; ++i)
                    for (Method m : {Method::direct, Method::sr})
                        os << r.gammas[g] << ',' << r.alphas[a] << ',' << i << ',' << method_name(m) << ','
                           << finite_mean(r.mse[g][a][i][method_index(m)]) << ',' << r.mean_nmse(g, a, i, m)
                           << '\n';
    }
    {
        auto os = open_csv(dir / "predictor_summary.csv", "sweep-predictors", config);
        os << "gamma,alpha,alpha_sr,method,summed_nmse,ci95,diverged_trials\n";
        for (std::size_t g = 0; g < r.gammas.size(); ++g)
            for (std::size_t a = 0; a < r.alphas.size(); ++a)
                for (Method m : {Method::direct, Method::sr}) {
                    const auto s = r.summed_nmse(g, a, m);
                    os << r.gammas[g] << ',' << r.alphas[a] << ',' << r.alpha_sr[g] << ',' << method_name(m) << ','
                       << s.mean << ',' << s.half_width << ',' << r.diverged_trials[g][a] << '\n';
                }
    }
    {
        auto os = open_csv(dir / "win_counts.csv", "sweep-predictors", config);
        os << "gamma,alpha,direct_better,sr_better\n";
        for (std::size_t g = 0; g < r.gammas.size(); ++g)
            for (std::size_t a = 0; a < r.alphas.size(); ++a) {
                const auto [d, s] = r.win_counts(g, a);
                os << r.gammas[g] << ',' << r.alphas[a] << ',' << d << ',' << s << '\n';
            }
    }
}

void write_incremental(const IncrementalResult& r, const ExperimentConfig& config, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        auto os = open_csv(dir / "incremental_curves.csv", "incremental", config);
        os << "episode,series,mean,ci95\n";
        for (std::size_t e = 0; e < r.episodes; ++e) {
            os << e << ",direct," << r.summed[0][e].mean << ',' << r.summed[0][e].half_width << '\n';
            os << e << ",sr," << r.summed[1][e].mean << ',' << r.summed[1][e].half_width << '\n';
            os << e << ",sr_error," << r.sr_error[e].mean << ',' << r.sr_error[e].half_width << '\n';
        }
    }
    {
        auto os = open_csv(dir / "incremental_signals.csv", "incremental", config);
        os << "episode,signal_id,activation,method,nmse\n";
        for (std::size_t i = 0; i < r.signal_nmse.size(); ++i)
            for (std::size_t e = 0; e < r.episodes; ++e)
                for (Method m : {Method::direct, Method::sr})
                    os << e << ',' << i << ',' << r.activation[i] << ',' << method_name(m) << ','
                       << r.signal_nmse[i][method_index(m)][e] << '\n';
    }
}

void write_replay(const ReplayExperimentResult& r, const ExperimentConfig& config, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto targets = r.targets.size();
    for (std::size_t k = 0; k < r.trials.size(); ++k) {
        const auto& trial = r.trials[k];
        if (config.write_records) {
            auto os = open_csv(dir / ("replay_run" + std::to_string(k) + ".csv"), "replay", config);
            os << "t,signal_id,method,prediction,cumulant,alpha\n";
            for (const auto& rec : trial.run.records)
                os << rec.t << ',' << rec.signal << ',' << method_name(rec.method) << ',' << rec.prediction << ','
                   << rec.cumulant << ',' << rec.alpha << '\n';
        }

        // Each target's curves are scaled by their maximum over time and
        // both methods; "all" sums the scaled curves of active targets.
        const auto steps = trial.run.steps;
        std::vector<std::array<std::vector<double>, 2>> curves(
            targets, {std::vector<double>(steps, nan), std::vector<double>(steps, nan)});
        for (const auto& e : trial.errors) {
            auto& curve = curves[e.signal][method_index(e.method)];
            for (std::size_t j = 0; j < e.t.size(); ++j)
                curve[static_cast<std::size_t>(e.t[j])] = e.running_mse[j];
        }
        for (auto& pair : curves) {
            double top = 0.0;
            for (const auto& curve : pair)
                for (double v : curve)
                    if (std::isfinite(v))
                        top = std::max(top, v);
            for (auto& curve : pair)
                for (double& v : curve)
                    if (std::isfinite(v))
                        v = top > 0.0 ? v / top : 0.0;
        }
        auto os = open_csv(dir / ("replay_nmse_run" + std::to_string(k) + ".csv"), "replay", config);
        os << "t,signal_id,method,running_nmse\n";
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t m = 0; m < 2; ++m) {
                double total = 0.0;
                for (std::size_t i = 0; i < targets; ++i) {
                    const double v = curves[i][m][t];
                    if (!std::isfinite(v))
                        continue;
                    total += v;
                    os << t << ',' << i << ',' << (m ? "sr" : "direct") << ',' << v << '\n';
                }
                os << t << ",all," << (m ? "sr" : "direct") << ',' << total << '\n';
            }
        }
    }

    auto os = open_csv(dir / "replay_summary.csv", "replay", config);
    os << "signal_id,channel,activation,method,final_mse,ci95,final_nmse\n";
    const auto means = r.mean_final_mse();
    for (std::size_t i = 0; i < targets; ++i) {
        // Targets never activated within the dataset have no error to normalize.
        const bool measured = std::isfinite(means[i][0]) && std::isfinite(means[i][1]);
        const auto pair = measured ? replay_nmse(means[i][0], means[i][1]) : NormalizedPair{nan, nan, false};
        for (std::size_t m = 0; m < 2; ++m) {
            std::vector<double> samples;
            for (const auto& trial : r.trials)
                samples.push_back(trial.final_mse[i][m]);
            const auto ci = mean_ci95(samples);
            const auto activation = r.trials.empty() ? -1 : r.trials.front().run.activation[i];
            os << i << ',' << r.targets[i] << ',' << activation << ',' << (m ? "sr" : "direct") << ',' << ci.mean
               << ',' << ci.half_width << ',' << (m ? pair.sr : pair.direct) << '\n';
        }
    }
}

}  // namespace srgvf

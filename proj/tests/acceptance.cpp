// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include "srgvf/config.hpp"
#include "srgvf/experiments.hpp"
#include "srgvf/gvf.hpp"
#include "srgvf/oracle.hpp"
#include "srgvf/successor.hpp"
#include "srgvf/tilecode.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace srgvf;
namespace fs = std::filesystem;

namespace {

unsigned g_parallel = 1;
int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << detail << " [" << seconds
       << " s]";
    std::cout << os.str() << std::endl;
    if (!pass)
        ++g_failures;
}

template <class F>
void run_criterion(int id, const std::string& name, F&& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, name, pass, detail, s);
}

std::string fmt(double v, int precision = 4)
{
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

struct SrRun {
    SuccessorMatrix m;
    std::vector<std::uint64_t> visits;
};

// Episodic TD(0) SR learning for a fixed number of environment steps.
SrRun learn_sr(const GridMap& map, double epsilon, double gamma, double alpha, std::int64_t total_steps,
               std::uint64_t seed)
{
    const auto n = map.state_count();
    SrRun run{SuccessorMatrix(n, gamma, alpha), std::vector<std::uint64_t>(n, 0)};
    std::vector<FeatureVector> one_hot;
    for (std::size_t s = 0; s < n; ++s)
        one_hot.push_back(encode_one_hot(s, n));
    std::mt19937_64 rng(seed);
    GridState state{map.start(), 0};
    for (std::int64_t t = 0; t < total_steps; ++t) {
        const auto s = map.state_index(state.position);
        ++run.visits[s];
        const auto next = step(map, state, select_action(map, state, epsilon, rng));
        const auto s2 = map.state_index(next.next.position);
        run.m.update(one_hot[s], one_hot[s2], gamma);
        if (next.terminal) {
            run.m.terminal_flush(one_hot[s2]);
            state = GridState{map.start(), 0};
        } else {
            state = next.next;
        }
    }
    return run;
}

double max_sr_error(const SrRun& run, const Eigen::MatrixXd& psi, std::uint64_t min_visits)
{
    double worst = 0.0;
    const auto n = run.visits.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (run.visits[s] < min_visits)
            continue;
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(run.m.at(s, j) - psi(static_cast<Eigen::Index>(s),
                                                                   static_cast<Eigen::Index>(j))));
    }
    return worst;
}

bool criterion_sr_oracle(std::string& detail)
{
    const auto map = make_open_map(5, 5, Cell{0, 4}, Cell{4, 0});
    const double epsilon = 0.3;
    const auto P = transition_matrix(map, epsilon);
    const std::vector<double> alphas{0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.07, 0.1};
    bool pass = true;
    for (double gamma : {0.5, 0.9}) {
        const auto psi = analytic_sr(P, gamma);
        double best_alpha = alphas.front();
        double best_err = std::numeric_limits<double>::infinity();
        for (double a : alphas) {
            const double err = max_sr_error(learn_sr(map, epsilon, gamma, a, 20000, 1001), psi, 100);
            if (err < best_err) {
                best_err = err;
                best_alpha = a;
            }
        }
        const auto run = learn_sr(map, epsilon, gamma, best_alpha, 20000, 2002);
        const double err = max_sr_error(run, psi, 100);
        detail += "gamma " + fmt(gamma) + ": alpha " + fmt(best_alpha) + " max|M-Psi| " + fmt(err) + "; ";
        pass = pass && err <= 0.05;
    }
    return pass;
}

bool criterion_factorization(std::string& detail)
{
    const auto map = make_open_map(5, 5, Cell{0, 4}, Cell{4, 0});
    const double epsilon = 0.3;
    const auto P = transition_matrix(map, epsilon);
    std::mt19937_64 rng(77);
    const SignalSampling sampling{map.width(), map.height(), 1.0 / 7.0, 0.3};
    double worst = 0.0;
    for (double gamma : {0.0, 0.5, 0.9}) {
        const auto psi = analytic_sr(P, gamma);
        for (std::size_t i = 0; i < 10; ++i) {
            const auto spec = sample_spec(rng, sampling, i);
            const auto mf = mean_field(spec, map, epsilon);
            const Eigen::VectorXd cbar = Eigen::Map<const Eigen::VectorXd>(mf.data(), static_cast<Eigen::Index>(mf.size()));
            const Eigen::VectorXd v = analytic_gvf(P, gamma, cbar);
            worst = std::max(worst, (v - psi * cbar).cwiseAbs().maxCoeff());
        }
    }
    detail = "max |v - Psi cbar| = " + fmt(worst) + " over 10 signals x 3 discounts";
    return worst <= 1e-9;
}

ExperimentConfig desk_config()
{
    auto cfg = ExperimentConfig::preset("desk");
    cfg.parallel = g_parallel;
    return cfg;
}

bool criterion_gamma_zero(std::string& detail)
{
    auto cfg = desk_config();
    cfg.gammas = {0.0};
    cfg.signals = 10;
    cfg.trials = 5;
    const auto ctx = make_grid_context(cfg);
    const auto alpha_sr = resolve_sr_alphas(cfg, ctx);
    const auto r = run_predictor_sweep(cfg, ctx, alpha_sr);
    bool pass = true;
    double worst = 0.0;
    for (std::size_t a = 0; a < r.alphas.size(); ++a) {
        double diff = 0.0;
        double base = 0.0;
        for (std::size_t t = 0; t < r.trials; ++t) {
            diff += r.summed[0][a][0][t] - r.summed[0][a][1][t];
            base += r.summed[0][a][0][t];
        }
        const double rel = base > 0.0 ? std::abs(diff) / base : 0.0;
        worst = std::max(worst, rel);
        pass = pass && rel < 0.02 && r.diverged_trials[0][a] == 0;
    }
    detail = "largest paired relative gap in summed NMSE " + fmt(worst) + " across " +
             std::to_string(r.alphas.size()) + " step sizes";
    return pass;
}

bool criterion_table_trend(std::string& detail)
{
    auto cfg = desk_config();
    cfg.gammas = {0.9};
    cfg.alphas = {0.25, 0.5};
    cfg.signals = 20;
    cfg.trials = 10;
    cfg.interval = 50;
    const auto ctx = make_grid_context(cfg);
    const auto alpha_sr = resolve_sr_alphas(cfg, ctx);
    const auto r = run_predictor_sweep(cfg, ctx, alpha_sr);
    bool pass = true;
    for (std::size_t a = 0; a < r.alphas.size(); ++a) {
        const auto [direct, sr] = r.win_counts(0, a);
        detail += "alpha " + fmt(r.alphas[a]) + ": SR-based better on " + std::to_string(sr) + "/" +
                  std::to_string(direct + sr) + "; ";
        pass = pass && sr * 10 >= 7 * r.signals;
    }
    detail += "SR alpha " + fmt(alpha_sr[0]);
    return pass;
}

bool criterion_incremental_shape(std::string& detail)
{
    auto cfg = desk_config();
    cfg.gammas = {0.9};
    cfg.alphas = {0.25};
    cfg.signals = 10;
    cfg.trials = 10;
    const auto ctx = make_grid_context(cfg);
    const double alpha_sr = resolve_sr_alphas(cfg, ctx).front();
    const auto r = run_incremental_curves(cfg, ctx, alpha_sr);

    const double initial = r.sr_error.front().mean;
    std::size_t converged = r.episodes;
    for (std::size_t e = 0; e < r.episodes; ++e) {
        if (r.sr_error[e].mean < 0.25 * initial) {
            converged = e;
            break;
        }
    }
    if (converged == r.episodes) {
        detail = "SR error never fell below 25% of its initial value";
        return false;
    }
    std::size_t checked = 0;
    std::size_t better = 0;
    for (std::size_t i = 0; i < r.signal_nmse.size(); ++i) {
        if (r.activation[i] < static_cast<std::int64_t>(converged))
            continue;
        ++checked;
        const auto& d = r.signal_nmse[i][0];
        const auto& s = r.signal_nmse[i][1];
        const double peak_d = *std::max_element(d.begin(), d.end());
        const double peak_s = *std::max_element(s.begin(), s.end());
        if (peak_s < peak_d)
            ++better;
    }
    detail = "SR error below 25% at episode " + std::to_string(converged) + "; lower SR-based peak on " +
             std::to_string(better) + "/" + std::to_string(checked) + " later signals";
    return checked > 0 && better == checked;
}

bool criterion_monotone_gap(std::string& detail, PredictorSweepResult& out)
{
    auto cfg = desk_config();
    const auto ctx = make_grid_context(cfg);
    const auto alpha_sr = resolve_sr_alphas(cfg, ctx);
    out = run_predictor_sweep(cfg, ctx, alpha_sr);
    std::vector<double> gaps;
    for (std::size_t g = 0; g < out.gammas.size(); ++g)
        gaps.push_back(out.best_summed(g, Method::direct) - out.best_summed(g, Method::sr));
    bool pass = true;
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        detail += "gamma " + fmt(out.gammas[g]) + " gap " + fmt(gaps[g]) + "; ";
        if (g > 0)
            pass = pass && gaps[g] >= gaps[g - 1];
    }
    return pass;
}

bool criterion_tile_bound(std::string& detail)
{
    TileCoderConfig tc;
    tc.input_dim = 4;
    tc.tilings = 100;
    tc.memory_size = 2048;
    tc.bias = true;
    TileCoder coder(tc);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t most = 0;
    std::vector<double> x(4);
    for (int i = 0; i < 10000; ++i) {
        for (auto& v : x)
            v = u(rng);
        const auto phi = coder.encode(x);
        most = std::max(most, phi.active_count());
        if (phi.dimension() != 2049)
            return false;
    }
    detail = "dimension " + std::to_string(coder.output_dimension()) + ", most active " + std::to_string(most);
    return coder.output_dimension() == 2049 && most <= 101;
}

bool criterion_replay_trend(std::string& detail)
{
    auto cfg = desk_config();
    cfg.trials = 5;
    cfg.dataset_steps = 21600;
    cfg.replay_interval = 2000;
    cfg.replay_gamma = 0.95;
    const auto r = run_replay_experiment(cfg);
    const auto means = r.mean_final_mse();
    std::size_t wins = 0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        const auto pair = replay_nmse(means[i][0], means[i][1]);
        if (pair.sr <= pair.direct)
            ++wins;
        detail += r.targets[i] + " " + fmt(pair.direct, 3) + "/" + fmt(pair.sr, 3) + "; ";
    }
    detail = "SR-based <= direct on " + std::to_string(wins) + "/" + std::to_string(means.size()) +
             " targets (direct/SR NMSE: " + detail + ")";
    return means.size() == 6 && wins >= 4;
}

bool criterion_scaling(std::string& detail)
{
    struct Case {
        std::uint64_t f, h, s;
    };
    bool pass = true;
    for (const auto& c : {Case{2, 21, 10}, Case{3, 5, 4}, Case{1, 7, 9}}) {
        const auto counts = scaling_weights(c.f, c.h, c.s);
        // Tabular registry with one SR per discount and one cumulant learner per
        // signal, against one direct learner per (discount, signal).
        std::uint64_t sr_weights = 0;
        std::uint64_t direct_weights = 0;
        for (std::uint64_t g = 0; g < c.f; ++g) {
            SuccessorMatrix m(c.s, 0.5, 0.1);
            sr_weights += m.weight_count();
        }
        PredictorRegistry registry(c.s);
        for (std::uint64_t i = 0; i < c.h; ++i)
            registry.add_slot(i, 0, constant_step_size(0.1), constant_step_size(0.1));
        for (const auto& slot : registry.slots())
            sr_weights += slot.cumulant.dimension();
        for (std::uint64_t g = 0; g < c.f; ++g)
            for (const auto& slot : registry.slots())
                direct_weights += slot.direct.dimension();

        const bool formulas = counts.direct == c.f * c.h * c.s && counts.sr_based == c.f * c.s * c.s + c.h * c.s;
        const bool brute = counts.direct == direct_weights && counts.sr_based == sr_weights;
        bool crossover = true;
        if (c.f == 1) {
            crossover = std::isinf(counts.crossover_h);
        } else {
            const double x = static_cast<double>(c.f * c.s) / static_cast<double>(c.f - 1);
            crossover = std::abs(counts.crossover_h - x) < 1e-12;
            for (std::uint64_t h = 1; h < 4 * static_cast<std::uint64_t>(x) + 4; ++h) {
                const auto k = scaling_weights(c.f, h, c.s);
                crossover = crossover && ((static_cast<double>(h) > x) == (k.direct > k.sr_based));
            }
        }
        detail += "(" + std::to_string(c.f) + "," + std::to_string(c.h) + "," + std::to_string(c.s) +
                  "): direct " + std::to_string(counts.direct) + " SR " + std::to_string(counts.sr_based) + "; ";
        pass = pass && formulas && brute && crossover;
    }
    return pass;
}

bool normalized_group_ok(const std::vector<double>& values, bool all_zero_flag)
{
    double top = 0.0;
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0))
            return false;
        top = std::max(top, v);
    }
    return all_zero_flag ? top == 0.0 : top == 1.0;
}

bool criterion_normalization(std::string& detail, const PredictorSweepResult& sweep)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mag(-6.0, 6.0);
    std::uniform_int_distribution<int> small(1, 6);
    std::size_t tables = 0;
    for (int round = 0; round < 500; ++round) {
        const int signals = small(rng);
        const int alphas = small(rng);
        std::vector<MseEntry> table;
        for (int i = 0; i < signals; ++i) {
            const double scale = std::pow(10.0, mag(rng));
            const bool zero = (rng() % 10) == 0;
            for (int a = 0; a < alphas; ++a)
                for (Method m : {Method::direct, Method::sr})
                    table.push_back({static_cast<std::size_t>(i), m, 0.1 * (a + 1),
                                     zero ? 0.0 : scale * std::abs(mag(rng)), 0.0});
        }
        const auto out = grid_nmse(table);
        for (int i = 0; i < signals; ++i) {
            std::vector<double> group;
            for (const auto& e : out.entries)
                if (e.signal == static_cast<std::size_t>(i))
                    group.push_back(e.nmse);
            const bool zero = std::count(out.zero_signals.begin(), out.zero_signals.end(), i) > 0;
            if (!normalized_group_ok(group, zero))
                return false;
        }
        const double a = std::abs(mag(rng));
        const double b = (rng() % 5) == 0 ? a : std::abs(mag(rng));
        const auto pair = replay_nmse(a, b);
        if (!normalized_group_ok({pair.direct, pair.sr}, pair.all_zero))
            return false;
        tables += 2;
    }

    // The per-trial tables produced by a full sweep.
    std::size_t groups = 0;
    for (std::size_t g = 0; g < sweep.gammas.size(); ++g)
        for (std::size_t t = 0; t < sweep.trials; ++t)
            for (std::size_t i = 0; i < sweep.signals; ++i) {
                std::vector<double> group;
                for (std::size_t a = 0; a < sweep.alphas.size(); ++a)
                    for (std::size_t m = 0; m < 2; ++m)
                        group.push_back(sweep.nmse[g][a][i][m][t]);
                const bool zero = std::all_of(group.begin(), group.end(), [](double v) { return v == 0.0; });
                if (!normalized_group_ok(group, zero))
                    return false;
                ++groups;
            }
    detail = std::to_string(tables) + " random tables and " + std::to_string(groups) +
             " sweep groups in [0,1] with group maximum 1";
    return true;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files)
{
    files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto other = b / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
            return false;
        ++files;
    }
    std::size_t count_b = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(b))
        ++count_b;
    return files == count_b && files > 0;
}

void run_everything(const ExperimentConfig& cfg, const fs::path& dir)
{
    const auto ctx = make_grid_context(cfg);
    const auto sr = run_sr_sweep(cfg, ctx);
    write_sr_sweep(sr, cfg, dir);
    write_predictor_sweep(run_predictor_sweep(cfg, ctx, sr.best_alpha), cfg, dir);
    write_incremental(run_incremental_curves(cfg, ctx, sr.best_alpha.front()), cfg, dir);
    write_replay(run_replay_experiment(cfg), cfg, dir);
}

bool criterion_determinism(std::string& detail)
{
    auto cfg = ExperimentConfig::preset("desk");
    cfg.signals = 4;
    cfg.trials = 3;
    cfg.sr_episodes = 100;
    cfg.interval = 20;
    cfg.dataset_steps = 3000;
    cfg.replay_interval = 400;
    cfg.tilings = 16;
    cfg.seed = 42;
    const auto root = fs::temp_directory_path() / ("srgvf_determinism_" + std::to_string(::getpid()));
    fs::remove_all(root);
    run_everything(cfg, root / "a");
    run_everything(cfg, root / "b");
    cfg.parallel = 3;
    run_everything(cfg, root / "c");
    std::size_t files_ab = 0;
    std::size_t files_ac = 0;
    const bool ab = same_tree(root / "a", root / "b", files_ab);
    const bool ac = same_tree(root / "a", root / "c", files_ac);
    fs::remove_all(root);
    detail = std::to_string(files_ab) + " CSVs identical on rerun" + (ab ? "" : " (MISMATCH)") + ", " +
             std::to_string(files_ac) + " identical with 3 workers" + (ac ? "" : " (MISMATCH)");
    return ab && ac;
}

}  // namespace

int main(int argc, char** argv)
{
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--parallel") == 0)
            g_parallel = static_cast<unsigned>(std::max(1, std::atoi(argv[i + 1])));

    PredictorSweepResult desk_sweep;
    run_criterion(1, "SR oracle equivalence", criterion_sr_oracle);
    run_criterion(2, "GVF factorization identity", criterion_factorization);
    run_criterion(3, "gamma=0 degeneracy", criterion_gamma_zero);
    run_criterion(4, "win counts at gamma=0.9", criterion_table_trend);
    run_criterion(5, "incremental curve shape", criterion_incremental_shape);
    run_criterion(6, "advantage grows with gamma",
                  [&](std::string& d) { return criterion_monotone_gap(d, desk_sweep); });
    run_criterion(7, "tile coder bound", criterion_tile_bound);
    run_criterion(8, "replay trend", criterion_replay_trend);
    run_criterion(9, "scaling formulas", criterion_scaling);
    run_criterion(10, "normalization properties",
                  [&](std::string& d) { return criterion_normalization(d, desk_sweep); });
    run_criterion(11, "determinism", criterion_determinism);

    std::cout << (g_failures ? "FAILED " : "ALL PASSED ") << (11 - g_failures) << "/11" << std::endl;
    return g_failures ? 1 : 0;
}

#include "srgvf/config.hpp"
#include "srgvf/experiments.hpp"
#include "srgvf/gridworld.hpp"
#include "srgvf/oracle.hpp"
#include "srgvf/replay.hpp"
#include "srgvf/signals.hpp"
#include "srgvf/successor.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using namespace srgvf;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::string preset = "paper";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> trials;
    std::optional<unsigned> parallel;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "Config file (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", c.preset, "Base preset when no config file is given: paper or desk");
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_option("--trials", c.trials, "Independent trials");
    cmd->add_option("--parallel", c.parallel, "Worker threads");
}

ExperimentConfig resolve(const Common& c)
{
    auto cfg = c.config_path.empty() ? ExperimentConfig::preset(c.preset) : ExperimentConfig::load(c.config_path);
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.out)
        cfg.out = *c.out;
    if (c.trials)
        cfg.trials = *c.trials;
    if (c.parallel)
        cfg.parallel = *c.parallel;
    cfg.validate();
    return cfg;
}

void write_run_info(const ExperimentConfig& cfg, const GridContext* ctx)
{
    fs::create_directories(cfg.out);
    std::ofstream(fs::path(cfg.out) / "config.txt") << cfg.to_text();
    if (ctx) {
        std::ofstream os(fs::path(cfg.out) / "signals.txt");
        write_specs(os, ctx->signals);
    }
}

std::string gamma_tag(double g)
{
    std::ostringstream os;
    os << g;
    return os.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SR-based general value functions: experiments and utilities"};
    app.require_subcommand(1);

    Common sweep_sr, sweep_pred, incremental, replay, oracle;
    auto* c_sweep_sr = app.add_subcommand("sweep-sr", "SR step-size sweep per discount");
    add_common(c_sweep_sr, sweep_sr);
    auto* c_sweep_pred = app.add_subcommand("sweep-predictors", "Direct vs SR-based predictors over alpha x gamma");
    add_common(c_sweep_pred, sweep_pred);
    auto* c_incremental = app.add_subcommand("incremental", "Learning curves with a fixed activation order");
    add_common(c_incremental, incremental);
    auto* c_replay = app.add_subcommand("replay", "Tile-coded replay of a sensor time series");
    add_common(c_replay, replay);
    auto* c_oracle = app.add_subcommand("oracle", "Write reference SR and signal values per discount");
    add_common(c_oracle, oracle);

    std::uint64_t discounts = 1, predictors = 1, states = 1;
    auto* c_scaling = app.add_subcommand("scaling", "Weight counts for direct vs SR-based predictions");
    c_scaling->add_option("--discounts,-f", discounts, "Distinct discounts")->check(CLI::PositiveNumber);
    c_scaling->add_option("--predictors,-p", predictors, "One-step predictors (cumulants)")->check(CLI::PositiveNumber);
    c_scaling->add_option("--states,-s", states, "Tabular states")->check(CLI::PositiveNumber);

    SyntheticDatasetConfig dataset_cfg;
    std::string dataset_out = "-";
    auto* c_dataset = app.add_subcommand("gen-dataset", "Write a synthetic two-joint arm dataset");
    c_dataset->add_option("--steps", dataset_cfg.steps, "Timesteps")->check(CLI::PositiveNumber);
    c_dataset->add_option("--seed", dataset_cfg.seed, "Seed");
    c_dataset->add_option("--circuit", dataset_cfg.circuit_steps, "Steps per circuit");
    c_dataset->add_option("--out", dataset_out, "Output CSV, - for stdout");

    std::string map_kind = "dayan";
    int map_width = 5, map_height = 5;
    std::string map_out = "-";
    auto* c_map = app.add_subcommand("gen-map", "Write a built-in map in the two-block text format");
    c_map->add_option("--kind", map_kind, "dayan or open")->check(CLI::IsMember({"dayan", "open"}));
    c_map->add_option("--width", map_width, "Open map width")->check(CLI::PositiveNumber);
    c_map->add_option("--height", map_height, "Open map height")->check(CLI::PositiveNumber);
    c_map->add_option("--out", map_out, "Output file, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_sweep_sr->parsed()) {
            const auto cfg = resolve(sweep_sr);
            const auto ctx = make_grid_context(cfg);
            write_run_info(cfg, &ctx);
            const auto r = run_sr_sweep(cfg, ctx);
            write_sr_sweep(r, cfg, cfg.out);
            for (std::size_t g = 0; g < r.gammas.size(); ++g)
                std::cout << "gamma " << r.gammas[g] << ": best SR alpha " << r.best_alpha[g] << '\n';
        } else if (c_sweep_pred->parsed()) {
            const auto cfg = resolve(sweep_pred);
            const auto ctx = make_grid_context(cfg);
            write_run_info(cfg, &ctx);
            std::vector<double> alpha_sr = cfg.sr_alpha_by_gamma;
            if (alpha_sr.empty()) {
                const auto sr = run_sr_sweep(cfg, ctx);
                write_sr_sweep(sr, cfg, cfg.out);
                alpha_sr = sr.best_alpha;
            }
            const auto r = run_predictor_sweep(cfg, ctx, alpha_sr);
            write_predictor_sweep(r, cfg, cfg.out);
            for (std::size_t g = 0; g < r.gammas.size(); ++g)
                for (std::size_t a = 0; a < r.alphas.size(); ++a) {
                    const auto [d, s] = r.win_counts(g, a);
                    std::cout << "gamma " << r.gammas[g] << " alpha " << r.alphas[a] << ": direct better " << d
                              << ", SR-based better " << s << '\n';
                }
        } else if (c_incremental->parsed()) {
            const auto cfg = resolve(incremental);
            const auto ctx = make_grid_context(cfg);
            write_run_info(cfg, &ctx);
            auto sr_cfg = cfg;
            sr_cfg.gammas = {cfg.gammas.front()};
            if (!cfg.sr_alpha_by_gamma.empty())
                sr_cfg.sr_alpha_by_gamma = {cfg.sr_alpha_by_gamma.front()};
            const double alpha_sr = resolve_sr_alphas(sr_cfg, ctx).front();
            const auto r = run_incremental_curves(cfg, ctx, alpha_sr);
            write_incremental(r, cfg, cfg.out);
            std::cout << "gamma " << r.gamma << " alpha " << r.alpha << " SR alpha " << r.alpha_sr << ": "
                      << r.episodes << " episodes\n";
        } else if (c_replay->parsed()) {
            const auto cfg = resolve(replay);
            write_run_info(cfg, nullptr);
            const auto r = run_replay_experiment(cfg);
            write_replay(r, cfg, cfg.out);
            const auto means = r.mean_final_mse();
            for (std::size_t i = 0; i < r.targets.size(); ++i)
                std::cout << r.targets[i] << ": final MSE direct " << means[i][0] << ", SR-based " << means[i][1]
                          << '\n';
            for (const auto& trial : r.trials)
                if (trial.run.clamped_inputs)
                    std::cerr << "warning: " << trial.run.clamped_inputs << " tile-coder inputs were clamped\n";
        } else if (c_oracle->parsed()) {
            const auto cfg = resolve(oracle);
            const auto ctx = make_grid_context(cfg);
            write_run_info(cfg, &ctx);
            const auto n = ctx.map.state_count();
            for (double g : cfg.gammas) {
                const auto refs = make_references(cfg, ctx, g);
                const auto tag = gamma_tag(g);
                std::ofstream sr(fs::path(cfg.out) / ("oracle_sr_g" + tag + ".csv"));
                std::ofstream values(fs::path(cfg.out) / ("oracle_values_g" + tag + ".csv"));
                sr << std::setprecision(17) << "# reference=" << cfg.reference << ",gamma=" << g << '\n';
                values << std::setprecision(17) << "# reference=" << cfg.reference << ",gamma=" << g << '\n';
                sr << "state";
                for (std::size_t j = 0; j < n; ++j)
                    sr << ",s" << j;
                sr << '\n';
                values << "state,signal_id,value\n";
                for (std::size_t s = 0; s < n; ++s) {
                    if (refs.sr_known[s]) {
                        sr << s;
                        for (std::size_t j = 0; j < n; ++j)
                            sr << ',' << refs.psi[s * n + j];
                        sr << '\n';
                    }
                    for (std::size_t i = 0; i < refs.values.size(); ++i)
                        if (refs.value_known[i][s])
                            values << s << ',' << i << ',' << refs.values[i][s] << '\n';
                }
            }
            std::cout << "wrote references for " << cfg.gammas.size() << " discounts to " << cfg.out << '\n';
        } else if (c_scaling->parsed()) {
            const auto c = scaling_weights(discounts, predictors, states);
            std::cout << "discounts,predictors,states,direct,sr_based,crossover_h\n"
                      << discounts << ',' << predictors << ',' << states << ',' << c.direct << ',' << c.sr_based
                      << ',' << c.crossover_h << '\n';
        } else if (c_dataset->parsed()) {
            const auto ds = synthetic_dataset(dataset_cfg);
            if (dataset_out == "-") {
                write_dataset(std::cout, ds);
            } else {
                std::ofstream os(dataset_out);
                if (!os)
                    throw ConfigError("cannot write '" + dataset_out + "'");
                write_dataset(os, ds);
            }
        } else if (c_map->parsed()) {
            const auto map = map_kind == "dayan"
                                 ? make_dayan_map()
                                 : make_open_map(map_width, map_height, Cell{0, map_height - 1}, Cell{map_width - 1, 0});
            if (map_out == "-") {
                std::cout << map.to_text();
            } else {
                std::ofstream os(map_out);
                if (!os)
                    throw ConfigError("cannot write '" + map_out + "'");
                os << map.to_text();
            }
        }
    } catch (const DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return 2;
    } catch (const MapParseError& e) {
        std::cerr << "map error: " << e.what() << '\n';
        return 1;
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#include "srgvf/config.hpp"

#include "srgvf/tilecode.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace srgvf {

std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t seed_tree(std::uint64_t master_seed, std::uint64_t trial, std::string_view component)
{
    return splitmix64(splitmix64(splitmix64(master_seed) ^ trial) ^ fnv1a64(component));
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> items;
    if (trim(value).empty())
        return items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        items.push_back(trim(item));
    return items;
}

std::string format(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
std::string format(const std::string& v) { return v; }
std::string format(bool v) { return v ? "true" : "false"; }
template <class Int>
    requires std::is_integral_v<Int>
std::string format(Int v)
{
    return std::to_string(v);
}
std::string format(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + format(v[i]);
    return out;
}
std::string format(const std::vector<std::string>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + v[i];
    return out;
}

void parse_into(const std::string& key, const std::string& value, double& out)
{
    try {
        std::size_t used = 0;
        out = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    }
}
void parse_into(const std::string&, const std::string& value, std::string& out) { out = value; }
void parse_into(const std::string& key, const std::string& value, bool& out)
{
    if (value == "true" || value == "1")
        out = true;
    else if (value == "false" || value == "0")
        out = false;
    else
        throw ConfigError("config: '" + key + "' expects true or false, got '" + value + "'");
}
template <class Int>
    requires std::is_integral_v<Int>
void parse_into(const std::string& key, const std::string& value, Int& out)
{
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
}
void parse_into(const std::string& key, const std::string& value, std::vector<double>& out)
{
    out.clear();
    for (const auto& item : split_list(value)) {
        double v = 0.0;
        parse_into(key, item, v);
        out.push_back(v);
    }
}
void parse_into(const std::string&, const std::string& value, std::vector<std::string>& out)
{
    out = split_list(value);
}

template <class Config, class F>
void for_each_field(Config& c, F&& f)
{
    f("map", c.map);
    f("epsilon", c.epsilon);
    f("gammas", c.gammas);
    f("alphas", c.alphas);
    f("sr_alphas", c.sr_alphas);
    f("sr_alpha_by_gamma", c.sr_alpha_by_gamma);
    f("episodes", c.episodes);
    f("sr_episodes", c.sr_episodes);
    f("interval", c.interval);
    f("signals", c.signals);
    f("trials", c.trials);
    f("randomize_order", c.randomize_order);
    f("noise_sigma", c.noise_sigma);
    f("shortest_path_probability", c.shortest_path_probability);
    f("step_cap", c.step_cap);
    f("reference", c.reference);
    f("mc_episodes_sr", c.mc_episodes_sr);
    f("mc_episodes_signal", c.mc_episodes_signal);
    f("reference_dir", c.reference_dir);
    f("dataset", c.dataset);
    f("dataset_steps", c.dataset_steps);
    f("input_channels", c.input_channels);
    f("target_channels", c.target_channels);
    f("replay_gamma", c.replay_gamma);
    f("replay_interval", c.replay_interval);
    f("alpha0", c.alpha0);
    f("tilings", c.tilings);
    f("tile_width", c.tile_width);
    f("memory_size", c.memory_size);
    f("hash_seed", c.hash_seed);
    f("from_start", c.from_start);
    f("write_records", c.write_records);
    f("seed", c.seed);
    f("out", c.out);
    f("parallel", c.parallel);
}

void require_rate(const char* key, double v)
{
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string("config: '") + key + "' must lie in [0, 1], got " + format(v));
}

}  // namespace

void ExperimentConfig::validate() const
{
    require_rate("epsilon", epsilon);
    require_rate("replay_gamma", replay_gamma);
    require_rate("alpha0", alpha0);
    require_rate("shortest_path_probability", shortest_path_probability);
    for (double g : gammas)
        require_rate("gammas", g);
    for (double a : alphas)
        require_rate("alphas", a);
    for (double a : sr_alphas)
        require_rate("sr_alphas", a);
    for (double a : sr_alpha_by_gamma)
        require_rate("sr_alpha_by_gamma", a);
    if (gammas.empty() || alphas.empty() || sr_alphas.empty())
        throw ConfigError("config: gammas, alphas and sr_alphas must be non-empty");
    if (!sr_alpha_by_gamma.empty() && sr_alpha_by_gamma.size() != gammas.size())
        throw ConfigError("config: sr_alpha_by_gamma needs one entry per gamma");
    if (replay_gamma >= 1.0)
        throw ConfigError("config: replay_gamma must be below 1");
    if (episodes < 0 || sr_episodes <= 0 || interval <= 0 || signals == 0 || trials == 0 || step_cap <= 0)
        throw ConfigError("config: episode, interval, signal, trial and step counts must be positive");
    if (mc_episodes_sr == 0 || mc_episodes_signal == 0)
        throw ConfigError("config: Monte Carlo episode budgets must be positive");
    if (reference != "analytic" && reference != "mc")
        throw ConfigError("config: reference must be 'analytic' or 'mc'");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw ConfigError("config: noise_sigma must be >= 0");
    if (dataset_steps < 2 || replay_interval <= 0 || tilings == 0 || memory_size == 0 || !(tile_width > 0.0))
        throw ConfigError("config: replay sizes must be positive");
    if (input_channels.empty() || target_channels.empty())
        throw ConfigError("config: replay needs input and target channels");
    if (parallel == 0)
        throw ConfigError("config: parallel must be at least 1");
}

std::string ExperimentConfig::to_text() const
{
    std::string out;
    for_each_field(*this, [&](const char* key, const auto& value) {
        out += key;
        out += " = ";
        out += format(value);
        out += '\n';
    });
    return out;
}

std::uint64_t ExperimentConfig::hash() const
{
    std::string text;
    for_each_field(*this, [&](const char* key, const auto& value) {
        const std::string k = key;
        if (k == "out" || k == "parallel")
            return;
        text += k + " = " + format(value) + '\n';
    });
    return fnv1a64(text);
}

ExperimentConfig ExperimentConfig::parse(std::string_view text)
{
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::stringstream ss{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos)
            line.erase(hash_pos);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        bool known = false;
        for_each_field(cfg, [&](const char* name, auto& field) {
            if (key == name) {
                parse_into(key, value, field);
                known = true;
            }
        });
        if (!known)
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ExperimentConfig ExperimentConfig::preset(std::string_view name)
{
    ExperimentConfig cfg;
    if (name == "paper")
        return cfg;
    if (name == "desk") {
        cfg.signals = 10;
        cfg.trials = 5;
        cfg.sr_episodes = 500;
        cfg.alphas = {0.1, 0.25, 0.5, 1.0};
        cfg.sr_alphas = {0.05, 0.1, 0.25, 0.5, 1.0};
        return cfg;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected paper or desk)");
}

}  // namespace srgvf

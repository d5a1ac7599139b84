#include "srgvf/signals.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace srgvf {

namespace {

// Uniform on [lo, hi) from the top 53 bits, so the upper bound is never hit.
double uniform(std::mt19937_64& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi_exclusive)
{
    std::uniform_int_distribution<int> d(lo, hi_exclusive - 1);
    return d(rng);
}

AxisSignal sample_axis(std::mt19937_64& rng, std::mt19937_64& table_rng, int axis_length)
{
    AxisSignal axis;
    axis.primitive = static_cast<Primitive>(uniform_int(rng, 0, 6));
    switch (axis.primitive) {
    case Primitive::fixed_value:
        axis.value = uniform(rng, -2.0, 2.0);
        break;
    case Primitive::square_wave:
        axis.period = uniform_int(rng, 2, 40);
        axis.invert = uniform_int(rng, 0, 2) == 1;
        break;
    case Primitive::sin_wave:
        axis.period = uniform_int(rng, 2, 40);
        break;
    case Primitive::random_binary:
    case Primitive::random_float: {
        axis.table.resize(static_cast<std::size_t>(axis_length + offset_range));
        for (auto& v : axis.table)
            v = axis.primitive == Primitive::random_binary ? static_cast<double>(table_rng() >> 63)
                                                           : uniform(table_rng, 0.0, 1.0);
        break;
    }
    case Primitive::unit:
        break;
    }
    if (axis.primitive != Primitive::unit) {
        axis.offset = uniform_int(rng, 0, offset_range);
        axis.bias = uniform(rng, -2.0, 2.0);
    }
    return axis;
}

Primitive parse_primitive(const std::string& s)
{
    for (int p = 0; p < 6; ++p)
        if (s == primitive_name(static_cast<Primitive>(p)))
            return static_cast<Primitive>(p);
    throw std::runtime_error("signal record: unknown primitive '" + s + "'");
}

const char* kind_name(SignalKind k)
{
    switch (k) {
    case SignalKind::composed:
        return "composed";
    case SignalKind::shortest_path:
        return "shortest_path";
    case SignalKind::unit:
        return "unit";
    }
    return "?";
}

SignalKind parse_kind(const std::string& s)
{
    if (s == "composed")
        return SignalKind::composed;
    if (s == "shortest_path")
        return SignalKind::shortest_path;
    if (s == "unit")
        return SignalKind::unit;
    throw std::runtime_error("signal record: unknown kind '" + s + "'");
}

void write_axis(std::ostream& os, const AxisSignal& a)
{
    os << primitive_name(a.primitive) << ':' << a.period << ':' << (a.invert ? 1 : 0) << ':' << a.value << ':'
       << a.offset << ':' << a.bias << ':';
    for (std::size_t i = 0; i < a.table.size(); ++i) {
        if (i)
            os << ';';
        os << a.table[i];
    }
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, sep))
        parts.push_back(cur);
    if (!s.empty() && s.back() == sep)
        parts.emplace_back();
    return parts;
}

AxisSignal read_axis(const std::string& text)
{
    const auto f = split(text, ':');
    if (f.size() != 7)
        throw std::runtime_error("signal record: malformed axis '" + text + "'");
    AxisSignal a;
    a.primitive = parse_primitive(f[0]);
    a.period = std::stoi(f[1]);
    a.invert = f[2] == "1";
    a.value = std::stod(f[3]);
    a.offset = std::stoi(f[4]);
    a.bias = std::stod(f[5]);
    if (!f[6].empty())
        for (const auto& v : split(f[6], ';'))
            a.table.push_back(std::stod(v));
    return a;
}

}  // namespace

const char* primitive_name(Primitive p)
{
    switch (p) {
    case Primitive::fixed_value:
        return "fixed_value";
    case Primitive::square_wave:
        return "square_wave";
    case Primitive::sin_wave:
        return "sin_wave";
    case Primitive::random_binary:
        return "random_binary";
    case Primitive::random_float:
        return "random_float";
    case Primitive::unit:
        return "unit";
    }
    return "?";
}

double AxisSignal::operator()(int coord) const
{
    const int pos = coord + offset;
    double sig = 0.0;
    switch (primitive) {
    case Primitive::fixed_value:
        sig = value;
        break;
    case Primitive::square_wave: {
        const int phase = ((pos % period) + period) % period;
        const bool high = phase < (period + 1) / 2;
        sig = (high != invert) ? 1.0 : 0.0;
        break;
    }
    case Primitive::sin_wave:
        sig = std::sin(2.0 * std::numbers::pi * pos / period);
        break;
    case Primitive::random_binary:
    case Primitive::random_float:
        if (pos < 0 || static_cast<std::size_t>(pos) >= table.size())
            throw std::out_of_range("signal: coordinate outside the random table");
        sig = table[static_cast<std::size_t>(pos)];
        break;
    case Primitive::unit:
        sig = 1.0;
        break;
    }
    return sig + bias;
}

SignalSpec sample_spec(std::mt19937_64& rng, const SignalSampling& sampling, std::size_t id)
{
    SignalSpec spec;
    spec.id = id;
    spec.seed = rng();
    spec.noise_sigma = sampling.noise_sigma;
    if (uniform(rng, 0.0, 1.0) < sampling.shortest_path_probability) {
        spec.kind = SignalKind::shortest_path;
        spec.transition_cost = uniform(rng, -10.0, -1.0);
        spec.goal_reward = uniform(rng, 1.0, 10.0);
        return spec;
    }
    std::mt19937_64 table_rng(spec.seed);
    spec.x_axis = sample_axis(rng, table_rng, sampling.width);
    spec.y_axis = sample_axis(rng, table_rng, sampling.height);
    const bool both_unit = spec.x_axis.primitive == Primitive::unit && spec.y_axis.primitive == Primitive::unit;
    spec.kind = both_unit ? SignalKind::unit : SignalKind::composed;
    return spec;
}

double evaluate_mean(const SignalSpec& spec, int x, int y, bool reached_goal)
{
    switch (spec.kind) {
    case SignalKind::unit:
        return 1.0;
    case SignalKind::shortest_path:
        return spec.transition_cost + (reached_goal ? spec.goal_reward : 0.0);
    case SignalKind::composed:
        return spec.x_axis(x) * spec.y_axis(y);
    }
    return 0.0;
}

double evaluate(const SignalSpec& spec, int x, int y, bool reached_goal, std::mt19937_64& rng)
{
    const double mean = evaluate_mean(spec, x, y, reached_goal);
    if (spec.noise_sigma <= 0.0)
        return mean;
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    return mean + noise(rng);
}

std::vector<double> mean_field(const SignalSpec& spec, const GridMap& map, double epsilon)
{
    std::vector<double> out(map.state_count(), 0.0);
    for (std::size_t s = 0; s < map.state_count(); ++s) {
        const Cell c = map.cell_of(s);
        if (c == map.goal())
            continue;
        if (spec.kind != SignalKind::shortest_path) {
            out[s] = evaluate_mean(spec, c.x, c.y, false);
            continue;
        }
        const auto probs = action_probabilities(map, c, epsilon);
        double expected = 0.0;
        for (std::size_t a = 0; a < 4; ++a) {
            const bool reached = step(map, GridState{c, 0}, all_actions[a]).terminal;
            expected += probs[a] * evaluate_mean(spec, c.x, c.y, reached);
        }
        out[s] = expected;
    }
    return out;
}

void write_specs(std::ostream& os, const std::vector<SignalSpec>& specs)
{
    const auto old_precision = os.precision(17);
    for (const auto& s : specs) {
        os << "id=" << s.id << " kind=" << kind_name(s.kind) << " sigma=" << s.noise_sigma << " seed=" << s.seed
           << " cost=" << s.transition_cost << " reward=" << s.goal_reward << " x=";
        write_axis(os, s.x_axis);
        os << " y=";
        write_axis(os, s.y_axis);
        os << '\n';
    }
    os.precision(old_precision);
}

std::vector<SignalSpec> read_specs(std::istream& is)
{
    std::vector<SignalSpec> specs;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        SignalSpec s;
        std::stringstream ss(line);
        std::string field;
        int seen = 0;
        try {
            while (ss >> field) {
                const auto eq = field.find('=');
                if (eq == std::string::npos)
                    throw std::runtime_error("missing '='");
                const auto key = field.substr(0, eq);
                const auto val = field.substr(eq + 1);
                if (key == "id")
                    s.id = std::stoull(val);
                else if (key == "kind")
                    s.kind = parse_kind(val);
                else if (key == "sigma")
                    s.noise_sigma = std::stod(val);
                else if (key == "seed")
                    s.seed = std::stoull(val);
                else if (key == "cost")
                    s.transition_cost = std::stod(val);
                else if (key == "reward")
                    s.goal_reward = std::stod(val);
                else if (key == "x")
                    s.x_axis = read_axis(val);
                else if (key == "y")
                    s.y_axis = read_axis(val);
                else
                    throw std::runtime_error("unknown field '" + key + "'");
                ++seen;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("signal record line " + std::to_string(line_no) + ": " + e.what());
        }
        if (seen != 8)
            throw std::runtime_error("signal record line " + std::to_string(line_no) + ": expected 8 fields");
        specs.push_back(std::move(s));
    }
    return specs;
}

}  // namespace srgvf

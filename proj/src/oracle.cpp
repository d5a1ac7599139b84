#include "srgvf/oracle.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace srgvf {

namespace {

constexpr double residual_tolerance = 1e-10;

Eigen::MatrixXd solve_checked(const Eigen::MatrixXd& transitions, double gamma, const Eigen::MatrixXd& rhs)
{
    if (transitions.rows() != transitions.cols())
        throw std::invalid_argument("oracle: transition matrix must be square");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("oracle: gamma must lie in [0, 1]");
    const auto n = transitions.rows();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - gamma * transitions;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw SingularSystemError("oracle: I - gamma P is singular (rank " + std::to_string(lu.rank()) + " of " +
                                  std::to_string(n) +
                                  "); with gamma = 1 every state must reach an absorbing terminal");
    Eigen::MatrixXd x = lu.solve(rhs);
    const double residual = (a * x - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (!(residual <= residual_tolerance * scale))
        throw SingularSystemError("oracle: linear solve residual " + std::to_string(residual) +
                                  " exceeds tolerance");
    return x;
}

void accumulate(MonteCarloReference& ref, std::size_t state, const double* value)
{
    ref.visits[state] += 1;
    double* row = ref.sums.data() + state * ref.width;
    for (std::size_t k = 0; k < ref.width; ++k)
        row[k] += value[k];
}

struct Trajectory {
    std::vector<std::size_t> states;  // S_0 .. S_T (S_T terminal unless capped)
    std::vector<double> cumulants;    // C_1 .. C_T
    bool terminated = false;
};

Trajectory rollout(const GridMap& map, double epsilon, const SignalSpec* spec, std::mt19937_64& rng,
                   RolloutLimits limits)
{
    Trajectory tr;
    GridState s{map.start(), 0};
    tr.states.push_back(map.state_index(s.position));
    while (s.episode_step < limits.step_cap) {
        const Action a = select_action(map, s, epsilon, rng);
        const auto r = step(map, s, a);
        if (spec)
            tr.cumulants.push_back(evaluate(*spec, s.position.x, s.position.y, r.terminal, rng));
        s = r.next;
        tr.states.push_back(map.state_index(s.position));
        if (r.terminal) {
            tr.terminated = true;
            break;
        }
    }
    return tr;
}

}  // namespace

Eigen::MatrixXd analytic_sr(const Eigen::MatrixXd& transitions, double gamma)
{
    const auto n = transitions.rows();
    return solve_checked(transitions, gamma, Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd analytic_gvf(const Eigen::MatrixXd& transitions, double gamma, const Eigen::VectorXd& cbar)
{
    if (cbar.size() != transitions.rows())
        throw std::invalid_argument("oracle: cumulant vector length does not match the transition matrix");
    return solve_checked(transitions, gamma, cbar);
}

AnalyticSolution analytic_solution(const GridMap& map, double epsilon, double gamma,
                                   const std::vector<SignalSpec>& signals)
{
    AnalyticSolution sol;
    sol.gamma = gamma;
    const Eigen::MatrixXd p = transition_matrix(map, epsilon);
    sol.psi = analytic_sr(p, gamma);
    for (const auto& spec : signals) {
        const auto mf = mean_field(spec, map, epsilon);
        const Eigen::VectorXd cbar = Eigen::Map<const Eigen::VectorXd>(mf.data(), static_cast<Eigen::Index>(mf.size()));
        sol.values.push_back(sol.psi * cbar);
    }
    return sol;
}

double MonteCarloReference::mean(std::size_t state, std::size_t k) const
{
    if (!has(state))
        throw std::out_of_range("monte carlo reference: state " + std::to_string(state) + " never visited");
    return sums[state * width + k] / static_cast<double>(visits[state]);
}

std::vector<double> MonteCarloReference::mean_row(std::size_t state) const
{
    std::vector<double> row(width);
    for (std::size_t k = 0; k < width; ++k)
        row[k] = mean(state, k);
    return row;
}

MonteCarloReference merge(const MonteCarloReference& a, const MonteCarloReference& b)
{
    if (a.width != b.width || a.visits.size() != b.visits.size())
        throw std::invalid_argument("monte carlo merge: shapes differ");
    MonteCarloReference out = a;
    for (std::size_t i = 0; i < out.sums.size(); ++i)
        out.sums[i] += b.sums[i];
    for (std::size_t i = 0; i < out.visits.size(); ++i)
        out.visits[i] += b.visits[i];
    out.episodes_used += b.episodes_used;
    return out;
}

MonteCarloReference mc_reference_signal(const GridMap& map, double epsilon, const SignalSpec& spec, double gamma,
                                        std::uint64_t episodes, std::mt19937_64& rng, RolloutLimits limits)
{
    if (episodes == 0)
        throw std::invalid_argument("monte carlo: episodes must be positive");
    const auto n = map.state_count();
    MonteCarloReference ref;
    ref.width = 1;
    ref.sums.assign(n, 0.0);
    ref.visits.assign(n, 0);
    for (std::uint64_t e = 0; e < episodes; ++e) {
        const auto tr = rollout(map, epsilon, &spec, rng, limits);
        double ret = 0.0;
        // The terminal state returns nothing; a capped final state is left out.
        if (tr.terminated)
            accumulate(ref, tr.states.back(), &ret);
        for (std::size_t t = tr.cumulants.size(); t-- > 0;) {
            ret = tr.cumulants[t] + gamma * ret;
            accumulate(ref, tr.states[t], &ret);
        }
    }
    ref.episodes_used = episodes;
    return ref;
}

MonteCarloReference mc_reference_sr(const GridMap& map, double epsilon, double gamma, std::uint64_t episodes,
                                    std::mt19937_64& rng, RolloutLimits limits)
{
    if (episodes == 0)
        throw std::invalid_argument("monte carlo: episodes must be positive");
    const auto n = map.state_count();
    MonteCarloReference ref;
    ref.width = n;
    ref.sums.assign(n * n, 0.0);
    ref.visits.assign(n, 0);
    std::vector<double> ret(n);
    for (std::uint64_t e = 0; e < episodes; ++e) {
        const auto tr = rollout(map, epsilon, nullptr, rng, limits);
        std::fill(ret.begin(), ret.end(), 0.0);
        std::size_t t = tr.states.size();
        if (tr.terminated) {
            --t;
            ret[tr.states[t]] = 1.0;
            accumulate(ref, tr.states[t], ret.data());
        } else {
            --t;  // drop the capped final state
        }
        while (t-- > 0) {
            for (double& v : ret)
                v *= gamma;
            ret[tr.states[t]] += 1.0;
            accumulate(ref, tr.states[t], ret.data());
        }
    }
    ref.episodes_used = episodes;
    return ref;
}

void write_reference(std::ostream& os, const ReferenceHeader& header, const MonteCarloReference& ref)
{
    const auto old_precision = os.precision(17);
    os << "# map_hash=" << std::hex << header.map_hash << std::dec << ",gamma=" << header.gamma
       << ",epsilon=" << header.epsilon << ",episodes=" << header.episodes << ",seed=" << header.seed << '\n';
    os << "state,visits";
    for (std::size_t k = 0; k < ref.width; ++k)
        os << ",v" << k;
    os << '\n';
    for (std::size_t s = 0; s < ref.visits.size(); ++s) {
        if (!ref.has(s))
            continue;
        os << s << ',' << ref.visits[s];
        for (std::size_t k = 0; k < ref.width; ++k)
            os << ',' << ref.mean(s, k);
        os << '\n';
    }
    os.precision(old_precision);
}

MonteCarloReference read_reference(std::istream& is, ReferenceHeader& header, std::size_t state_count)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error("reference file: missing header block");
    {
        std::stringstream ss(line.substr(2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("reference file: malformed header item '" + item + "'");
            const auto key = item.substr(0, eq);
            const auto val = item.substr(eq + 1);
            if (key == "map_hash")
                header.map_hash = std::stoull(val, nullptr, 16);
            else if (key == "gamma")
                header.gamma = std::stod(val);
            else if (key == "epsilon")
                header.epsilon = std::stod(val);
            else if (key == "episodes")
                header.episodes = std::stoull(val);
            else if (key == "seed")
                header.seed = std::stoull(val);
            else
                throw std::runtime_error("reference file: unknown header key '" + key + "'");
        }
    }
    if (!std::getline(is, line))
        throw std::runtime_error("reference file: missing column header");
    std::size_t width = 0;
    for (char ch : line)
        width += ch == ',';
    if (width < 2)
        throw std::runtime_error("reference file: no value columns");
    width -= 1;

    MonteCarloReference ref;
    ref.width = width;
    ref.sums.assign(state_count * width, 0.0);
    ref.visits.assign(state_count, 0);
    ref.episodes_used = header.episodes;
    int row = 2;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != width + 2)
            throw std::runtime_error("reference file row " + std::to_string(row) + ": wrong column count");
        const auto s = std::stoull(cells[0]);
        if (s >= state_count)
            throw std::runtime_error("reference file row " + std::to_string(row) + ": state out of range");
        const auto visits = std::stoull(cells[1]);
        ref.visits[s] = visits;
        for (std::size_t k = 0; k < width; ++k)
            ref.sums[s * width + k] = std::stod(cells[k + 2]) * static_cast<double>(visits);
    }
    return ref;
}

ScalingCounts scaling_weights(std::uint64_t discounts, std::uint64_t predictors, std::uint64_t states)
{
    if (discounts == 0 || predictors == 0 || states == 0)
        throw std::invalid_argument("scaling: f, h and |S| must be positive");
    ScalingCounts c;
    c.direct = discounts * predictors * states;
    c.sr_based = discounts * states * states + predictors * states;
    if (discounts > 1)
        c.crossover_h = static_cast<double>(discounts * states) / static_cast<double>(discounts - 1);
    return c;
}

}  // namespace srgvf

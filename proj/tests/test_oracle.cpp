#include "srgvf/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace srgvf;

namespace {

// Truncated Neumann series sum_k (gamma P)^k.
Eigen::MatrixXd power_series(const Eigen::MatrixXd& P, double gamma, int terms)
{
    Eigen::MatrixXd total = Eigen::MatrixXd::Identity(P.rows(), P.cols());
    Eigen::MatrixXd term = total;
    for (int k = 1; k < terms; ++k) {
        term = term * (gamma * P);
        total += term;
    }
    return total;
}

const char* kThree =
    "S..\n"
    "...\n"
    "..G\n"
    "\n"
    ">>v\n"
    ">>v\n"
    ">>G\n";

}  // namespace

TEST(Oracle, TwoStateChainInverse)
{
    Eigen::MatrixXd P(2, 2);
    P << 0, 1, 0, 0;
    const auto psi = analytic_sr(P, 0.5);
    EXPECT_DOUBLE_EQ(psi(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(psi(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(psi(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(psi(1, 1), 1.0);

    Eigen::VectorXd c(2);
    c << 2, 0;
    const auto v = analytic_gvf(P, 0.9, c);
    EXPECT_DOUBLE_EQ(v(0), 2.0);
    EXPECT_DOUBLE_EQ(v(1), 0.0);
}

TEST(Oracle, UndiscountedChainCountsVisits)
{
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
    P(0, 1) = 1.0;
    P(1, 2) = 1.0;
    const auto psi = analytic_sr(P, 1.0);
    EXPECT_NEAR(psi(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(psi(0, 1), 1.0, 1e-12);
    EXPECT_NEAR(psi(0, 2), 1.0, 1e-12);
}

TEST(Oracle, SingularSystemRejected)
{
    Eigen::MatrixXd P(2, 2);
    P << 0, 1, 1, 0;
    EXPECT_THROW(analytic_sr(P, 1.0), SingularSystemError);
}

TEST(Oracle, MatchesNeumannSeriesOnMaze)
{
    const auto map = make_dayan_map();
    const auto P = transition_matrix(map, 0.3);
    for (double gamma : {0.0, 0.5, 0.9}) {
        const auto psi = analytic_sr(P, gamma);
        const auto series = power_series(P, gamma, 600);
        EXPECT_LT((psi - series).cwiseAbs().maxCoeff(), 1e-9) << "gamma " << gamma;
    }
}

TEST(Oracle, MonteCarloSrAgreesWithAnalytic)
{
    const auto map = load_map(kThree);
    const auto P = transition_matrix(map, 0.3);
    const auto psi = analytic_sr(P, 0.9);
    std::mt19937_64 rng(21);
    const auto mc = mc_reference_sr(map, 0.3, 0.9, 30000, rng);
    EXPECT_EQ(mc.episodes_used, 30000u);
    for (std::size_t s = 0; s < map.state_count(); ++s) {
        if (!mc.has(s))
            continue;
        // Off-path corners see a few hundred visits; their sampling error is larger.
        const double tol = mc.visits[s] >= 1000 ? 0.02 : 0.1;
        for (std::size_t j = 0; j < map.state_count(); ++j)
            EXPECT_NEAR(mc.mean(s, j), psi(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)), tol);
    }
}

TEST(Oracle, MonteCarloSignalWithinNoiseBound)
{
    const auto map = load_map(kThree);
    SignalSpec spec;
    spec.kind = SignalKind::unit;
    spec.noise_sigma = 0.3;
    const auto P = transition_matrix(map, 0.0);
    const auto mf = mean_field(spec, map, 0.0);
    const Eigen::VectorXd v =
        analytic_gvf(P, 0.5, Eigen::Map<const Eigen::VectorXd>(mf.data(), static_cast<Eigen::Index>(mf.size())));
    std::mt19937_64 rng(8);
    const auto mc = mc_reference_signal(map, 0.0, spec, 0.5, 5000, rng);
    for (std::size_t s = 0; s < map.state_count(); ++s) {
        if (!mc.has(s))
            continue;
        // Under epsilon = 0 only the return noise varies; its std is at most 0.3 / sqrt(1 - 0.25).
        const double bound = 3.0 * 0.3 / std::sqrt(0.75) / std::sqrt(static_cast<double>(mc.visits[s]));
        EXPECT_NEAR(mc.mean(s), v(static_cast<Eigen::Index>(s)), bound);
    }
}

TEST(Oracle, ShardsMergeByCount)
{
    const auto map = load_map(kThree);
    SignalSpec spec;
    spec.kind = SignalKind::unit;
    std::mt19937_64 a_rng(1), b_rng(2);
    const auto a = mc_reference_signal(map, 0.3, spec, 0.9, 300, a_rng);
    const auto b = mc_reference_signal(map, 0.3, spec, 0.9, 500, b_rng);
    const auto m = merge(a, b);
    EXPECT_EQ(m.episodes_used, 800u);
    const auto s = map.start_index();
    EXPECT_NEAR(m.mean(s), (a.sums[s] + b.sums[s]) / static_cast<double>(a.visits[s] + b.visits[s]), 1e-12);
}

TEST(Oracle, ReferenceFileRoundTrip)
{
    const auto map = load_map(kThree);
    std::mt19937_64 rng(5);
    const auto ref = mc_reference_sr(map, 0.3, 0.5, 200, rng);
    const ReferenceHeader header{map.hash(), 0.5, 0.3, 200, 5};
    std::stringstream ss;
    write_reference(ss, header, ref);
    ReferenceHeader got;
    const auto back = read_reference(ss, got, map.state_count());
    EXPECT_EQ(got.map_hash, header.map_hash);
    EXPECT_EQ(got.gamma, 0.5);
    EXPECT_EQ(got.seed, 5u);
    EXPECT_EQ(back.visits, ref.visits);
    for (std::size_t i = 0; i < ref.sums.size(); ++i)
        EXPECT_DOUBLE_EQ(back.sums[i], ref.sums[i]);
}

TEST(Oracle, ScalingFormulas)
{
    auto c = scaling_weights(2, 21, 10);
    EXPECT_EQ(c.direct, 420u);
    EXPECT_EQ(c.sr_based, 410u);
    EXPECT_DOUBLE_EQ(c.crossover_h, 20.0);
    c = scaling_weights(2, 20, 10);
    EXPECT_EQ(c.direct, 400u);
    EXPECT_EQ(c.sr_based, 400u);
    EXPECT_TRUE(std::isinf(scaling_weights(1, 50, 10).crossover_h));
}

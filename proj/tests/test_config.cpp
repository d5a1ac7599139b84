#include "srgvf/config.hpp"

#include <gtest/gtest.h>

using namespace srgvf;

TEST(Config, RoundTripsThroughText)
{
    auto cfg = ExperimentConfig::preset("desk");
    cfg.gammas = {0.0, 0.25, 0.9};
    cfg.epsilon = 0.1 + 0.2;
    cfg.reference = "mc";
    cfg.input_channels = {"a", "b"};
    EXPECT_EQ(ExperimentConfig::parse(cfg.to_text()), cfg);
}

TEST(Config, RejectsUnknownAndDuplicateKeys)
{
    EXPECT_THROW(ExperimentConfig::parse("epsilonn = 0.3\n"), ConfigError);
    EXPECT_THROW(ExperimentConfig::parse("trials = 3\ntrials = 4\n"), ConfigError);
    EXPECT_THROW(ExperimentConfig::parse("trials three\n"), ConfigError);
    EXPECT_THROW(ExperimentConfig::parse("epsilon = 1.5\n"), ConfigError);
    EXPECT_THROW(ExperimentConfig::parse("trials = 0\n"), ConfigError);
    EXPECT_THROW(ExperimentConfig::preset("huge"), ConfigError);
}

TEST(Config, CommentsAndDefaults)
{
    const auto cfg = ExperimentConfig::parse("# grid\nsignals = 5  # fewer\n\n");
    EXPECT_EQ(cfg.signals, 5u);
    EXPECT_EQ(cfg.epsilon, 0.3);
    EXPECT_EQ(cfg.total_episodes(), 250);
}

TEST(Config, HashIgnoresExecutionKnobs)
{
    auto a = ExperimentConfig::preset("paper");
    auto b = a;
    b.out = "elsewhere";
    b.parallel = 8;
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = 2;
    EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, SeedTree)
{
    EXPECT_EQ(seed_tree(1, 0, "policy"), seed_tree(1, 0, "policy"));
    EXPECT_NE(seed_tree(1, 0, "policy"), seed_tree(1, 1, "policy"));
    EXPECT_NE(seed_tree(1, 0, "policy"), seed_tree(1, 0, "noise"));
    EXPECT_NE(seed_tree(1, 0, "policy"), seed_tree(2, 0, "policy"));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

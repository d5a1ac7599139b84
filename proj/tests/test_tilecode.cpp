#include "srgvf/tilecode.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace srgvf;

TEST(TileCode, DimensionAndActiveBound)
{
    TileCoder coder(TileCoderConfig{});
    EXPECT_EQ(coder.output_dimension(), 2049u);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(4);
    for (int i = 0; i < 2000; ++i) {
        for (auto& v : x)
            v = u(rng);
        const auto phi = coder.encode(x);
        EXPECT_LE(phi.active_count(), 101u);
        EXPECT_EQ(phi.active().back(), 2048u);  // bias unit
    }
}

TEST(TileCode, DeterministicAndLocal)
{
    TileCoderConfig cfg;
    cfg.input_dim = 2;
    cfg.tilings = 8;
    cfg.tile_width = {0.25};
    cfg.memory_size = 1 << 16;
    cfg.bias = false;
    TileCoder a(cfg), b(cfg);
    const std::vector<double> x{0.3, 0.7};
    EXPECT_EQ(a.encode(x), b.encode(x));
    EXPECT_EQ(a.encode(x).active_count(), 8u);

    auto overlap = [&](const std::vector<double>& y) {
        const auto p = a.encode(x), q = a.encode(y);
        std::size_t shared = 0;
        for (auto i : p.active())
            for (auto j : q.active())
                shared += i == j;
        return shared;
    };
    EXPECT_GT(overlap({0.31, 0.7}), overlap({0.9, 0.1}));

    cfg.hash_seed = 99;
    TileCoder c(cfg);
    EXPECT_NE(c.encode(x), a.encode(x));
}

TEST(TileCode, ClampsOutOfRangeInputs)
{
    TileCoderConfig cfg;
    cfg.input_dim = 1;
    cfg.tilings = 4;
    TileCoder coder(cfg);
    const std::vector<double> hi{1.5};
    const std::vector<double> one{1.0};
    EXPECT_EQ(coder.encode(hi), coder.encode(one));
    EXPECT_EQ(coder.clamped_count(), 1u);
    const std::vector<double> wrong(2, 0.0);
    EXPECT_THROW(coder.encode(wrong), std::invalid_argument);
}

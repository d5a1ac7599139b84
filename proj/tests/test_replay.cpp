#include "srgvf/replay.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace srgvf;

namespace {

Dataset small_synthetic(std::size_t steps, std::uint64_t seed = 1)
{
    SyntheticDatasetConfig cfg;
    cfg.steps = steps;
    cfg.seed = seed;
    return synthetic_dataset(cfg);
}

ReplayConfig small_config()
{
    ReplayConfig rc;
    rc.input_channels = {"shoulder_pos", "elbow_pos"};
    rc.target_channels = {"shoulder_current", "shoulder_pos", "shoulder_speed",
                          "elbow_current",    "elbow_pos",    "elbow_speed"};
    rc.activation_interval = 100;
    rc.coder.tilings = 8;
    rc.coder.memory_size = 256;
    return rc;
}

}  // namespace

TEST(Replay, IngestsChannels)
{
    std::stringstream ss("t,a,b\n0,1,5\n0.5,2,5\n1.0,3,5\n");
    const auto ds = ingest(ss);
    EXPECT_EQ(ds.names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(ds.length(), 3u);
    EXPECT_DOUBLE_EQ(ds.rate_hz, 2.0);
    EXPECT_DOUBLE_EQ(ds.normalize(0, 2.0), 0.5);
    EXPECT_EQ(ds.normalize(1, 5.0), 0.0);
    ASSERT_EQ(ds.warnings.size(), 1u);
}

TEST(Replay, IngestErrorsCarryRow)
{
    auto row_of = [](const std::string& text) -> std::size_t {
        std::stringstream ss(text);
        try {
            ingest(ss);
        } catch (const DatasetError& e) {
            return e.row();
        }
        return 0;
    };
    EXPECT_EQ(row_of("x,a\n0,1\n"), 1u);
    EXPECT_EQ(row_of("t,a\n0,1\n1,oops\n"), 3u);
    EXPECT_EQ(row_of("t,a\n0,1\n1,2,3\n"), 3u);
    EXPECT_EQ(row_of("t,a\n"), 1u);
}

TEST(Replay, DatasetRoundTrip)
{
    const auto ds = small_synthetic(50);
    std::stringstream ss;
    write_dataset(ss, ds);
    const auto back = ingest(ss);
    EXPECT_EQ(back.names, ds.names);
    EXPECT_EQ(back.columns, ds.columns);
}

TEST(Replay, TraceRecurrence)
{
    TraceState tr(1.0);
    EXPECT_DOUBLE_EQ(tr.value(), 1.0);
    EXPECT_DOUBLE_EQ(tr.update(0.0), 0.8);
}

TEST(Replay, StepSizeSchedule)
{
    EXPECT_DOUBLE_EQ(schedule_alpha({0.1, 10, 0}, 5, 1), 0.05);
    EXPECT_DOUBLE_EQ(schedule_alpha({0.1, 21600, 2000}, 2000, 101), 0.1 / 101);
    EXPECT_EQ(schedule_alpha({0.1, 10, 0}, 20, 1), 0.0);
    EXPECT_THROW(schedule_alpha({0.1, 10, 5}, 4, 1), std::invalid_argument);
}

TEST(Replay, FeaturesUsePositionAndTrace)
{
    std::stringstream ss("t,p\n0,0\n1,1\n2,1\n");
    const auto ds = ingest(ss);
    TileCoderConfig tc;
    tc.input_dim = 2;
    tc.tilings = 4;
    const std::vector<std::string> channels{"p"};
    const auto phi = build_features(ds, channels, TileCoder(tc));
    ASSERT_EQ(phi.size(), 3u);
    // Expected inputs: (0, 0), (1, 0.2), (1, 0.36).
    TileCoder coder(tc);
    EXPECT_EQ(phi[0], coder.encode(std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(phi[1], coder.encode(std::vector<double>{1.0, 0.2}));
    EXPECT_EQ(phi[2], coder.encode(std::vector<double>{1.0, 0.2 * 0.8 + 0.2}));
    tc.input_dim = 4;
    EXPECT_THROW(build_features(ds, channels, TileCoder(tc)), std::invalid_argument);
}

TEST(Replay, ActivationScheduleAndRecords)
{
    const auto ds = small_synthetic(700);
    const auto rc = small_config();
    const auto r = run_replay(ds, rc);
    EXPECT_EQ(r.activation, (std::vector<std::int64_t>{0, 100, 200, 300, 400, 500}));
    std::size_t expected = 0;
    for (auto a : r.activation)
        expected += 2 * (700 - static_cast<std::size_t>(a));
    EXPECT_EQ(r.records.size(), expected);
    for (const auto& rec : r.records) {
        ASSERT_GE(rec.t, r.activation[rec.signal]);
        EXPECT_EQ(rec.cumulant, ds.columns[ds.channel(rc.target_channels[rec.signal])][rec.t]);
    }

    const auto errs = replay_errors(r, 6, rc.gamma);
    ASSERT_EQ(errs.size(), 12u);
    EXPECT_EQ(errs.back().t.front(), 500);
}

TEST(Replay, FromStartActivatesEverything)
{
    auto rc = small_config();
    rc.from_start = true;
    const auto r = run_replay(small_synthetic(300), rc);
    for (auto a : r.activation)
        EXPECT_EQ(a, 0);
}

TEST(Replay, RunIsDeterministic)
{
    const auto ds = small_synthetic(400, 7);
    const auto a = run_replay(ds, small_config());
    const auto b = run_replay(ds, small_config());
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        EXPECT_EQ(a.records[i].prediction, b.records[i].prediction);
}

#include "srgvf/features.hpp"

#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

using namespace srgvf;

TEST(Features, OneHotHasSingleActiveIndex)
{
    const auto phi = encode_one_hot(2, 5);
    EXPECT_TRUE(phi.is_sparse());
    EXPECT_EQ(phi.dimension(), 5u);
    EXPECT_EQ(phi.active_count(), 1u);
    EXPECT_EQ(phi.to_dense(), (std::vector<double>{0, 0, 1, 0, 0}));
    EXPECT_THROW(encode_one_hot(5, 5), std::invalid_argument);
}

TEST(Features, SparseSortsAndRejectsBadIndices)
{
    const auto phi = FeatureVector::sparse(6, {4, 1, 3});
    ASSERT_EQ(phi.active().size(), 3u);
    EXPECT_EQ(phi.active()[0], 1u);
    EXPECT_EQ(phi.active()[2], 4u);
    EXPECT_DOUBLE_EQ(phi[3], 1.0);
    EXPECT_DOUBLE_EQ(phi[2], 0.0);
    EXPECT_THROW(FeatureVector::sparse(6, {1, 1}), std::invalid_argument);
    EXPECT_THROW(FeatureVector::sparse(6, {6}), std::invalid_argument);
}

TEST(Features, DotAndAddScaledAgreeWithDenseArithmetic)
{
    const std::vector<double> w{1.0, -2.0, 0.5, 4.0};
    const auto sparse = FeatureVector::sparse(4, {1, 3});
    const auto dense = FeatureVector::dense({0.5, 1.0, 0.0, -1.0});
    EXPECT_DOUBLE_EQ(dot(sparse, w), -2.0 + 4.0);
    EXPECT_DOUBLE_EQ(dot(dense, w), 0.5 - 2.0 - 4.0);
    EXPECT_EQ(dense.active_count(), 3u);

    std::vector<double> target(4, 1.0);
    add_scaled(sparse, 2.0, target);
    EXPECT_EQ(target, (std::vector<double>{1, 3, 1, 3}));
    add_scaled(dense, -2.0, target);
    EXPECT_EQ(target, (std::vector<double>{0, 1, 1, 5}));

    const std::vector<double> short_w(3, 0.0);
    EXPECT_THROW(dot(sparse, short_w), std::invalid_argument);
}

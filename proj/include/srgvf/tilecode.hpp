#pragma once

#include "srgvf/features.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srgvf {

struct TileCoderConfig {
    std::size_t input_dim = 4;
    std::size_t tilings = 100;
    std::vector<double> tile_width{1.0};  // one entry, or one per input dimension
    std::size_t memory_size = 2048;
    bool bias = true;
    std::uint64_t hash_seed = 0;
};

/// Hashed tile coding into a fixed memory, plus an optional bias unit at
/// index memory_size.
///
/// Tiling t is displaced by ((t * (2k + 1)) mod tilings) / tilings of a tile
/// width along dimension k. Tile coordinates (tiling, q_0..q_{n-1}) are
/// folded through splitmix64 starting from hash_seed and reduced modulo
/// memory_size. Inputs are expected in [0, 1]; others are clamped and counted.
class TileCoder {
public:
    explicit TileCoder(TileCoderConfig config);
    TileCoder(const TileCoder& other);
    TileCoder& operator=(const TileCoder& other);

    const TileCoderConfig& config() const { return config_; }
    std::size_t output_dimension() const { return config_.memory_size + (config_.bias ? 1 : 0); }
    std::size_t max_active() const { return config_.tilings + (config_.bias ? 1 : 0); }

    FeatureVector encode(std::span<const double> input) const;

    std::uint64_t clamped_count() const { return clamped_.load(std::memory_order_relaxed); }

private:
    TileCoderConfig config_;
    std::vector<double> widths_;
    mutable std::atomic<std::uint64_t> clamped_{0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace srgvf

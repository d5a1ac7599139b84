#include "srgvf/tilecode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srgvf {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

TileCoder::TileCoder(TileCoderConfig config) : config_(std::move(config))
{
    if (config_.input_dim == 0 || config_.tilings == 0 || config_.memory_size == 0)
        throw std::invalid_argument("tile coder: input_dim, tilings and memory_size must be positive");
    if (config_.tile_width.size() == 1)
        widths_.assign(config_.input_dim, config_.tile_width.front());
    else if (config_.tile_width.size() == config_.input_dim)
        widths_ = config_.tile_width;
    else
        throw std::invalid_argument("tile coder: tile_width needs one value or one per input dimension");
    for (double w : widths_)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("tile coder: tile widths must be positive");
}

TileCoder::TileCoder(const TileCoder& other)
    : config_(other.config_), widths_(other.widths_), clamped_(other.clamped_count())
{
}

TileCoder& TileCoder::operator=(const TileCoder& other)
{
    config_ = other.config_;
    widths_ = other.widths_;
    clamped_.store(other.clamped_count(), std::memory_order_relaxed);
    return *this;
}

FeatureVector TileCoder::encode(std::span<const double> input) const
{
    const auto n = config_.input_dim;
    if (input.size() != n)
        throw std::invalid_argument("tile coder: expected " + std::to_string(n) + " inputs");

    std::vector<double> x(input.begin(), input.end());
    for (double& v : x) {
        if (std::isnan(v))
            throw std::invalid_argument("tile coder: NaN input");
        if (v < 0.0 || v > 1.0) {
            v = std::clamp(v, 0.0, 1.0);
            clamped_.fetch_add(1, std::memory_order_relaxed);
        }
    }

    const auto tilings = config_.tilings;
    std::vector<FeatureVector::Index> active;
    active.reserve(max_active());
    for (std::size_t t = 0; t < tilings; ++t) {
        std::uint64_t h = splitmix64(config_.hash_seed ^ splitmix64(t));
        for (std::size_t k = 0; k < n; ++k) {
            const double displacement =
                static_cast<double>((t * (2 * k + 1)) % tilings) / static_cast<double>(tilings) * widths_[k];
            const auto q = static_cast<std::int64_t>(std::floor((x[k] + displacement) / widths_[k]));
            h = splitmix64(h ^ static_cast<std::uint64_t>(q));
        }
        active.push_back(static_cast<FeatureVector::Index>(h % config_.memory_size));
    }
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    if (config_.bias)
        active.push_back(static_cast<FeatureVector::Index>(config_.memory_size));
    return FeatureVector::sparse(output_dimension(), std::move(active));
}

}  // namespace srgvf

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srgvf {

/// Observation encoding shared by every learner.
///
/// A feature vector is either dense (d explicit reals) or sparse binary
/// (a sorted set of active indices, each implicitly 1.0). Instances are
/// immutable once built.
class FeatureVector {
public:
    using Index = std::uint32_t;

    static FeatureVector dense(std::vector<double> values);
    /// Throws std::invalid_argument on duplicate or out-of-range indices.
    /// Indices need not be pre-sorted.
    static FeatureVector sparse(std::size_t dimension, std::vector<Index> active);

    std::size_t dimension() const { return dimension_; }
    bool is_sparse() const { return sparse_; }

    /// Active indices; empty for dense vectors.
    std::span<const Index> active() const { return active_; }
    /// Dense values; empty for sparse vectors.
    std::span<const double> values() const { return values_; }

    /// Number of non-zero entries.
    std::size_t active_count() const;

    double operator[](std::size_t i) const;
    std::vector<double> to_dense() const;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    FeatureVector() = default;

    std::size_t dimension_ = 0;
    bool sparse_ = false;
    std::vector<Index> active_;
    std::vector<double> values_;
};

FeatureVector encode_one_hot(std::size_t state_index, std::size_t state_count);

/// Sum of a_i * b_i. Throws std::invalid_argument on dimension mismatch.
double dot(const FeatureVector& a, std::span<const double> b);

/// target += scale * phi
void add_scaled(const FeatureVector& phi, double scale, std::span<double> target);

}  // namespace srgvf

#include "srgvf/features.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace srgvf {

FeatureVector FeatureVector::dense(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("feature vector: dimension must be positive");
    FeatureVector fv;
    fv.dimension_ = values.size();
    fv.sparse_ = false;
    fv.values_ = std::move(values);
    return fv;
}

FeatureVector FeatureVector::sparse(std::size_t dimension, std::vector<Index> active)
{
    if (dimension == 0)
        throw std::invalid_argument("feature vector: dimension must be positive");
    std::sort(active.begin(), active.end());
    if (std::adjacent_find(active.begin(), active.end()) != active.end())
        throw std::invalid_argument("feature vector: duplicate active index");
    if (!active.empty() && active.back() >= dimension)
        throw std::invalid_argument("feature vector: active index " + std::to_string(active.back()) +
                                    " out of range for dimension " + std::to_string(dimension));
    FeatureVector fv;
    fv.dimension_ = dimension;
    fv.sparse_ = true;
    fv.active_ = std::move(active);
    return fv;
}

std::size_t FeatureVector::active_count() const
{
    if (sparse_)
        return active_.size();
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

double FeatureVector::operator[](std::size_t i) const
{
    if (i >= dimension_)
        throw std::out_of_range("feature vector: index out of range");
    if (!sparse_)
        return values_[i];
    return std::binary_search(active_.begin(), active_.end(), static_cast<Index>(i)) ? 1.0 : 0.0;
}

std::vector<double> FeatureVector::to_dense() const
{
    if (!sparse_)
        return values_;
    std::vector<double> out(dimension_, 0.0);
    for (Index i : active_)
        out[i] = 1.0;
    return out;
}

FeatureVector encode_one_hot(std::size_t state_index, std::size_t state_count)
{
    if (state_index >= state_count)
        throw std::invalid_argument("one-hot: state index " + std::to_string(state_index) +
                                    " out of range for " + std::to_string(state_count) + " states");
    return FeatureVector::sparse(state_count, {static_cast<FeatureVector::Index>(state_index)});
}

double dot(const FeatureVector& a, std::span<const double> b)
{
    if (a.dimension() != b.size())
        throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.dimension()) +
                                    " vs " + std::to_string(b.size()) + ")");
    double sum = 0.0;
    if (a.is_sparse()) {
        for (auto i : a.active())
            sum += b[i];
    } else {
        auto v = a.values();
        for (std::size_t i = 0; i < v.size(); ++i)
            sum += v[i] * b[i];
    }
    return sum;
}

void add_scaled(const FeatureVector& phi, double scale, std::span<double> target)
{
    if (phi.dimension() != target.size())
        throw std::invalid_argument("add_scaled: dimension mismatch");
    if (phi.is_sparse()) {
        for (auto i : phi.active())
            target[i] += scale;
    } else {
        auto v = phi.values();
        for (std::size_t i = 0; i < v.size(); ++i)
            target[i] += scale * v[i];
    }
}

}  // namespace srgvf

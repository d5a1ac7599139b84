#pragma once

#include "srgvf/features.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace srgvf {

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear successor features psi(phi) = M^T phi, learned with TD(0).
///
/// M is d x d, stored row-major, and starts at zero. Row i is the
/// successor-feature contribution of feature i, so for one-hot features
/// row s is the SR of state s. Updates with sparse binary phi(S) touch only
/// the rows indexed by its active features.
///
/// The learner flags itself diverged when a TD error component is
/// non-finite or an updated entry exceeds `divergence_limit` in magnitude;
/// further updates throw DivergenceError until reset().
class SuccessorMatrix {
public:
    static constexpr double divergence_limit = 1e12;

    SuccessorMatrix(std::size_t dimension, double gamma, double step_size);

    std::size_t dimension() const { return dim_; }
    /// Constant discount the matrix was built for (recorded in snapshots).
    double gamma() const { return gamma_; }
    double step_size() const { return alpha_; }
    void set_step_size(double alpha);

    double at(std::size_t row, std::size_t col) const { return m_[row * dim_ + col]; }
    std::span<const double> row(std::size_t i) const { return {m_.data() + i * dim_, dim_}; }
    std::span<double> row(std::size_t i) { return {m_.data() + i * dim_, dim_}; }
    std::span<const double> data() const { return m_; }
    void set(std::size_t row, std::size_t col, double value) { m_[row * dim_ + col] = value; }

    /// psi = M^T phi.
    std::vector<double> predict(const FeatureVector& phi) const;
    void predict_into(const FeatureVector& phi, std::span<double> out) const;

    /// delta = phi(S) + gamma_next * M^T phi(S') - M^T phi(S);  M += alpha * phi(S) (x) delta.
    std::vector<double> update(const FeatureVector& phi_s, const FeatureVector& phi_next, double gamma_next);

    /// Episodic end: delta = phi(S') - M^T phi(S');  M += alpha * phi(S') (x) delta.
    std::vector<double> terminal_flush(const FeatureVector& phi_terminal);

    bool diverged() const { return diverged_; }
    /// Zeroes M and clears the divergence flag.
    void reset();

    std::size_t weight_count() const { return m_.size(); }

    /// CSV snapshot: "# successor_matrix,d=<d>,gamma=<g>" then d rows of d values.
    void save_csv(std::ostream& os) const;
    static SuccessorMatrix load_csv(std::istream& is, double step_size = 0.0);
    /// Binary snapshot: magic, d (u64), gamma (f64), then d*d f64 row-major.
    void save_binary(std::ostream& os) const;
    static SuccessorMatrix load_binary(std::istream& is, double step_size = 0.0);

private:
    void check_dimension(const FeatureVector& phi, const char* what) const;
    void apply(const FeatureVector& phi_s, std::span<const double> delta);

    std::size_t dim_;
    double gamma_;
    double alpha_;
    bool diverged_ = false;
    std::vector<double> m_;
    std::vector<double> scratch_;
};

}  // namespace srgvf

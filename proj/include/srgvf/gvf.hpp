#pragma once

#include "srgvf/features.hpp"
#include "srgvf/successor.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace srgvf {

/// Step size as a function of (time since run start, active feature count).
using StepSize = std::function<double(std::int64_t time, std::size_t active_features)>;

StepSize constant_step_size(double alpha);

/// One-step cumulant estimate c(phi) = phi^T w, trained on C_{t+1} - phi(S_t)^T w.
class CumulantWeights {
public:
    CumulantWeights(std::size_t dimension, StepSize step_size);

    std::size_t dimension() const { return w_.size(); }
    std::span<const double> weights() const { return w_; }
    std::span<double> weights() { return w_; }
    const StepSize& step_size() const { return step_; }

    double predict(const FeatureVector& phi) const { return dot(phi, w_); }
    /// delta = c - phi^T w;  w += alpha * phi * delta.
    double update(const FeatureVector& phi_s, double cumulant, double alpha);

    bool diverged() const { return diverged_; }
    void reset();

private:
    std::vector<double> w_;
    StepSize step_;
    bool diverged_ = false;
};

/// Baseline TD(0) estimate of the GVF itself, v(phi) = phi^T v.
class DirectWeights {
public:
    DirectWeights(std::size_t dimension, StepSize step_size);

    std::size_t dimension() const { return v_.size(); }
    std::span<const double> weights() const { return v_; }
    std::span<double> weights() { return v_; }
    const StepSize& step_size() const { return step_; }

    double predict(const FeatureVector& phi) const { return dot(phi, v_); }
    /// delta = c + gamma_next * phi(S')^T v - phi(S)^T v;  v += alpha * phi(S) * delta.
    /// Pass gamma_next = 0 on the terminating transition.
    double update(const FeatureVector& phi_s, const FeatureVector& phi_next, double cumulant, double gamma_next,
                  double alpha);

    bool diverged() const { return diverged_; }
    void reset();

private:
    std::vector<double> v_;
    StepSize step_;
    bool diverged_ = false;
};

/// phi^T M w, computed as (M^T phi) . w.
double sr_based_predict(const SuccessorMatrix& sr, const CumulantWeights& cw, const FeatureVector& phi);

struct PredictorSlot {
    std::size_t signal_id = 0;
    CumulantWeights cumulant;
    DirectWeights direct;
    std::int64_t activation_time = 0;
    bool active = false;

    PredictorSlot(std::size_t signal, std::size_t dimension, std::int64_t activation, StepSize cumulant_step,
                  StepSize direct_step);
};

/// One observed transition S -> S'. `cumulants` is indexed by signal id;
/// NaN marks a missing sample.
struct Transition {
    const FeatureVector& phi;
    const FeatureVector& phi_next;
    double gamma_next;
    bool terminal;
    std::span<const double> cumulants;
};

struct SlotErrors {
    double cumulant_td = 0.0;
    double direct_td = 0.0;
    bool updated = false;
};

/// Predictors sharing one successor matrix, activated over time.
class PredictorRegistry {
public:
    explicit PredictorRegistry(std::size_t dimension) : dim_(dimension) {}

    std::size_t dimension() const { return dim_; }

    PredictorSlot& add_slot(std::size_t signal_id, std::int64_t activation_time, StepSize cumulant_step,
                            StepSize direct_step);
    std::span<PredictorSlot> slots() { return slots_; }
    std::span<const PredictorSlot> slots() const { return slots_; }

    /// Activates slots whose activation_time <= time.
    void activate_due(std::int64_t time);

    /// Activates due slots, updates the SR once, then every active slot's
    /// cumulant and direct learners on the same sample; flushes the SR at
    /// the terminal state. `time` drives activation and step-size schedules.
    ///
    /// Throws std::runtime_error if an active slot lacks a cumulant and
    /// DivergenceError if any learner was already diverged.
    std::vector<SlotErrors> step(SuccessorMatrix& sr, const Transition& tr, std::int64_t time);

    bool any_diverged() const;

    /// Per-slot CSV: "# slot,signal_id=..,activation_time=..,d=.." then w and v rows.
    void save_csv(std::ostream& os) const;

private:
    std::size_t dim_;
    std::vector<PredictorSlot> slots_;
};

}  // namespace srgvf

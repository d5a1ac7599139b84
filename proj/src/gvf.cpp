#include "srgvf/gvf.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace srgvf {

namespace {

bool weights_ok(const FeatureVector& phi, std::span<const double> w)
{
    if (phi.is_sparse()) {
        for (auto i : phi.active())
            if (!(std::abs(w[i]) <= SuccessorMatrix::divergence_limit))
                return false;
        return true;
    }
    for (double x : w)
        if (!(std::abs(x) <= SuccessorMatrix::divergence_limit))
            return false;
    return true;
}

void check_alpha(double alpha)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("step size must be finite and >= 0");
}

}  // namespace

StepSize constant_step_size(double alpha)
{
    check_alpha(alpha);
    return [alpha](std::int64_t, std::size_t) { return alpha; };
}

CumulantWeights::CumulantWeights(std::size_t dimension, StepSize step_size)
    : w_(dimension, 0.0), step_(std::move(step_size))
{
}

double CumulantWeights::update(const FeatureVector& phi_s, double cumulant, double alpha)
{
    if (diverged_)
        throw DivergenceError("cumulant learner: update on a diverged learner");
    check_alpha(alpha);
    const double delta = cumulant - dot(phi_s, w_);
    if (!std::isfinite(delta)) {
        diverged_ = true;
        return delta;
    }
    add_scaled(phi_s, alpha * delta, w_);
    if (!weights_ok(phi_s, w_))
        diverged_ = true;
    return delta;
}

void CumulantWeights::reset()
{
    std::fill(w_.begin(), w_.end(), 0.0);
    diverged_ = false;
}

DirectWeights::DirectWeights(std::size_t dimension, StepSize step_size)
    : v_(dimension, 0.0), step_(std::move(step_size))
{
}

double DirectWeights::update(const FeatureVector& phi_s, const FeatureVector& phi_next, double cumulant,
                             double gamma_next, double alpha)
{
    if (diverged_)
        throw DivergenceError("direct learner: update on a diverged learner");
    check_alpha(alpha);
    const double next = gamma_next == 0.0 ? 0.0 : gamma_next * dot(phi_next, v_);
    const double delta = cumulant + next - dot(phi_s, v_);
    if (!std::isfinite(delta)) {
        diverged_ = true;
        return delta;
    }
    add_scaled(phi_s, alpha * delta, v_);
    if (!weights_ok(phi_s, v_))
        diverged_ = true;
    return delta;
}

void DirectWeights::reset()
{
    std::fill(v_.begin(), v_.end(), 0.0);
    diverged_ = false;
}

double sr_based_predict(const SuccessorMatrix& sr, const CumulantWeights& cw, const FeatureVector& phi)
{
    if (cw.dimension() != sr.dimension())
        throw std::invalid_argument("sr_based_predict: cumulant weights and SR dimensions differ");
    const auto psi = sr.predict(phi);
    const auto w = cw.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j)
        sum += psi[j] * w[j];
    return sum;
}

PredictorSlot::PredictorSlot(std::size_t signal, std::size_t dimension, std::int64_t activation,
                             StepSize cumulant_step, StepSize direct_step)
    : signal_id(signal),
      cumulant(dimension, std::move(cumulant_step)),
      direct(dimension, std::move(direct_step)),
      activation_time(activation)
{
}

PredictorSlot& PredictorRegistry::add_slot(std::size_t signal_id, std::int64_t activation_time,
                                           StepSize cumulant_step, StepSize direct_step)
{
    slots_.emplace_back(signal_id, dim_, activation_time, std::move(cumulant_step), std::move(direct_step));
    return slots_.back();
}

void PredictorRegistry::activate_due(std::int64_t time)
{
    for (auto& slot : slots_)
        if (!slot.active && slot.activation_time <= time)
            slot.active = true;
}

std::vector<SlotErrors> PredictorRegistry::step(SuccessorMatrix& sr, const Transition& tr, std::int64_t time)
{
    if (sr.dimension() != dim_)
        throw std::invalid_argument("registry: SR dimension mismatch");
    activate_due(time);

    for (const auto& slot : slots_) {
        if (!slot.active)
            continue;
        if (slot.signal_id >= tr.cumulants.size() || std::isnan(tr.cumulants[slot.signal_id]))
            throw std::runtime_error("registry: missing cumulant for active signal " +
                                     std::to_string(slot.signal_id) + " at time " + std::to_string(time));
    }

    sr.update(tr.phi, tr.phi_next, tr.gamma_next);

    const std::size_t active_features = tr.phi.active_count();
    const double direct_gamma = tr.terminal ? 0.0 : tr.gamma_next;
    std::vector<SlotErrors> errors(slots_.size());
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        auto& slot = slots_[k];
        if (!slot.active)
            continue;
        const double c = tr.cumulants[slot.signal_id];
        const double alpha_c = slot.cumulant.step_size()(time, active_features);
        const double alpha_d = slot.direct.step_size()(time, active_features);
        errors[k].cumulant_td = slot.cumulant.update(tr.phi, c, alpha_c);
        errors[k].direct_td = slot.direct.update(tr.phi, tr.phi_next, c, direct_gamma, alpha_d);
        errors[k].updated = true;
    }

    if (tr.terminal)
        sr.terminal_flush(tr.phi_next);
    return errors;
}

bool PredictorRegistry::any_diverged() const
{
    for (const auto& slot : slots_)
        if (slot.cumulant.diverged() || slot.direct.diverged())
            return true;
    return false;
}

void PredictorRegistry::save_csv(std::ostream& os) const
{
    os << std::setprecision(17);
    for (const auto& slot : slots_) {
        os << "# slot,signal_id=" << slot.signal_id << ",activation_time=" << slot.activation_time
           << ",d=" << dim_ << '\n';
        auto write_row = [&](const char* name, std::span<const double> values) {
            os << name;
            for (double x : values)
                os << ',' << x;
            os << '\n';
        };
        write_row("w", slot.cumulant.weights());
        write_row("v", slot.direct.weights());
    }
}

}  // namespace srgvf

#include "srgvf/successor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace srgvf {

namespace {

constexpr char binary_magic[8] = {'S', 'R', 'G', 'V', 'F', 'M', '1', '\0'};

}  // namespace

SuccessorMatrix::SuccessorMatrix(std::size_t dimension, double gamma, double step_size)
    : dim_(dimension), gamma_(gamma), alpha_(step_size), m_(dimension * dimension, 0.0), scratch_(dimension)
{
    if (dimension == 0)
        throw std::invalid_argument("successor matrix: dimension must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("successor matrix: gamma must lie in [0, 1]");
    set_step_size(step_size);
}

void SuccessorMatrix::set_step_size(double alpha)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("successor matrix: step size must be finite and >= 0");
    alpha_ = alpha;
}

void SuccessorMatrix::check_dimension(const FeatureVector& phi, const char* what) const
{
    if (phi.dimension() != dim_)
        throw std::invalid_argument(std::string("successor matrix: ") + what + " has dimension " +
                                    std::to_string(phi.dimension()) + ", expected " + std::to_string(dim_));
}

std::vector<double> SuccessorMatrix::predict(const FeatureVector& phi) const
{
    std::vector<double> out(dim_);
    predict_into(phi, out);
    return out;
}

void SuccessorMatrix::predict_into(const FeatureVector& phi, std::span<double> out) const
{
    check_dimension(phi, "phi");
    if (out.size() != dim_)
        throw std::invalid_argument("successor matrix: output buffer has wrong size");
    std::fill(out.begin(), out.end(), 0.0);
    if (phi.is_sparse()) {
        for (auto i : phi.active()) {
            const double* r = m_.data() + static_cast<std::size_t>(i) * dim_;
            for (std::size_t j = 0; j < dim_; ++j)
                out[j] += r[j];
        }
    } else {
        auto v = phi.values();
        for (std::size_t i = 0; i < dim_; ++i) {
            if (v[i] == 0.0)
                continue;
            const double* r = m_.data() + i * dim_;
            for (std::size_t j = 0; j < dim_; ++j)
                out[j] += v[i] * r[j];
        }
    }
}

void SuccessorMatrix::apply(const FeatureVector& phi_s, std::span<const double> delta)
{
    for (double d : delta) {
        if (!std::isfinite(d)) {
            diverged_ = true;
            return;
        }
    }
    auto update_row = [&](std::size_t i, double scale) {
        double* r = m_.data() + i * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            r[j] += scale * delta[j];
            if (!(std::abs(r[j]) <= divergence_limit))
                diverged_ = true;
        }
    };
    if (phi_s.is_sparse()) {
        for (auto i : phi_s.active())
            update_row(i, alpha_);
    } else {
        auto v = phi_s.values();
        for (std::size_t i = 0; i < dim_; ++i)
            if (v[i] != 0.0)
                update_row(i, alpha_ * v[i]);
    }
}

std::vector<double> SuccessorMatrix::update(const FeatureVector& phi_s, const FeatureVector& phi_next,
                                            double gamma_next)
{
    if (diverged_)
        throw DivergenceError("successor matrix: update on a diverged learner");
    check_dimension(phi_s, "phi(S)");
    check_dimension(phi_next, "phi(S')");
    if (!(gamma_next >= 0.0 && gamma_next <= 1.0))
        throw std::invalid_argument("successor matrix: gamma_next must lie in [0, 1]");

    std::vector<double> delta(dim_);
    predict_into(phi_next, scratch_);
    for (std::size_t j = 0; j < dim_; ++j)
        delta[j] = gamma_next * scratch_[j];
    predict_into(phi_s, scratch_);
    for (std::size_t j = 0; j < dim_; ++j)
        delta[j] -= scratch_[j];
    add_scaled(phi_s, 1.0, delta);

    apply(phi_s, delta);
    return delta;
}

std::vector<double> SuccessorMatrix::terminal_flush(const FeatureVector& phi_terminal)
{
    if (diverged_)
        throw DivergenceError("successor matrix: update on a diverged learner");
    check_dimension(phi_terminal, "phi(terminal)");

    std::vector<double> delta(dim_);
    predict_into(phi_terminal, scratch_);
    for (std::size_t j = 0; j < dim_; ++j)
        delta[j] = -scratch_[j];
    add_scaled(phi_terminal, 1.0, delta);

    apply(phi_terminal, delta);
    return delta;
}

void SuccessorMatrix::reset()
{
    std::fill(m_.begin(), m_.end(), 0.0);
    diverged_ = false;
}

void SuccessorMatrix::save_csv(std::ostream& os) const
{
    os << "# successor_matrix,d=" << dim_ << ",gamma=" << std::setprecision(17) << gamma_ << '\n';
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j)
                os << ',';
            os << m_[i * dim_ + j];
        }
        os << '\n';
    }
}

SuccessorMatrix SuccessorMatrix::load_csv(std::istream& is, double step_size)
{
    std::string header;
    if (!std::getline(is, header))
        throw std::runtime_error("successor snapshot: empty input");
    std::size_t d = 0;
    double gamma = 0.0;
    auto dpos = header.find("d=");
    auto gpos = header.find("gamma=");
    if (header.rfind("# successor_matrix", 0) != 0 || dpos == std::string::npos || gpos == std::string::npos)
        throw std::runtime_error("successor snapshot: malformed header");
    try {
        d = std::stoull(header.substr(dpos + 2));
        gamma = std::stod(header.substr(gpos + 6));
    } catch (const std::exception&) {
        throw std::runtime_error("successor snapshot: malformed header");
    }

    SuccessorMatrix sr(d, gamma, step_size);
    std::string line;
    for (std::size_t i = 0; i < d; ++i) {
        if (!std::getline(is, line))
            throw std::runtime_error("successor snapshot: expected " + std::to_string(d) + " rows");
        std::stringstream ss(line);
        std::string cell;
        std::size_t j = 0;
        while (std::getline(ss, cell, ',')) {
            if (j >= d)
                throw std::runtime_error("successor snapshot: row " + std::to_string(i) + " too long");
            sr.m_[i * d + j++] = std::stod(cell);
        }
        if (j != d)
            throw std::runtime_error("successor snapshot: row " + std::to_string(i) + " too short");
    }
    return sr;
}

void SuccessorMatrix::save_binary(std::ostream& os) const
{
    os.write(binary_magic, sizeof binary_magic);
    const std::uint64_t d = dim_;
    os.write(reinterpret_cast<const char*>(&d), sizeof d);
    os.write(reinterpret_cast<const char*>(&gamma_), sizeof gamma_);
    os.write(reinterpret_cast<const char*>(m_.data()), static_cast<std::streamsize>(m_.size() * sizeof(double)));
}

SuccessorMatrix SuccessorMatrix::load_binary(std::istream& is, double step_size)
{
    char magic[sizeof binary_magic];
    std::uint64_t d = 0;
    double gamma = 0.0;
    is.read(magic, sizeof magic);
    is.read(reinterpret_cast<char*>(&d), sizeof d);
    is.read(reinterpret_cast<char*>(&gamma), sizeof gamma);
    if (!is || std::memcmp(magic, binary_magic, sizeof magic) != 0)
        throw std::runtime_error("successor snapshot: bad binary header");
    SuccessorMatrix sr(static_cast<std::size_t>(d), gamma, step_size);
    is.read(reinterpret_cast<char*>(sr.m_.data()), static_cast<std::streamsize>(sr.m_.size() * sizeof(double)));
    if (!is)
        throw std::runtime_error("successor snapshot: truncated binary body");
    return sr;
}

}  // namespace srgvf

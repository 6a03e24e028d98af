#include "impsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "impsim/errors.hpp"
#include "impsim/quadrature.hpp"

namespace impsim {

namespace {

void require_positive_signal(const ApSignal& s, const char* name) {
    if (!s.strictly_positive())
        throw InvalidInput(fmt::format(
            "{} must be strictly positive: offset {} does not exceed the sum of |amplitudes| ({})",
            name, s.offset(), s.offset() - s.envelope_min()));
    for (const auto& m : s.modes())
        if (!std::isfinite(m.amplitude) || !std::isfinite(m.frequency) || !std::isfinite(m.phase))
            throw InvalidInput(fmt::format("{} has a non-finite mode", name));
}

}  // namespace

void ModelSpec::validate() const {
    require_positive_signal(alpha, "alpha");
    require_positive_signal(beta, "beta");
    require_positive_signal(gamma, "gamma");
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput(fmt::format("h must be positive, got {}", h));
    if (!(initial_xi > 0.0)) throw InvalidInput(fmt::format("initial xi must be positive, got {}", initial_xi));
    if (!(initial_psi(0.0) > 0.0))
        throw InvalidInput(fmt::format("psi(0) must be positive, got {}", initial_psi(0.0)));
    if (initial_psi.envelope_min() < 0.0) {
        // Grid check; exact nonnegativity of a trigonometric polynomial is not decided here.
        constexpr int kSamples = 10000;
        for (int i = 0; i <= kSamples; ++i) {
            const double theta = -h + h * static_cast<double>(i) / kSamples;
            if (initial_psi(theta) < 0.0)
                throw InvalidInput(fmt::format("psi({}) = {} is negative", theta, initial_psi(theta)));
        }
    }
}

double ModelSpec::maturation(double t) const {
    return alpha(t - h) * std::exp(-gamma.integral(t - h, t));
}

SigmaEstimate compute_sigma(const ImpulseSchedule& sched, std::span<const double> horizons) {
    if (horizons.size() < 3) throw InvalidInput("compute_sigma needs at least three horizons");
    for (std::size_t i = 0; i < horizons.size(); ++i)
        if (!(horizons[i] > 0.0) || (i > 0 && !(horizons[i] > horizons[i - 1])))
            throw InvalidInput("compute_sigma horizons must be positive and increasing");

    SigmaEstimate est;
    const auto impulses = sched.impulses_in(0.0, horizons.back());
    double sum = 0.0;
    std::size_t next = 0;
    for (double horizon : horizons) {
        for (; next < impulses.size() && impulses[next].time < horizon; ++next) {
            const double factor = 1.0 + impulses[next].magnitude;
            if (!(factor > 0.0))
                throw InvalidInput(fmt::format("1 + d_k = {} <= 0 at k = {}", factor, impulses[next].k));
            sum += std::log(factor);
        }
        est.partial_averages.push_back(sum / horizon);
    }
    const auto n = est.partial_averages.size();
    const auto last3 = std::span(est.partial_averages).subspan(n - 3);
    const auto [lo, hi] = std::minmax_element(last3.begin(), last3.end());
    est.sigma = est.partial_averages.back();
    est.residual = *hi - *lo;
    return est;
}

double omega(const ModelSpec& spec, const DerivedRates& rates, double t) {
    double log_product = 0.0;
    for (const auto& imp : spec.schedule.impulses_in(0.0, t)) log_product += std::log1p(imp.magnitude);
    return std::exp(log_product - rates.sigma * t);
}

double A_of_t(const ModelSpec& spec, const DerivedRates& rates, double t) {
    double log_product = 0.0;
    for (const auto& imp : spec.schedule.impulses_in(t - spec.h, t)) log_product += std::log1p(imp.magnitude);
    return spec.alpha(t - spec.h) *
           std::exp(rates.sigma * spec.h - spec.gamma.integral(t - spec.h, t) - log_product);
}

double C_of_t(const ModelSpec& spec, const DerivedRates& rates, double t) {
    return omega(spec, rates, t) * spec.beta(t);
}

CoefficientTable::CoefficientTable(const ModelSpec& spec, double sigma, double t_lo, double t_hi)
    : spec_(&spec), sigma_(sigma) {
    const double pad = spec.schedule.empty() ? 0.0 : spec.schedule.base_period();
    const double lo = std::min(t_lo, 0.0) - spec.h - pad;
    const double hi = std::max(t_hi, 0.0) + spec.h + pad;
    const auto impulses = spec.schedule.impulses_in(lo, hi);
    times_.reserve(impulses.size());
    prefix_.reserve(impulses.size() + 1);
    prefix_.push_back(0.0);
    for (const auto& imp : impulses) {
        times_.push_back(imp.time);
        prefix_.push_back(prefix_.back() + std::log1p(imp.magnitude));
    }
    origin_ = log_prefix(0.0);
}

double CoefficientTable::log_prefix(double x) const {
    const auto n = std::lower_bound(times_.begin(), times_.end(), x) - times_.begin();
    return prefix_[static_cast<std::size_t>(n)];
}

double CoefficientTable::omega_near(double t, double ref) const {
    return std::exp(log_prefix(ref) - origin_ - sigma_ * t);
}

double CoefficientTable::A_near(double t, double ref) const {
    const double h = spec_->h;
    const double log_product = log_prefix(ref) - log_prefix(ref - h);
    return spec_->alpha(t - h) * std::exp(sigma_ * h - spec_->gamma.integral(t - h, t) - log_product);
}

double CoefficientTable::C_near(double t, double ref) const {
    return omega_near(t, ref) * spec_->beta(t);
}

DerivedRates derive_rates(const ModelSpec& spec, const RateOptions& options) {
    spec.validate();
    DerivedRates r;
    if (!spec.schedule.empty()) {
        const auto est = compute_sigma(spec.schedule, options.sigma_horizons);
        r.sigma = est.sigma;
        r.sigma_residual = est.residual;
        if (r.sigma_residual > options.sigma_tol)
            throw NumericalFailure(fmt::format("sigma not converged: residual {} > tolerance {}",
                                               r.sigma_residual, options.sigma_tol));
    }
    const double horizon = options.scan_horizon > 0.0 ? options.scan_horizon : 1000.0 * spec.h;
    const double step = options.scan_step > 0.0 ? options.scan_step : spec.h / 100.0;
    const CoefficientTable table(spec, r.sigma, 0.0, horizon);
    r.A_bounds = estimate_bounds([&](double t) { return table.A(t); }, horizon, step);
    r.C_bounds = estimate_bounds([&](double t) { return table.C(t); }, horizon, step);

    const double AL = r.A_bounds.inf_estimate;
    const double AM = r.A_bounds.sup_estimate;
    const double CL = r.C_bounds.inf_estimate;
    const double CM = r.C_bounds.sup_estimate;
    r.m_bar = (AL + r.sigma) / CM;
    r.M_bar = (AM + r.sigma) / CL;
    r.cond16_margin = r.sigma + AM;
    // exponent sigma instead of sigma h multiplies A(t) by e^{sigma (1 - h)}
    r.cond16_literal_margin = r.sigma + std::exp(r.sigma * (1.0 - spec.h)) * AM;
    r.permanence_margin = AL + r.sigma;
    r.cond16 = r.cond16_margin > 0.0 && r.permanence_margin > 0.0;
    r.cond17_margin = 2.0 * CL * (AL + r.sigma) - (AM + r.sigma) * CM;
    r.cond17 = r.cond17_margin > 0.0;
    return r;
}

double consistent_initial_xi(const ModelSpec& spec) {
    const auto integrand = [&](double s) {
        return spec.alpha(s) * spec.initial_psi(s) * std::exp(-spec.gamma.integral(s, 0.0));
    };
    return gauss_legendre5(integrand, -spec.h, 0.0, 64);
}

void write_report(std::ostream& os, const DerivedRates& r) {
    fmt::print(os, "sigma = {:.12g}\n", r.sigma);
    fmt::print(os, "sigma_residual = {:.6g}\n", r.sigma_residual);
    fmt::print(os, "A_L = {:.12g}\n", r.A_bounds.inf_estimate);
    fmt::print(os, "A_M = {:.12g}\n", r.A_bounds.sup_estimate);
    fmt::print(os, "C_L = {:.12g}\n", r.C_bounds.inf_estimate);
    fmt::print(os, "C_M = {:.12g}\n", r.C_bounds.sup_estimate);
    fmt::print(os, "scan_horizon = {:.12g}\n", r.A_bounds.scan_horizon);
    fmt::print(os, "scan_step = {:.12g}\n", r.A_bounds.scan_step);
    fmt::print(os, "m_bar = {:.12g}\n", r.m_bar);
    fmt::print(os, "M_bar = {:.12g}\n", r.M_bar);
    fmt::print(os, "cond16_margin = {:.12g}\n", r.cond16_margin);
    fmt::print(os, "cond16_literal_margin = {:.12g}\n", r.cond16_literal_margin);
    fmt::print(os, "permanence_margin = {:.12g}\n", r.permanence_margin);
    fmt::print(os, "cond16 = {}\n", r.cond16);
    fmt::print(os, "cond17_margin = {:.12g}\n", r.cond17_margin);
    fmt::print(os, "cond17 = {}\n", r.cond17);
}

}  // namespace impsim

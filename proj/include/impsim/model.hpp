#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "impsim/ap_scan.hpp"
#include "impsim/ap_signal.hpp"
#include "impsim/impulse_schedule.hpp"

namespace impsim {

/**
 * @brief Stage-structured single-species model with maturation delay h.
 *
 *   x_i' = alpha(t) x_m(t) - gamma(t) x_i(t) - alpha(t-h) e^{-int_{t-h}^t gamma} x_m(t-h)
 *   x_m' = alpha(t-h) e^{-int_{t-h}^t gamma} x_m(t-h) - beta(t) x_m(t)^2
 *   x_m(t_k + 0) = (1 + d_k) x_m(t_k)
 *
 * with x_i(0) = initial_xi and x_m = initial_psi on [-h, 0].
 */
struct ModelSpec {
    ApSignal alpha{1.0};
    ApSignal beta{1.0};
    ApSignal gamma{1.0};
    double h{1.0};
    ImpulseSchedule schedule{};
    double initial_xi{1.0};
    ApSignal initial_psi{1.0};

    /// Throws InvalidInput naming the violated invariant.
    void validate() const;

    /// alpha(t - h) exp(-int_{t-h}^t gamma): survival-weighted maturation rate.
    [[nodiscard]] double maturation(double t) const;
};

struct SigmaEstimate {
    double sigma{0};
    double residual{0};
    std::vector<double> partial_averages;
};

/// Partial averages (1/T) sum_{0 <= t_k < T} ln(1 + d_k) at each horizon.
/// sigma is the last one; residual is the spread of the last three.
SigmaEstimate compute_sigma(const ImpulseSchedule& sched, std::span<const double> horizons);

struct DerivedRates {
    double sigma{0};
    double sigma_residual{0};
    SignalBounds A_bounds{};
    SignalBounds C_bounds{};
    double m_bar{0};  // (A^L + sigma) / C^M
    double M_bar{0};  // (A^M + sigma) / C^L
    /// sigma + sup A, with the sigma h exponent of A(t).
    double cond16_margin{0};
    /// sigma + sup of the same expression with exponent sigma instead of sigma h.
    double cond16_literal_margin{0};
    /// A^L + sigma; positivity of the lower comparison equilibrium.
    double permanence_margin{0};
    bool cond16{false};
    /// 2 C^L (A^L + sigma) - (A^M + sigma) C^M
    double cond17_margin{0};
    bool cond17{false};
};

/// prod_{0 <= t_k < t} (1 + d_k) e^{-sigma t}
double omega(const ModelSpec& spec, const DerivedRates& rates, double t);
/// prod_{t-h <= t_k < t} (1 + d_k)^{-1} alpha(t-h) exp(sigma h - int_{t-h}^t gamma)
double A_of_t(const ModelSpec& spec, const DerivedRates& rates, double t);
/// omega(t) beta(t)
double C_of_t(const ModelSpec& spec, const DerivedRates& rates, double t);

/**
 * @brief Prefix sums of ln(1 + d_k) for fast, side-aware omega/A/C lookups.
 *
 * omega is extended to negative times by omega(t) = prod_{t <= t_k < 0}
 * (1 + d_k)^{-1} e^{-sigma t}, so that omega(t - h) / omega(t) reproduces the
 * impulse product of A(t) for every t >= 0.
 *
 * The `_near` variants count impulses as if evaluated at ref rather than t;
 * the integrator passes a step midpoint so that both endpoints of a step see
 * the branch that is valid inside it.
 */
class CoefficientTable {
  public:
    CoefficientTable(const ModelSpec& spec, double sigma, double t_lo, double t_hi);

    /// sum of ln(1 + d_k) over t_k < x, relative to the table origin.
    [[nodiscard]] double log_prefix(double x) const;

    [[nodiscard]] double omega(double t) const { return omega_near(t, t); }
    [[nodiscard]] double A(double t) const { return A_near(t, t); }
    [[nodiscard]] double C(double t) const { return C_near(t, t); }

    [[nodiscard]] double omega_near(double t, double ref) const;
    [[nodiscard]] double A_near(double t, double ref) const;
    [[nodiscard]] double C_near(double t, double ref) const;

  private:
    const ModelSpec* spec_;
    double sigma_;
    std::vector<double> times_;
    std::vector<double> prefix_;  // prefix_[i] = sum of the first i log factors
    double origin_;               // log_prefix(0)
};

struct RateOptions {
    double scan_horizon{0};  // 0: 1000 h
    double scan_step{0};     // 0: h / 100
    std::vector<double> sigma_horizons{1e3, 1e4, 1e5};
    double sigma_tol{1e-3};
};

/// Throws NumericalFailure("sigma not converged") when the residual exceeds
/// sigma_tol.
DerivedRates derive_rates(const ModelSpec& spec, const RateOptions& options = {});

/// int_{-h}^0 alpha(s) psi(s) e^{-int_s^0 gamma} ds, the immature density
/// consistent with the mature history.
double consistent_initial_xi(const ModelSpec& spec);

/// Flat `key = value` report.
void write_report(std::ostream& os, const DerivedRates& rates);

}  // namespace impsim

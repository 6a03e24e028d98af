#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "impsim/integrator.hpp"
#include "impsim/model.hpp"
#include "impsim/trajectory.hpp"

namespace impsim {

/// liminf / limsup surrogates: min and max over the tail window of the run.
struct PermanenceReport {
    double liminf_xm{0};
    double limsup_xm{0};
    double liminf_xi{0};
    double limsup_xi{0};
    double liminf_v{0};
    double limsup_v{0};
    double m_bar{0};
    double M_bar{0};
    double tol{0};
    Window tail_window{};
    /// Largest violation of v_L <= v <= v_M on the step grid (0 when it holds).
    double sandwich_violation{0};
    bool applicable{false};  // cond16; pass is false by fiat otherwise
    bool pass{false};
};

/**
 * @brief Tail min / max of x_m, x_i and v = x_m / omega.
 *
 * Passes iff v stays within [m_bar - tol, M_bar + tol] on the last
 * tail_fraction of [0, t_end], with tol = 1e-2 (M_bar - m_bar + 1). The x_i
 * range is reported only; it is checked for positivity and finiteness.
 */
PermanenceReport check_permanence(const ModelSpec& spec, const DerivedRates& rates,
                                  const IntegratorConfig& cfg, double tail_fraction = 0.25);

/**
 * @brief Max relative error between x_i and the delay integral of x_m.
 *
 * x_i(0) is replaced by the value consistent with the mature history, so the
 * identity is exact rather than asymptotic. At 50 equispaced t in [h, t_end]
 * the integral of alpha(s) x_m(s) e^{-int_s^t gamma} over [t - h, t] is
 * computed with five-point Gauss-Legendre on every knot interval of the dense
 * output (so panels split at impulses) and compared with the integrated x_i.
 */
double check_integral_identity(const ModelSpec& spec, const IntegratorConfig& cfg);

struct AttractivityReport {
    bool applicable{false};  // cond16 and cond17
    int pairs{0};
    std::vector<std::pair<double, double>> initial_levels;
    std::vector<double> tail_gaps;  // per pair, max over the last 10 h
    double max_terminal_gap{0};
    /// (t, max over pairs of the state gap) on the jump-avoiding grid.
    std::vector<std::pair<double, double>> decay_curve;
    bool eventually_decreasing{false};
    bool pass{false};
};

struct AttractivityOptions {
    int n_pairs{8};
    std::uint64_t seed{42};
    double tail_gap_tol{1e-4};
};

/**
 * @brief Integrates pairs of constant histories drawn log-uniformly from
 * [m_bar / 4, 4 M_bar] and checks that their gap dies out.
 *
 * The gap is the max-norm difference of the full states sampled every h / 10,
 * skipping samples within dt of an impulse. It counts as eventually
 * decreasing when the maxima over consecutive 10 h blocks of the last quarter
 * are non-increasing.
 */
AttractivityReport check_attractivity(const ModelSpec& spec, const DerivedRates& rates,
                                      const IntegratorConfig& cfg,
                                      const AttractivityOptions& options = {});

struct LinearizedCondition {
    double lhs{0};  // A^M
    double rhs{0};  // inf over the window of C(t)(x(t) + y(t)) - sigma
    bool holds{false};
};

/// Evaluates A^M < inf_t C(t)(x(t) + y(t)) - sigma for two v-scale
/// trajectories on a grid of step h / 100 over the window.
LinearizedCondition check_linearized_condition(const ModelSpec& spec, const DerivedRates& rates,
                                               const Trajectory& x, const Trajectory& y,
                                               Window window);

struct ApDetectionReport {
    double eps{0};
    std::vector<double> almost_periods_found;
    double max_gap_between_periods{0};
    bool asymptotic_pass{false};
};

/// Candidates tau accepted by w_distance(traj(. + tau), traj, eps, window).
ApDetectionReport detect_almost_periods(const Trajectory& traj, double eps, Window window,
                                        const std::vector<double>& tau_candidates,
                                        double sample_step = 0.0);
/// Candidates j * scan_step up to half the window length.
ApDetectionReport detect_almost_periods(const Trajectory& traj, double eps, Window window,
                                        double scan_step);

struct AsymptoticReport {
    bool applicable{false};
    std::vector<double> shifts;
    std::vector<double> distances;  // rho_bound between consecutive shifted windows
    Window window{};
    double eps_target{1e-3};
    bool pass{false};
};

struct AsymptoticOptions {
    std::vector<double> shifts;  // empty: 10 shifts spaced 50 h from t_end / 2
    double window_length{0};     // 0: 10 h
    double eps_target{1e-3};
    double slack{1e-6};
};

/**
 * @brief Cauchy-style surrogate for convergence of x_m(. + tau_k).
 *
 * Integrates the full model once, reads it through each shift on the common
 * window [0, window_length] and passes iff the W-distance bounds between
 * consecutive shifts are non-increasing (within slack) and the last is below
 * eps_target.
 */
AsymptoticReport check_asymptotic_ap(const ModelSpec& spec, const DerivedRates& rates,
                                     const IntegratorConfig& cfg,
                                     const AsymptoticOptions& options = {});

void write_report(std::ostream& os, const PermanenceReport& r);
void write_report(std::ostream& os, const AttractivityReport& r);
void write_report(std::ostream& os, const ApDetectionReport& r);
void write_report(std::ostream& os, const AsymptoticReport& r);
/// `t,gap` rows of the attractivity decay curve.
void write_decay_csv(std::ostream& os, const AttractivityReport& r);

}  // namespace impsim

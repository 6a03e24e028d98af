#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "impsim/impulse_schedule.hpp"

namespace impsim {

/// Grid estimates of inf_t g(t) and sup_t g(t).
///
/// These are one-sided: inf_estimate >= the true infimum and
/// sup_estimate <= the true supremum.
struct SignalBounds {
    double inf_estimate{0};
    double sup_estimate{0};
    double scan_horizon{0};
    double scan_step{0};
};

/// Min / max of f over {0, step, 2 step, ..., horizon}. Throws
/// NumericalFailure naming t on the first non-finite sample.
SignalBounds estimate_bounds(const std::function<double(double)>& f, double horizon, double step);

/// Integers q in [1, q_max] that are common eps-almost periods of every
/// difference sequence t_{k+j} - t_k, tested for |k|, |j| <= k_window.
std::vector<std::int64_t> find_sequence_almost_periods(const ImpulseSchedule& sched, double eps,
                                                       std::int64_t k_window, std::int64_t q_max);

/// Integers q in [1, q_max] with |v(k + q) - v(k)| < eps for |k| <= k_window.
std::vector<std::int64_t> check_ap_sequence(const std::function<double(std::int64_t)>& values,
                                            double eps, std::int64_t k_window, std::int64_t q_max);

/// Largest distance between consecutive entries; 0 for fewer than two.
double max_gap(std::span<const std::int64_t> sorted);
double max_gap(std::span<const double> sorted);

}  // namespace impsim

#include "impsim/ap_scan.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "impsim/errors.hpp"

namespace impsim {

SignalBounds estimate_bounds(const std::function<double(double)>& f, double horizon, double step) {
    if (!(horizon > 0.0) || !(step > 0.0))
        throw InvalidInput(fmt::format("estimate_bounds needs horizon > 0 and step > 0 (got {}, {})",
                                       horizon, step));
    // i * step, never accumulated: halving step then yields a superset grid.
    const auto n = static_cast<std::int64_t>(std::floor(horizon / step * (1.0 + 1e-12)));
    SignalBounds b{f(0.0), f(0.0), horizon, step};
    for (std::int64_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * step;
        const double v = f(t);
        if (!std::isfinite(v))
            throw NumericalFailure(fmt::format("non-finite sample {} at t = {}", v, t), t);
        b.inf_estimate = std::min(b.inf_estimate, v);
        b.sup_estimate = std::max(b.sup_estimate, v);
    }
    return b;
}

std::vector<std::int64_t> find_sequence_almost_periods(const ImpulseSchedule& sched, double eps,
                                                       std::int64_t k_window, std::int64_t q_max) {
    if (!(eps > 0.0) || k_window < 0 || q_max < 1)
        throw InvalidInput("find_sequence_almost_periods needs eps > 0 and positive windows");
    // The k T parts cancel exactly in t_{k+j+q} - t_{k+q} - (t_{k+j} - t_k),
    // so only the jitter enters; a jitter-free schedule gives exact zeros.
    std::vector<std::int64_t> out;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        bool ok = true;
        for (std::int64_t k = -k_window; ok && k <= k_window; ++k) {
            const double shift = sched.jitter(k + q) - sched.jitter(k);
            for (std::int64_t j = -k_window; j <= k_window; ++j) {
                const double d = sched.jitter(k + j + q) - sched.jitter(k + j) - shift;
                if (!(std::abs(d) < eps)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) out.push_back(q);
    }
    return out;
}

std::vector<std::int64_t> check_ap_sequence(const std::function<double(std::int64_t)>& values,
                                            double eps, std::int64_t k_window, std::int64_t q_max) {
    if (!(eps > 0.0) || k_window < 0 || q_max < 1)
        throw InvalidInput("check_ap_sequence needs eps > 0 and positive windows");
    std::vector<double> cache;
    cache.reserve(static_cast<std::size_t>(2 * k_window + q_max + 1));
    for (std::int64_t k = -k_window; k <= k_window + q_max; ++k) cache.push_back(values(k));
    const auto at = [&](std::int64_t k) { return cache[static_cast<std::size_t>(k + k_window)]; };

    std::vector<std::int64_t> out;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        bool ok = true;
        for (std::int64_t k = -k_window; k <= k_window; ++k) {
            if (!(std::abs(at(k + q) - at(k)) < eps)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(q);
    }
    return out;
}

template <typename T>
static double max_gap_impl(std::span<const T> sorted) {
    double gap = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        gap = std::max(gap, static_cast<double>(sorted[i] - sorted[i - 1]));
    return gap;
}

double max_gap(std::span<const std::int64_t> sorted) { return max_gap_impl(sorted); }
double max_gap(std::span<const double> sorted) { return max_gap_impl(sorted); }

}  // namespace impsim

#pragma once

#include <cmath>
#include <numbers>

#include "impsim/model.hpp"

namespace impsim::testing {

inline const double kEquilibrium = 2.0 * std::exp(-0.1);  // alpha e^{-gamma h} / beta

/// alpha = 1, beta = 0.5, gamma = 0.1, h = 1, no impulses, psi = 1.8.
inline ModelSpec constant_spec(double psi = 1.8) {
    ModelSpec s;
    s.alpha = ApSignal::constant(1.0);
    s.beta = ApSignal::constant(0.5);
    s.gamma = ApSignal::constant(0.1);
    s.h = 1.0;
    s.initial_psi = ApSignal::constant(psi);
    s.initial_xi = consistent_initial_xi(s);
    return s;
}

/// Constant coefficients with t_k = k and d_k = 0.2 + 0.1 sin(2 pi k / 5).
inline ModelSpec five_periodic_spec() {
    ModelSpec s = constant_spec();
    s.schedule = ImpulseSchedule(1.0, {}, 0.2, {0.1, 2.0 * std::numbers::pi / 5.0, 0.0});
    return s;
}

/// Time-varying coefficients with jittered impulses; satisfies both conditions.
inline ModelSpec varying_spec() {
    ModelSpec s;
    s.alpha = ApSignal(1.0, {{0.1, 1.0, 0.0}});
    s.beta = ApSignal(0.5, {{0.05, std::numbers::sqrt2, 0.3}});
    s.gamma = ApSignal(0.1, {{0.02, 0.5, 0.0}});
    s.h = 1.0;
    s.schedule = ImpulseSchedule(1.0, {0.1, 1.0, 0.0}, 0.05, {0.02, 0.7, 0.0});
    s.initial_psi = ApSignal(1.5, {{0.2, 3.0, 0.0}});
    s.initial_xi = consistent_initial_xi(s);
    return s;
}

/// Fast rate options for unit tests.
inline RateOptions quick_rates() {
    RateOptions o;
    o.scan_horizon = 200.0;
    o.sigma_horizons = {1e3, 1e4, 1e5};
    return o;
}

}  // namespace impsim::testing

#include "impsim/impulse_schedule.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "impsim/errors.hpp"

namespace impsim {

double IndexSinusoid::operator()(std::int64_t k) const {
    if (amplitude == 0.0) return 0.0;
    return amplitude * std::sin(frequency * static_cast<double>(k) + phase);
}

ImpulseSchedule::ImpulseSchedule(double base_period, IndexSinusoid time_jitter,
                                 double magnitude_base, IndexSinusoid magnitude_variation)
    : active_(true),
      base_period_(base_period),
      jitter_(time_jitter),
      magnitude_base_(magnitude_base),
      variation_(magnitude_variation) {
    if (!(base_period > 0.0) || !std::isfinite(base_period))
        throw InvalidInput(fmt::format("base_period must be positive, got {}", base_period));
    if (!(2.0 * std::abs(jitter_.amplitude) < base_period))
        throw InvalidInput(fmt::format(
            "time jitter amplitude {} too large: need 2|amplitude| < base_period = {}",
            jitter_.amplitude, base_period));
    if (!(magnitude_base - std::abs(variation_.amplitude) > -1.0))
        throw InvalidInput(fmt::format(
            "impulse magnitudes reach {} <= -1; need base - |amplitude| > -1",
            magnitude_base - std::abs(variation_.amplitude)));
}

double ImpulseSchedule::time(std::int64_t k) const {
    return static_cast<double>(k) * base_period_ + jitter_(k);
}

double ImpulseSchedule::magnitude(std::int64_t k) const {
    return magnitude_base_ + variation_(k);
}

double ImpulseSchedule::min_gap() const {
    if (!active_) return std::numeric_limits<double>::infinity();
    return base_period_ - 2.0 * std::abs(jitter_.amplitude);
}

std::vector<Impulse> ImpulseSchedule::impulses_in(double t0, double t1) const {
    std::vector<Impulse> out;
    if (!active_ || !(t0 < t1)) return out;
    // |t_k - kT| <= |a| < T/2, so the candidates lie one index beyond these.
    const double a = std::abs(jitter_.amplitude);
    const auto k_lo = static_cast<std::int64_t>(std::floor((t0 - a) / base_period_)) - 1;
    const auto k_hi = static_cast<std::int64_t>(std::ceil((t1 + a) / base_period_)) + 1;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double tk = time(k);
        if (tk >= t0 && tk < t1) out.push_back({k, tk, magnitude(k)});
    }
    return out;
}

}  // namespace impsim

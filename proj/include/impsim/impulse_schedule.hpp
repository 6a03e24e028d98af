#pragma once

#include <cstdint>
#include <vector>

namespace impsim {

/// amplitude * sin(frequency * k + phase), evaluated on the integer index k.
struct IndexSinusoid {
    double amplitude{0};
    double frequency{0};
    double phase{0};

    [[nodiscard]] double operator()(std::int64_t k) const;
};

struct Impulse {
    std::int64_t k{0};
    double time{0};       // t_k
    double magnitude{0};  // d_k
};

/**
 * @brief Impulse moments t_k = k T + J(k) and magnitudes d_k = b + D(k).
 *
 * J and D are single sinusoids in k, so the difference sequences
 * t_{k+j} - t_k are almost periodic in k and {d_k} is almost periodic.
 * Construction rejects schedules with non-increasing moments
 * (2|J| >= T) or with 1 + d_k <= 0.
 *
 * A default-constructed schedule has no impulses at all.
 */
class ImpulseSchedule {
  public:
    ImpulseSchedule() = default;
    ImpulseSchedule(double base_period, IndexSinusoid time_jitter, double magnitude_base,
                    IndexSinusoid magnitude_variation);

    static ImpulseSchedule none() { return {}; }
    static ImpulseSchedule periodic(double base_period, double magnitude) {
        return {base_period, {}, magnitude, {}};
    }

    [[nodiscard]] bool empty() const noexcept { return !active_; }
    [[nodiscard]] double base_period() const noexcept { return base_period_; }
    [[nodiscard]] const IndexSinusoid& time_jitter() const noexcept { return jitter_; }
    [[nodiscard]] double magnitude_base() const noexcept { return magnitude_base_; }
    [[nodiscard]] const IndexSinusoid& magnitude_variation() const noexcept { return variation_; }

    [[nodiscard]] double time(std::int64_t k) const;
    [[nodiscard]] double magnitude(std::int64_t k) const;
    /// t_k - k T.
    [[nodiscard]] double jitter(std::int64_t k) const { return jitter_(k); }

    /// Guaranteed lower bound on t_{k+1} - t_k; +inf for an empty schedule.
    [[nodiscard]] double min_gap() const;

    /// All impulses with t0 <= t_k < t1, ordered by time.
    [[nodiscard]] std::vector<Impulse> impulses_in(double t0, double t1) const;

  private:
    bool active_{false};
    double base_period_{1};
    IndexSinusoid jitter_{};
    double magnitude_base_{0};
    IndexSinusoid variation_{};
};

}  // namespace impsim

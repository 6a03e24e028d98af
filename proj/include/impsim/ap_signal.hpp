#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace impsim {

/// One cosine term a cos(w t + phi) of a trigonometric polynomial.
template <typename Scalar>
struct BasicMode {
    Scalar amplitude{0};
    Scalar frequency{0};  // rad / time
    Scalar phase{0};      // rad
};

/**
 * @brief Almost-periodic scalar signal a0 + sum_i a_i cos(w_i t + phi_i).
 *
 * Finite trigonometric polynomials are almost periodic, evaluable in closed
 * form, and have closed-form antiderivatives, which the model uses for the
 * survival exponent of the immature stage.
 */
template <typename Scalar>
class BasicApSignal {
  public:
    using Mode = BasicMode<Scalar>;

    BasicApSignal() = default;
    explicit BasicApSignal(Scalar offset, std::vector<Mode> modes = {})
        : offset_(offset), modes_(std::move(modes)) {}

    static BasicApSignal constant(Scalar value) { return BasicApSignal(value); }

    [[nodiscard]] Scalar offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<Mode>& modes() const noexcept { return modes_; }

    [[nodiscard]] Scalar operator()(Scalar t) const {
        Scalar value = offset_;
        for (const auto& m : modes_) value += m.amplitude * std::cos(m.frequency * t + m.phase);
        return value;
    }

    [[nodiscard]] Scalar derivative(Scalar t) const {
        Scalar value{0};
        for (const auto& m : modes_)
            value -= m.amplitude * m.frequency * std::sin(m.frequency * t + m.phase);
        return value;
    }

    /// Exact integral over [t0, t1].
    [[nodiscard]] Scalar integral(Scalar t0, Scalar t1) const {
        const Scalar width = t1 - t0;
        Scalar value = offset_ * width;
        for (const auto& m : modes_) {
            if (m.frequency == Scalar(0)) {
                value += m.amplitude * std::cos(m.phase) * width;
                continue;
            }
            // sin(B) - sin(A) = 2 cos((A+B)/2) sin((B-A)/2); stable for small w
            const Scalar mid = m.frequency * (t0 + t1) / Scalar(2) + m.phase;
            value += m.amplitude * Scalar(2) * std::cos(mid) *
                     std::sin(m.frequency * width / Scalar(2)) / m.frequency;
        }
        return value;
    }

    /// offset - sum |a_i|: a lower bound valid for every t.
    [[nodiscard]] Scalar envelope_min() const {
        Scalar value = offset_;
        for (const auto& m : modes_) value -= std::abs(m.amplitude);
        return value;
    }

    [[nodiscard]] Scalar envelope_max() const {
        Scalar value = offset_;
        for (const auto& m : modes_) value += std::abs(m.amplitude);
        return value;
    }

    [[nodiscard]] bool strictly_positive() const { return envelope_min() > Scalar(0); }

  private:
    Scalar offset_{0};
    std::vector<Mode> modes_;
};

using Mode = BasicMode<double>;
using ApSignal = BasicApSignal<double>;

}  // namespace impsim

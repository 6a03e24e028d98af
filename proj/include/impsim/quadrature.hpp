#pragma once

#include <array>
#include <cstddef>

namespace impsim {

/// Five-point Gauss-Legendre rule on [a, b], exact for polynomials of degree 9.
template <typename F>
double gauss_legendre5(F&& f, double a, double b) {
    static constexpr std::array<double, 5> kNodes{
        0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> kWeights{
        0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
        0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) sum += kWeights[i] * f(mid + half * kNodes[i]);
    return sum * half;
}

/// Composite five-point rule with equal panels.
template <typename F>
double gauss_legendre5(F&& f, double a, double b, std::size_t panels) {
    const double width = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + static_cast<double>(p) * width;
        const double hi = p + 1 == panels ? b : lo + width;
        sum += gauss_legendre5(f, lo, hi);
    }
    return sum;
}

}  // namespace impsim

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace impsim {

/// Input that violates a model or configuration invariant.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-finite state, lost positivity,
/// non-converged limit). Carries the time at which it was detected when known.
class NumericalFailure : public std::runtime_error {
  public:
    explicit NumericalFailure(const std::string& what, double blame_time = std::nan(""))
        : std::runtime_error(what), blame_time_(blame_time) {}

    [[nodiscard]] double blame_time() const noexcept { return blame_time_; }

  private:
    double blame_time_;
};

}  // namespace impsim

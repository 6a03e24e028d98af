#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "impsim/model.hpp"
#include "impsim/trajectory.hpp"

namespace impsim {

/// Which right-hand side to integrate.
enum class RhsKind {
    full_model,         // (x_i, x_m) with jumps of x_m
    transformed_v,      // v = x_m / omega, impulse-free
    comparison_L,       // v_L' = A^L v_L(t-h) + sigma v_L - C^M v_L^2
    comparison_M,       // v_M' = A^M v_M(t-h) + sigma v_M - C^L v_M^2
    startup,            // x_m with delayed term always read from psi
    logistic_minorant,  // u' = -beta u^2 with jumps, u(0) = psi(0)
};

std::string_view to_string(RhsKind kind);
std::optional<RhsKind> parse_rhs_kind(std::string_view name);

/// Dimension of the state for a given right-hand side.
Eigen::Index state_dimension(RhsKind kind);
/// Index of the component that is delayed and that jumps.
Eigen::Index mature_component(RhsKind kind);
/// Whether the impulses act on this right-hand side.
bool has_jumps(RhsKind kind);

struct IntegratorConfig {
    double dt{0.01};
    double t_end{0};
    RhsKind rhs{RhsKind::full_model};
};

/// Initial data: a history on [-h, 0] and x_i(0). A mature-scale history psi
/// is divided by omega when it seeds the transformed or comparison equations;
/// a transformed-scale history is used as given and only seeds those.
struct InitialData {
    std::function<double(double)> psi;
    double xi0{0};
    bool transformed_scale{false};

    static InitialData from_spec(const ModelSpec& spec);
    /// Constant mature history with the consistent x_i(0).
    static InitialData constant(const ModelSpec& spec, double level);
    /// History for v, v_L, v_M given directly.
    static InitialData transformed(std::function<double(double)> v_history);
};

/// Returns N = h / dt; throws InvalidInput unless N is a positive integer and
/// dt is smaller than the minimum impulse gap.
int steps_per_delay(const ModelSpec& spec, const IntegratorConfig& cfg);

/**
 * @brief Delayed lookups x(t - h) during integration.
 *
 * Reads the initial function for t - h < 0 and the dense output of the
 * trajectory under construction otherwise. ref selects the branch at jumps.
 */
class HistoryBuffer {
  public:
    HistoryBuffer(const Trajectory& front, std::function<double(double, double)> initial, double h,
                  Eigen::Index component)
        : front_(&front), initial_(std::move(initial)), h_(h), component_(component) {}

    [[nodiscard]] double delayed(double t, double ref) const;

  private:
    const Trajectory* front_;
    std::function<double(double, double)> initial_;
    double h_;
    Eigen::Index component_;
};

/// Classic fixed-step RK4 by the method of steps. Every impulse time and
/// every t_k + j h (j <= 4) is an exact step boundary.
Trajectory integrate(const ModelSpec& spec, const DerivedRates& rates, const IntegratorConfig& cfg);
Trajectory integrate(const ModelSpec& spec, const DerivedRates& rates, const IntegratorConfig& cfg,
                     const InitialData& init);

/// Multiplies the mature component by 1 + d_k; identity for impulse-free kinds.
Eigen::VectorXd jump_apply(RhsKind kind, const Eigen::VectorXd& state, double d_k);

struct ComparisonPair {
    Trajectory lower;  // v_L
    Trajectory upper;  // v_M
};

/// v_L and v_M from the same initial function psi / omega.
ComparisonPair solve_comparison_pair(const ModelSpec& spec, const DerivedRates& rates,
                                     const IntegratorConfig& cfg, const InitialData& init);

}  // namespace impsim

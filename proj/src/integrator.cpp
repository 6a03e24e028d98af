#include "impsim/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <fmt/core.h>

#include "impsim/errors.hpp"
#include "impsim/quadrature.hpp"

namespace impsim {

namespace {

constexpr std::array<std::pair<RhsKind, std::string_view>, 6> kNames{{
    {RhsKind::full_model, "full_model"},
    {RhsKind::transformed_v, "transformed_v"},
    {RhsKind::comparison_L, "comparison_L"},
    {RhsKind::comparison_M, "comparison_M"},
    {RhsKind::startup, "startup"},
    {RhsKind::logistic_minorant, "logistic_minorant"},
}};

constexpr int kBreakpointOrders = 4;
constexpr double kPositivityFloor = -1e-12;

bool on_v_scale(RhsKind kind) {
    return kind == RhsKind::transformed_v || kind == RhsKind::comparison_L ||
           kind == RhsKind::comparison_M;
}

struct Node {
    double t;
    std::optional<double> jump;  // d_k when an impulse acts here
};

/// Grid n dt merged with the breakpoints; breakpoints within a tiny fraction
/// of dt replace the grid time so no degenerate sub-steps appear.
std::vector<Node> build_nodes(const ModelSpec& spec, const IntegratorConfig& cfg) {
    const double dt = cfg.dt;
    const double t_end = cfg.t_end;
    std::vector<double> grid;
    const auto n_steps = static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
    for (std::int64_t n = 0; n < n_steps; ++n) grid.push_back(static_cast<double>(n) * dt);
    grid.push_back(t_end);

    std::map<double, std::optional<double>> extra;
    const double snap = 1e-6 * dt;
    const auto place = [&](double b, std::optional<double> d) {
        if (!(b > 0.0 && b < t_end)) return;
        const auto n = static_cast<std::int64_t>(std::llround(b / dt));
        if (n >= 1 && n < n_steps && std::abs(grid[static_cast<std::size_t>(n)] - b) <= snap) {
            grid[static_cast<std::size_t>(n)] = b;
        }
        auto& slot = extra[b];
        if (d) slot = d;
    };
    for (const auto& imp : spec.schedule.impulses_in(-kBreakpointOrders * spec.h, t_end)) {
        for (int j = 0; j <= kBreakpointOrders; ++j) {
            const bool acts = j == 0 && has_jumps(cfg.rhs) && imp.time >= 0.0;
            place(imp.time + j * spec.h, acts ? std::optional<double>(imp.magnitude) : std::nullopt);
        }
    }

    std::vector<Node> nodes;
    nodes.reserve(grid.size() + extra.size());
    for (double t : grid) nodes.push_back({t, std::nullopt});
    for (const auto& [t, d] : extra) nodes.push_back({t, d});
    std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.t < b.t; });
    // merge duplicates, keeping any jump
    std::vector<Node> merged;
    merged.reserve(nodes.size());
    for (const auto& node : nodes) {
        if (!merged.empty() && merged.back().t == node.t) {
            if (node.jump) merged.back().jump = node.jump;
            continue;
        }
        merged.push_back(node);
    }
    // an impulse exactly at t = 0 acts before the first step
    if (has_jumps(cfg.rhs))
        for (const auto& imp : spec.schedule.impulses_in(0.0, t_end))
            if (imp.time == 0.0) merged.front().jump = imp.magnitude;
    return merged;
}

}  // namespace

std::string_view to_string(RhsKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<RhsKind> parse_rhs_kind(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    return std::nullopt;
}

Eigen::Index state_dimension(RhsKind kind) { return kind == RhsKind::full_model ? 2 : 1; }

Eigen::Index mature_component(RhsKind kind) { return kind == RhsKind::full_model ? 1 : 0; }

bool has_jumps(RhsKind kind) {
    return kind == RhsKind::full_model || kind == RhsKind::startup ||
           kind == RhsKind::logistic_minorant;
}

InitialData InitialData::from_spec(const ModelSpec& spec) {
    return {[psi = spec.initial_psi](double t) { return psi(t); }, spec.initial_xi};
}

InitialData InitialData::constant(const ModelSpec& spec, double level) {
    ModelSpec flat = spec;
    flat.initial_psi = ApSignal::constant(level);
    return {[level](double) { return level; }, consistent_initial_xi(flat)};
}

InitialData InitialData::transformed(std::function<double(double)> v_history) {
    return {std::move(v_history), 0.0, true};
}

int steps_per_delay(const ModelSpec& spec, const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw InvalidInput(fmt::format("dt must be positive, got {}", cfg.dt));
    if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end))
        throw InvalidInput(fmt::format("t_end must be nonnegative, got {}", cfg.t_end));
    const double ratio = spec.h / cfg.dt;
    const auto n = std::llround(ratio);
    if (n < 1 || std::abs(static_cast<double>(n) * cfg.dt - spec.h) > 1e-9 * spec.h)
        throw InvalidInput(fmt::format("dt = {} does not divide h = {} into an integer number of steps",
                                       cfg.dt, spec.h));
    if (!(cfg.dt < spec.schedule.min_gap()))
        throw InvalidInput(fmt::format("dt = {} is not below the minimum impulse gap {}", cfg.dt,
                                       spec.schedule.min_gap()));
    return static_cast<int>(n);
}

double HistoryBuffer::delayed(double t, double ref) const {
    const double s = t - h_;
    const double side = ref - h_;
    if (side < 0.0 || front_->empty()) return initial_(s, side);
    return front_->eval_near(s, side, component_);
}

Eigen::VectorXd jump_apply(RhsKind kind, const Eigen::VectorXd& state, double d_k) {
    Eigen::VectorXd out = state;
    if (has_jumps(kind)) out[mature_component(kind)] *= 1.0 + d_k;
    return out;
}

Trajectory integrate(const ModelSpec& spec, const DerivedRates& rates, const IntegratorConfig& cfg) {
    return integrate(spec, rates, cfg, InitialData::from_spec(spec));
}

Trajectory integrate(const ModelSpec& spec, const DerivedRates& rates, const IntegratorConfig& cfg,
                     const InitialData& init) {
    spec.validate();
    steps_per_delay(spec, cfg);
    const RhsKind kind = cfg.rhs;
    const Eigen::Index dim = state_dimension(kind);
    const Eigen::Index mc = mature_component(kind);
    const double h = spec.h;
    const double sigma = rates.sigma;
    const CoefficientTable table(spec, sigma, -h, cfg.t_end);

    if (init.transformed_scale && !on_v_scale(kind))
        throw InvalidInput(fmt::format("a transformed-scale history cannot seed {}", to_string(kind)));
    std::function<double(double, double)> initial;
    if (on_v_scale(kind) && !init.transformed_scale)
        initial = [&](double s, double side) { return init.psi(s) / table.omega_near(s, side); };
    else
        initial = [&](double s, double) { return init.psi(s); };

    TrajectoryBuilder builder(dim);
    const HistoryBuffer history(builder.current(), initial, h, mc);

    const double AL = rates.A_bounds.inf_estimate;
    const double AM = rates.A_bounds.sup_estimate;
    const double CL = rates.C_bounds.inf_estimate;
    const double CM = rates.C_bounds.sup_estimate;

    const auto rhs = [&](double t, double ref, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd dx(dim);
        switch (kind) {
            case RhsKind::full_model: {
                const double inflow = spec.maturation(t) * history.delayed(t, ref);
                dx[0] = spec.alpha(t) * x[1] - spec.gamma(t) * x[0] - inflow;
                dx[1] = inflow - spec.beta(t) * x[1] * x[1];
                break;
            }
            case RhsKind::startup:
                dx[0] = spec.maturation(t) * init.psi(t - h) - spec.beta(t) * x[0] * x[0];
                break;
            case RhsKind::logistic_minorant:
                dx[0] = -spec.beta(t) * x[0] * x[0];
                break;
            case RhsKind::transformed_v:
                dx[0] = table.A_near(t, ref) * history.delayed(t, ref) + sigma * x[0] -
                        table.C_near(t, ref) * x[0] * x[0];
                break;
            case RhsKind::comparison_L:
                dx[0] = AL * history.delayed(t, ref) + sigma * x[0] - CM * x[0] * x[0];
                break;
            case RhsKind::comparison_M:
                dx[0] = AM * history.delayed(t, ref) + sigma * x[0] - CL * x[0] * x[0];
                break;
        }
        return dx;
    };

    Eigen::VectorXd x(dim);
    x[mc] = init.psi(0.0);
    if (kind == RhsKind::full_model) x[0] = init.xi0;

    const auto nodes = build_nodes(spec, cfg);
    const auto check = [&](const Eigen::VectorXd& state, double t) {
        if (!state.allFinite())
            throw NumericalFailure(fmt::format("state became non-finite at t = {}", t), t);
        if (state[mc] < kPositivityFloor)
            throw NumericalFailure(
                fmt::format("positivity violated at t = {}: x = {}", t, state[mc]), t);
    };

    builder.push(nodes.front().t, x, Eigen::VectorXd::Zero(dim));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double a = nodes[i].t;
        if (nodes[i].jump) {
            x = jump_apply(kind, x, *nodes[i].jump);
            builder.jump(a, x, Eigen::VectorXd::Zero(dim));
        }
        if (i + 1 == nodes.size()) break;
        const double b = nodes[i + 1].t;
        const double dt = b - a;
        const double ref = 0.5 * (a + b);
        const Eigen::VectorXd k1 = rhs(a, ref, x);
        builder.set_right_slope(k1);
        const Eigen::VectorXd k2 = rhs(ref, ref, x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(ref, ref, x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(b, ref, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check(x, b);
        builder.push(b, x, rhs(b, ref, x));
    }
    return std::move(builder).finish();
}

ComparisonPair solve_comparison_pair(const ModelSpec& spec, const DerivedRates& rates,
                                     const IntegratorConfig& cfg, const InitialData& init) {
    IntegratorConfig lower = cfg;
    lower.rhs = RhsKind::comparison_L;
    IntegratorConfig upper = cfg;
    upper.rhs = RhsKind::comparison_M;
    return {integrate(spec, rates, lower, init), integrate(spec, rates, upper, init)};
}

}  // namespace impsim

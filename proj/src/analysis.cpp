#include "impsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "impsim/ap_scan.hpp"
#include "impsim/errors.hpp"
#include "impsim/quadrature.hpp"

namespace impsim {

namespace {

constexpr double kBlockLength = 10.0;  // in units of h
constexpr double kMonotoneSlack = 1e-10;

struct Range {
    double lo{std::numeric_limits<double>::infinity()};
    double hi{-std::numeric_limits<double>::infinity()};
};

/// Min and max over the knots inside the window; both limits at a jump count.
Range knot_range(const Trajectory& tr, Eigen::Index c, Window w) {
    Range r;
    const auto d = static_cast<std::size_t>(tr.dimension());
    for (const auto& seg : tr.segments()) {
        if (seg.t1() < w.t0 || seg.t0() > w.t1) continue;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            if (seg.times[i] < w.t0 || seg.times[i] > w.t1) continue;
            const double x = seg.values[i * d + static_cast<std::size_t>(c)];
            r.lo = std::min(r.lo, x);
            r.hi = std::max(r.hi, x);
        }
    }
    return r;
}

IntegratorConfig with_rhs(IntegratorConfig cfg, RhsKind kind) {
    cfg.rhs = kind;
    return cfg;
}

bool near_any(const std::vector<double>& sorted, double t, double guard) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), t - guard);
    return it != sorted.end() && *it <= t + guard;
}

std::string join(const std::vector<double>& xs) {
    return fmt::format("{:.12g}", fmt::join(xs, ","));
}

}  // namespace

PermanenceReport check_permanence(const ModelSpec& spec, const DerivedRates& rates,
                                  const IntegratorConfig& cfg, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw InvalidInput(fmt::format("tail_fraction must lie in (0, 1], got {}", tail_fraction));
    if (!(cfg.t_end > 0.0)) throw InvalidInput("permanence needs t_end > 0");
    PermanenceReport rep;
    rep.applicable = rates.cond16;
    rep.m_bar = rates.m_bar;
    rep.M_bar = rates.M_bar;
    rep.tol = 1e-2 * (rates.M_bar - rates.m_bar + 1.0);
    rep.tail_window = {cfg.t_end * (1.0 - tail_fraction), cfg.t_end};

    const auto x = integrate(spec, rates, with_rhs(cfg, RhsKind::full_model));
    const auto v = integrate(spec, rates, with_rhs(cfg, RhsKind::transformed_v));
    const auto pair = solve_comparison_pair(spec, rates, cfg, InitialData::from_spec(spec));

    const auto xm = knot_range(x, 1, rep.tail_window);
    const auto xi = knot_range(x, 0, rep.tail_window);
    const auto vr = knot_range(v, 0, rep.tail_window);
    rep.liminf_xm = xm.lo;
    rep.limsup_xm = xm.hi;
    rep.liminf_xi = xi.lo;
    rep.limsup_xi = xi.hi;
    rep.liminf_v = vr.lo;
    rep.limsup_v = vr.hi;

    const auto n = static_cast<std::int64_t>(std::llround(cfg.t_end / cfg.dt));
    for (std::int64_t i = 0; i <= n; ++i) {
        const double t = std::min(static_cast<double>(i) * cfg.dt, cfg.t_end);
        const double vv = v.eval(t, 0);
        rep.sandwich_violation = std::max({rep.sandwich_violation, pair.lower.eval(t, 0) - vv,
                                           vv - pair.upper.eval(t, 0)});
    }

    const bool xi_ok = std::isfinite(xi.hi) && xi.lo > 0.0;
    rep.pass = rep.applicable && xi_ok && rep.liminf_v >= rep.m_bar - rep.tol &&
               rep.limsup_v <= rep.M_bar + rep.tol;
    return rep;
}

double check_integral_identity(const ModelSpec& spec, const IntegratorConfig& cfg) {
    if (!(cfg.t_end >= spec.h))
        throw InvalidInput(fmt::format("integral identity needs t_end >= h = {}, got {}", spec.h,
                                       cfg.t_end));
    ModelSpec consistent = spec;
    consistent.initial_xi = consistent_initial_xi(spec);
    const auto x = integrate(consistent, DerivedRates{}, with_rhs(cfg, RhsKind::full_model));

    constexpr int kSamples = 50;
    double worst = 0.0;
    for (int j = 0; j < kSamples; ++j) {
        const double t = spec.h + (cfg.t_end - spec.h) * j / (kSamples - 1);
        std::vector<double> nodes{t - spec.h};
        const auto knots = x.knot_times_in(t - spec.h, t);
        nodes.insert(nodes.end(), knots.begin(), knots.end());
        nodes.push_back(t);
        double quad = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double a = nodes[i];
            const double b = nodes[i + 1];
            if (!(b > a)) continue;
            const double ref = 0.5 * (a + b);
            quad += gauss_legendre5(
                [&](double s) {
                    return spec.alpha(s) * x.eval_near(s, ref, 1) *
                           std::exp(-spec.gamma.integral(s, t));
                },
                a, b);
        }
        const double xi = x.eval(t, 0);
        worst = std::max(worst, std::abs(xi - quad) / (1.0 + std::abs(xi)));
    }
    return worst;
}

AttractivityReport check_attractivity(const ModelSpec& spec, const DerivedRates& rates,
                                      const IntegratorConfig& cfg,
                                      const AttractivityOptions& options) {
    if (options.n_pairs < 1)
        throw InvalidInput(fmt::format("n_pairs must be positive, got {}", options.n_pairs));
    AttractivityReport rep;
    rep.applicable = rates.cond16 && rates.cond17;
    if (!rep.applicable) return rep;
    if (!(cfg.t_end > 0.0)) throw InvalidInput("attractivity needs t_end > 0");

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> log_level(std::log(rates.m_bar / 4.0),
                                                     std::log(4.0 * rates.M_bar));
    const auto full = with_rhs(cfg, RhsKind::full_model);
    const double step = spec.h / 10.0;
    const auto n = static_cast<std::int64_t>(std::floor(cfg.t_end / step * (1.0 + 1e-12)));
    const auto jumps = spec.schedule.impulses_in(0.0, cfg.t_end + step);
    std::vector<double> jump_times;
    for (const auto& imp : jumps) jump_times.push_back(imp.time);

    std::vector<double> grid;
    for (std::int64_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * step;
        if (!near_any(jump_times, t, cfg.dt)) grid.push_back(t);
    }
    std::vector<double> curve(grid.size(), 0.0);
    const double tail_start = cfg.t_end - kBlockLength * spec.h;
    const double quarter = 0.75 * cfg.t_end;
    const double block = kBlockLength * spec.h;

    rep.pairs = options.n_pairs;
    rep.eventually_decreasing = true;
    for (int p = 0; p < options.n_pairs; ++p) {
        const double a = std::exp(log_level(rng));
        const double b = std::exp(log_level(rng));
        rep.initial_levels.emplace_back(a, b);
        const auto ta = integrate(spec, rates, full, InitialData::constant(spec, a));
        const auto tb = integrate(spec, rates, full, InitialData::constant(spec, b));
        double tail = 0.0;
        std::vector<double> blocks;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid[i];
            const double gap = (ta.eval(t) - tb.eval(t)).cwiseAbs().maxCoeff();
            curve[i] = std::max(curve[i], gap);
            if (t >= tail_start) tail = std::max(tail, gap);
            if (t >= quarter) {
                const auto idx = static_cast<std::size_t>((t - quarter) / block);
                if (idx >= blocks.size()) blocks.resize(idx + 1, 0.0);
                blocks[idx] = std::max(blocks[idx], gap);
            }
        }
        for (std::size_t k = 1; k < blocks.size(); ++k)
            if (blocks[k] > blocks[k - 1] + kMonotoneSlack) rep.eventually_decreasing = false;
        rep.tail_gaps.push_back(tail);
        rep.max_terminal_gap = std::max(rep.max_terminal_gap, tail);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) rep.decay_curve.emplace_back(grid[i], curve[i]);
    rep.pass = rep.eventually_decreasing && rep.max_terminal_gap < options.tail_gap_tol;
    return rep;
}

LinearizedCondition check_linearized_condition(const ModelSpec& spec, const DerivedRates& rates,
                                               const Trajectory& x, const Trajectory& y,
                                               Window window) {
    const CoefficientTable table(spec, rates.sigma, std::min(-spec.h, window.t0), window.t1);
    const double step = spec.h / 100.0;
    const auto n = static_cast<std::int64_t>(std::floor((window.t1 - window.t0) / step * (1.0 + 1e-12)));
    LinearizedCondition out;
    out.lhs = rates.A_bounds.sup_estimate;
    out.rhs = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i <= n; ++i) {
        const double t = std::min(window.t0 + static_cast<double>(i) * step, window.t1);
        out.rhs = std::min(out.rhs, table.C(t) * (x.eval(t, 0) + y.eval(t, 0)) - rates.sigma);
    }
    out.holds = out.lhs < out.rhs;
    return out;
}

ApDetectionReport detect_almost_periods(const Trajectory& traj, double eps, Window window,
                                        const std::vector<double>& tau_candidates,
                                        double sample_step) {
    ApDetectionReport rep;
    rep.eps = eps;
    std::vector<double> taus(tau_candidates);
    std::sort(taus.begin(), taus.end());
    for (double tau : taus)
        if (w_distance(TrajectoryView(traj, tau), TrajectoryView(traj), eps, window, sample_step))
            rep.almost_periods_found.push_back(tau);
    rep.max_gap_between_periods = max_gap(std::span<const double>(rep.almost_periods_found));
    rep.asymptotic_pass = !rep.almost_periods_found.empty();
    return rep;
}

ApDetectionReport detect_almost_periods(const Trajectory& traj, double eps, Window window,
                                        double scan_step) {
    if (!(scan_step > 0.0)) throw InvalidInput("scan_step must be positive");
    std::vector<double> taus;
    const double limit = 0.5 * (window.t1 - window.t0);
    const auto n = static_cast<std::int64_t>(std::floor(limit / scan_step * (1.0 + 1e-12)));
    for (std::int64_t j = 1; j <= n; ++j) taus.push_back(static_cast<double>(j) * scan_step);
    return detect_almost_periods(traj, eps, window, taus);
}

AsymptoticReport check_asymptotic_ap(const ModelSpec& spec, const DerivedRates& rates,
                                     const IntegratorConfig& cfg,
                                     const AsymptoticOptions& options) {
    AsymptoticReport rep;
    rep.applicable = rates.cond16 && rates.cond17;
    rep.eps_target = options.eps_target;
    const double length = options.window_length > 0.0 ? options.window_length : 10.0 * spec.h;
    rep.window = {0.0, length};
    rep.shifts = options.shifts;
    if (rep.shifts.empty())
        for (int k = 0; k < 10; ++k) rep.shifts.push_back(0.5 * cfg.t_end + 50.0 * spec.h * k);
    if (rep.shifts.size() < 2) throw InvalidInput("asymptotic check needs at least two shifts");
    for (std::size_t k = 1; k < rep.shifts.size(); ++k)
        if (!(rep.shifts[k] > rep.shifts[k - 1])) throw InvalidInput("shifts must be increasing");
    const double needed = rep.shifts.back() + length;
    if (cfg.t_end < needed)
        throw InvalidInput(fmt::format("insufficient coverage: shifts need t_end >= {}, got {}",
                                       needed, cfg.t_end));
    if (!rep.applicable) return rep;

    const auto x = integrate(spec, rates, with_rhs(cfg, RhsKind::full_model));
    for (std::size_t k = 0; k + 1 < rep.shifts.size(); ++k)
        rep.distances.push_back(rho_bound(TrajectoryView(x, rep.shifts[k]),
                                          TrajectoryView(x, rep.shifts[k + 1]), rep.window));
    bool monotone = true;
    for (std::size_t k = 1; k < rep.distances.size(); ++k)
        monotone = monotone && rep.distances[k] <= rep.distances[k - 1] + options.slack;
    rep.pass = monotone && rep.distances.back() < rep.eps_target;
    return rep;
}

namespace {

void print_gate(std::ostream& os, bool applicable) {
    fmt::print(os, "applicable = {}\n", applicable);
    if (!applicable) fmt::print(os, "status = not applicable, hypothesis not satisfied (informational only)\n");
}

}  // namespace

void write_report(std::ostream& os, const PermanenceReport& r) {
    print_gate(os, r.applicable);
    fmt::print(os, "tail_t0 = {:.12g}\ntail_t1 = {:.12g}\n", r.tail_window.t0, r.tail_window.t1);
    fmt::print(os, "liminf_v = {:.12g}\nlimsup_v = {:.12g}\n", r.liminf_v, r.limsup_v);
    fmt::print(os, "liminf_xm = {:.12g}\nlimsup_xm = {:.12g}\n", r.liminf_xm, r.limsup_xm);
    fmt::print(os, "liminf_xi = {:.12g}\nlimsup_xi = {:.12g}\n", r.liminf_xi, r.limsup_xi);
    fmt::print(os, "m_bar = {:.12g}\nM_bar = {:.12g}\ntol = {:.12g}\n", r.m_bar, r.M_bar, r.tol);
    fmt::print(os, "sandwich_violation = {:.6g}\n", r.sandwich_violation);
    fmt::print(os, "xi_shared_bounds = unverified\n");
    fmt::print(os, "pass = {}\n", r.pass);
}

void write_report(std::ostream& os, const AttractivityReport& r) {
    print_gate(os, r.applicable);
    if (!r.applicable) return;
    fmt::print(os, "pairs = {}\n", r.pairs);
    for (std::size_t p = 0; p < r.tail_gaps.size(); ++p)
        fmt::print(os, "pair_{} = {:.12g},{:.12g},{:.6g}\n", p, r.initial_levels[p].first,
                   r.initial_levels[p].second, r.tail_gaps[p]);
    fmt::print(os, "max_terminal_gap = {:.6g}\n", r.max_terminal_gap);
    fmt::print(os, "eventually_decreasing = {}\n", r.eventually_decreasing);
    fmt::print(os, "pass = {}\n", r.pass);
}

void write_report(std::ostream& os, const ApDetectionReport& r) {
    fmt::print(os, "eps = {:.6g}\n", r.eps);
    fmt::print(os, "count = {}\n", r.almost_periods_found.size());
    fmt::print(os, "almost_periods = {}\n", join(r.almost_periods_found));
    fmt::print(os, "max_gap_between_periods = {:.12g}\n", r.max_gap_between_periods);
    fmt::print(os, "pass = {}\n", r.asymptotic_pass);
}

void write_report(std::ostream& os, const AsymptoticReport& r) {
    print_gate(os, r.applicable);
    fmt::print(os, "window_length = {:.12g}\n", r.window.t1 - r.window.t0);
    fmt::print(os, "shifts = {}\n", join(r.shifts));
    if (!r.applicable) return;
    fmt::print(os, "distances = {}\n", join(r.distances));
    fmt::print(os, "eps_target = {:.6g}\n", r.eps_target);
    fmt::print(os, "pass = {}\n", r.pass);
}

void write_decay_csv(std::ostream& os, const AttractivityReport& r) {
    fmt::print(os, "t,gap\n");
    for (const auto& [t, g] : r.decay_curve) fmt::print(os, "{:.17g},{:.17g}\n", t, g);
}

}  // namespace impsim

#include "impsim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/core.h>
#include <fmt/format.h>

#include "impsim/errors.hpp"

namespace impsim {

double Trajectory::t_start() const {
    if (segments_.empty()) throw InvalidInput("empty trajectory");
    return segments_.front().t0();
}

double Trajectory::t_end() const {
    if (segments_.empty()) throw InvalidInput("empty trajectory");
    return segments_.back().t1();
}

std::size_t Trajectory::knot_count() const {
    std::size_t n = 0;
    for (const auto& s : segments_) n += s.size();
    return n;
}

void Trajectory::check_domain(double t) const {
    if (!(t >= t_start() && t <= t_end()))
        throw InvalidInput(
            fmt::format("t = {} outside trajectory domain [{}, {}]", t, t_start(), t_end()));
}

std::size_t Trajectory::segment_left_of(double t) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const Segment& s, double v) { return s.t1() < v; });
    if (it == segments_.end()) --it;
    return static_cast<std::size_t>(it - segments_.begin());
}

std::size_t Trajectory::segment_right_of(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.t0(); });
    if (it != segments_.begin()) --it;
    return static_cast<std::size_t>(it - segments_.begin());
}

std::size_t Trajectory::segment_near(double ref) const { return segment_left_of(ref); }

double Trajectory::hermite(const Segment& seg, double t, Eigen::Index c) const {
    const std::size_t n = seg.size();
    const auto d = static_cast<std::size_t>(dim_);
    const auto ci = static_cast<std::size_t>(c);
    if (n == 1) return seg.values[ci];
    auto it = std::upper_bound(seg.times.begin(), seg.times.end(), t);
    std::size_t i = it == seg.times.begin() ? 0 : static_cast<std::size_t>(it - seg.times.begin()) - 1;
    i = std::min(i, n - 2);
    const double t0 = seg.times[i];
    const double h = seg.times[i + 1] - t0;
    const double s = (t - t0) / h;
    const double y0 = seg.values[i * d + ci];
    const double y1 = seg.values[(i + 1) * d + ci];
    if (s == 0.0) return y0;
    if (s == 1.0) return y1;
    const double m0 = seg.slope_right[i * d + ci];
    const double m1 = seg.slope_left[(i + 1) * d + ci];
    const double u = 1.0 - s;
    // written around y0 so that constant data is reproduced bit-exactly
    return y0 + s * s * (3.0 - 2.0 * s) * (y1 - y0) + h * s * u * (u * m0 - s * m1);
}

Eigen::VectorXd Trajectory::eval(double t) const {
    check_domain(t);
    const auto& seg = segments_[segment_left_of(t)];
    Eigen::VectorXd x(dim_);
    for (Eigen::Index c = 0; c < dim_; ++c) x[c] = hermite(seg, t, c);
    return x;
}

double Trajectory::eval(double t, Eigen::Index component) const {
    check_domain(t);
    return hermite(segments_[segment_left_of(t)], t, component);
}

Eigen::VectorXd Trajectory::eval_right(double t) const {
    check_domain(t);
    const auto& seg = segments_[segment_right_of(t)];
    Eigen::VectorXd x(dim_);
    for (Eigen::Index c = 0; c < dim_; ++c) x[c] = hermite(seg, t, c);
    return x;
}

double Trajectory::eval_near(double t, double ref, Eigen::Index component) const {
    return hermite(segments_[segment_near(ref)], t, component);
}

std::vector<double> Trajectory::knot_times_in(double t0, double t1) const {
    std::vector<double> out;
    for (const auto& seg : segments_) {
        if (seg.t1() < t0 || seg.t0() > t1) continue;
        auto lo = std::lower_bound(seg.times.begin(), seg.times.end(), t0);
        auto hi = std::upper_bound(seg.times.begin(), seg.times.end(), t1);
        out.insert(out.end(), lo, hi);
    }
    return out;
}

std::vector<double> Trajectory::jump_times_in(double t0, double t1) const {
    std::vector<double> out;
    for (const auto& j : jumps_)
        if (j.time >= t0 && j.time <= t1) out.push_back(j.time);
    return out;
}

void Trajectory::write_csv(std::ostream& os) const {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "t");
    for (Eigen::Index c = 0; c < dim_; ++c) fmt::format_to(std::back_inserter(buf), ",x_{}", c + 1);
    fmt::format_to(std::back_inserter(buf), ",is_jump\n");
    const auto d = static_cast<std::size_t>(dim_);
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const auto& seg = segments_[s];
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const bool at_jump = (i == 0 && s > 0) || (i + 1 == seg.size() && s + 1 < segments_.size());
            fmt::format_to(std::back_inserter(buf), "{:.17g}", seg.times[i]);
            for (std::size_t c = 0; c < d; ++c)
                fmt::format_to(std::back_inserter(buf), ",{:.17g}", seg.values[i * d + c]);
            fmt::format_to(std::back_inserter(buf), ",{}\n", at_jump ? 1 : 0);
        }
        if (buf.size() > (1u << 20)) {
            os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void TrajectoryBuilder::push(double t, const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& slope_left) {
    auto& segs = traj_.segments_;
    if (segs.empty()) segs.emplace_back();
    auto& seg = segs.back();
    if (!seg.times.empty() && !(t > seg.times.back()))
        throw InvalidInput(fmt::format("knot time {} does not increase past {}", t, seg.times.back()));
    seg.times.push_back(t);
    seg.values.insert(seg.values.end(), x.begin(), x.end());
    seg.slope_left.insert(seg.slope_left.end(), slope_left.begin(), slope_left.end());
    seg.slope_right.insert(seg.slope_right.end(), slope_left.begin(), slope_left.end());
}

void TrajectoryBuilder::set_right_slope(const Eigen::Ref<const Eigen::VectorXd>& slope) {
    auto& seg = traj_.segments_.back();
    std::copy(slope.begin(), slope.end(), seg.slope_right.end() - traj_.dim_);
}

void TrajectoryBuilder::jump(double t, const Eigen::Ref<const Eigen::VectorXd>& right,
                             const Eigen::Ref<const Eigen::VectorXd>& slope) {
    auto& segs = traj_.segments_;
    if (segs.empty() || segs.back().times.back() != t)
        throw InvalidInput(fmt::format("jump at {} does not close the open segment", t));
    const auto d = static_cast<std::size_t>(traj_.dim_);
    const auto& last = segs.back();
    Eigen::VectorXd left =
        Eigen::Map<const Eigen::VectorXd>(last.values.data() + (last.size() - 1) * d, traj_.dim_);
    traj_.jumps_.push_back({t, left, right});
    segs.emplace_back();
    auto& seg = segs.back();
    seg.times.push_back(t);
    seg.values.assign(right.begin(), right.end());
    seg.slope_left.assign(slope.begin(), slope.end());
    seg.slope_right.assign(slope.begin(), slope.end());
}

namespace {

double clamp_into(const Trajectory& tr, double t) {
    const double lo = tr.t_start();
    const double hi = tr.t_end();
    const double slack = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (t < lo - slack || t > hi + slack)
        throw InvalidInput(
            fmt::format("insufficient coverage: t = {} outside [{}, {}]", t, lo, hi));
    return std::clamp(t, lo, hi);
}

double auto_step(const Trajectory& tr) {
    const auto n = tr.knot_count();
    const double span = tr.t_end() - tr.t_start();
    if (n < 2 || span <= 0.0) return std::numeric_limits<double>::infinity();
    return span / static_cast<double>(n - 1) / 10.0;
}

std::vector<double> shifted_jumps(TrajectoryView v, Window w) {
    // a jump at the right end does not affect values on the window
    auto times = v.traj->jump_times_in(w.t0 + v.shift, w.t1 + v.shift);
    if (!times.empty() && times.back() >= w.t1 + v.shift) times.pop_back();
    for (auto& t : times) t -= v.shift;
    return times;
}

}  // namespace

bool w_distance(TrajectoryView a, TrajectoryView b, double eps, Window w, double sample_step) {
    if (a.traj->dimension() != b.traj->dimension())
        throw InvalidInput(fmt::format("dimension mismatch: {} vs {}", a.traj->dimension(),
                                       b.traj->dimension()));
    if (!(eps > 0.0)) throw InvalidInput("w_distance needs eps > 0");
    if (!(w.t1 >= w.t0)) throw InvalidInput("w_distance needs t0 <= t1");
    clamp_into(*a.traj, w.t0 + a.shift);
    clamp_into(*a.traj, w.t1 + a.shift);
    clamp_into(*b.traj, w.t0 + b.shift);
    clamp_into(*b.traj, w.t1 + b.shift);

    const auto ja = shifted_jumps(a, w);
    const auto jb = shifted_jumps(b, w);
    if (ja.size() != jb.size()) return false;
    for (std::size_t i = 0; i < ja.size(); ++i)
        if (!(std::abs(ja[i] - jb[i]) < eps)) return false;

    std::vector<double> excluded(ja);
    excluded.insert(excluded.end(), jb.begin(), jb.end());
    std::sort(excluded.begin(), excluded.end());

    double step = sample_step > 0.0 ? sample_step : std::min(auto_step(*a.traj), auto_step(*b.traj));
    if (!std::isfinite(step)) step = std::max(w.t1 - w.t0, 1.0);
    const auto n = static_cast<std::int64_t>(std::floor((w.t1 - w.t0) / step * (1.0 + 1e-12)));
    const Eigen::Index dim = a.traj->dimension();
    for (std::int64_t i = 0; i <= n; ++i) {
        const double t = w.t0 + static_cast<double>(i) * step;
        auto it = std::lower_bound(excluded.begin(), excluded.end(), t - eps);
        if (it != excluded.end() && *it <= t + eps) continue;
        const double ta = clamp_into(*a.traj, t + a.shift);
        const double tb = clamp_into(*b.traj, t + b.shift);
        for (Eigen::Index c = 0; c < dim; ++c)
            if (!(std::abs(a.traj->eval(ta, c) - b.traj->eval(tb, c)) < eps)) return false;
    }
    return true;
}

double rho_bound(TrajectoryView a, TrajectoryView b, Window w, double sample_step) {
    constexpr double kTolerance = 1e-6;
    if (shifted_jumps(a, w).size() != shifted_jumps(b, w).size())
        return std::numeric_limits<double>::infinity();
    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (!w_distance(a, b, hi, w, sample_step)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > kTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (w_distance(a, b, mid, w, sample_step))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace impsim

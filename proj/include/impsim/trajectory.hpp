#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace impsim {

struct Window {
    double t0{0};
    double t1{0};
};

/**
 * @brief Piecewise-continuous solution with explicit jumps and cubic Hermite
 * dense output.
 *
 * Segments tile [t_start, t_end]; consecutive segments meet exactly at a jump
 * time, where the earlier segment holds the left limit and the later one the
 * right limit. The value at a jump time is the left limit.
 *
 * Every knot carries two slopes: the one valid on the interval ending at the
 * knot and the one valid on the interval starting there. They differ at
 * breakpoints where the right-hand side is discontinuous but the state is not.
 */
class Trajectory {
  public:
    struct Segment {
        std::vector<double> times;
        std::vector<double> values;       // knot-major, dimension entries per knot
        std::vector<double> slope_left;
        std::vector<double> slope_right;

        [[nodiscard]] double t0() const { return times.front(); }
        [[nodiscard]] double t1() const { return times.back(); }
        [[nodiscard]] std::size_t size() const { return times.size(); }
    };

    struct Jump {
        double time{0};
        Eigen::VectorXd left;
        Eigen::VectorXd right;
    };

    explicit Trajectory(Eigen::Index dimension = 1) : dim_(dimension) {}

    [[nodiscard]] Eigen::Index dimension() const noexcept { return dim_; }
    [[nodiscard]] bool empty() const noexcept { return segments_.empty(); }
    [[nodiscard]] double t_start() const;
    [[nodiscard]] double t_end() const;
    [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }
    [[nodiscard]] const std::vector<Jump>& jumps() const noexcept { return jumps_; }
    [[nodiscard]] std::size_t knot_count() const;

    /// Value at t; the left limit at a jump time.
    [[nodiscard]] Eigen::VectorXd eval(double t) const;
    /// Right limit at t; equal to eval(t) away from jumps.
    [[nodiscard]] Eigen::VectorXd eval_right(double t) const;
    /// Value at t on the smooth branch whose closure contains ref. Used for
    /// one-sided lookups right next to a jump.
    [[nodiscard]] double eval_near(double t, double ref, Eigen::Index component) const;
    [[nodiscard]] double eval(double t, Eigen::Index component) const;

    /// Knot times in [t0, t1], ascending; a jump time appears twice.
    [[nodiscard]] std::vector<double> knot_times_in(double t0, double t1) const;
    [[nodiscard]] std::vector<double> jump_times_in(double t0, double t1) const;

    /// Rows `t,x_1..x_n,is_jump`. Both limits are emitted at a jump time.
    void write_csv(std::ostream& os) const;

  private:
    friend class TrajectoryBuilder;

    [[nodiscard]] std::size_t segment_left_of(double t) const;
    [[nodiscard]] std::size_t segment_right_of(double t) const;
    [[nodiscard]] std::size_t segment_near(double ref) const;
    [[nodiscard]] double hermite(const Segment& seg, double t, Eigen::Index component) const;
    void check_domain(double t) const;

    Eigen::Index dim_;
    std::vector<Segment> segments_;
    std::vector<Jump> jumps_;
};

/// Incremental construction used by the integrator. The partially built
/// trajectory is readable through current() for delayed lookups.
class TrajectoryBuilder {
  public:
    explicit TrajectoryBuilder(Eigen::Index dimension) : traj_(dimension) {}

    /// Appends a knot to the open segment. Both slopes start as slope_left.
    void push(double t, const Eigen::Ref<const Eigen::VectorXd>& x,
              const Eigen::Ref<const Eigen::VectorXd>& slope_left);
    /// Replaces the outgoing slope of the most recent knot.
    void set_right_slope(const Eigen::Ref<const Eigen::VectorXd>& slope);
    /// Closes the open segment at its last knot (which must be at t) and opens
    /// a new one starting at t with the post-jump value.
    void jump(double t, const Eigen::Ref<const Eigen::VectorXd>& right,
              const Eigen::Ref<const Eigen::VectorXd>& slope);

    [[nodiscard]] const Trajectory& current() const noexcept { return traj_; }
    [[nodiscard]] Trajectory finish() && { return std::move(traj_); }

  private:
    Trajectory traj_;
};

/// A trajectory read through a time translation: value(t) = traj(t + shift).
struct TrajectoryView {
    const Trajectory* traj;
    double shift{0};

    TrajectoryView(const Trajectory& t, double s = 0.0) : traj(&t), shift(s) {}  // NOLINT
};

/**
 * @brief W-distance predicate rho(a, b) < eps over a window.
 *
 * True iff the jump times of a and b in [t0, t1) pair up in order with
 * |tau_a - tau_b| < eps, and the max-norm difference is below eps at every
 * grid sample farther than eps from all jump times of either trajectory.
 *
 * @param sample_step grid spacing; 0 selects a tenth of the finer average
 *        knot spacing of the two trajectories.
 */
[[nodiscard]] bool w_distance(TrajectoryView a, TrajectoryView b, double eps, Window window,
                              double sample_step = 0.0);

/// Least eps (bisection, tolerance 1e-6) for which w_distance holds;
/// +inf when the jump counts in the window differ.
[[nodiscard]] double rho_bound(TrajectoryView a, TrajectoryView b, Window window,
                               double sample_step = 0.0);

}  // namespace impsim

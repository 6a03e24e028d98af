#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "impsim/errors.hpp"
#include "impsim/trajectory.hpp"

using namespace impsim;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

template <typename F, typename DF>
Trajectory sampled(F f, DF df, double t0, double t1, double step) {
    TrajectoryBuilder b(1);
    const auto n = static_cast<int>(std::llround((t1 - t0) / step));
    for (int i = 0; i <= n; ++i) {
        const double t = i == n ? t1 : t0 + i * step;
        b.push(t, scalar(f(t)), scalar(df(t)));
    }
    return std::move(b).finish();
}

Trajectory constant(double value, double t0, double t1, double step = 0.1) {
    return sampled([=](double) { return value; }, [](double) { return 0.0; }, t0, t1, step);
}

/// Piecewise constant: `before` on [t0, jump], `after` on (jump, t1].
Trajectory step_function(double jump_time, double before, double after, double t0, double t1,
                         double step = 0.01) {
    TrajectoryBuilder b(1);
    double t = t0;
    for (; t < jump_time - 1e-12; t += step) b.push(t, scalar(before), scalar(0.0));
    b.push(jump_time, scalar(before), scalar(0.0));
    b.jump(jump_time, scalar(after), scalar(0.0));
    for (t = jump_time + step; t < t1 - 1e-12; t += step) b.push(t, scalar(after), scalar(0.0));
    b.push(t1, scalar(after), scalar(0.0));
    return std::move(b).finish();
}

}  // namespace

TEST(TrajectoryEval, Constant) {
    const auto tr = constant(5.0, 0.0, 3.0);
    for (double t : {0.0, 0.05, 1.234, 3.0}) EXPECT_EQ(tr.eval(t)[0], 5.0);
}

TEST(TrajectoryEval, ReproducesCubics) {
    const auto f = [](double t) { return t * t * t - 2.0 * t * t + 0.5; };
    const auto df = [](double t) { return 3.0 * t * t - 4.0 * t; };
    const auto tr = sampled(f, df, -1.0, 2.0, 0.25);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double t = u(rng);
        EXPECT_NEAR(tr.eval(t)[0], f(t), 1e-13);
    }
    EXPECT_NEAR(tr.eval(0.125)[0], f(0.125), 1e-15);
}

TEST(TrajectoryEval, SineWithinHermiteBound) {
    const auto tr = sampled([](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
                            0.0, 10.0, 0.01);
    double worst = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double t = 1e-4 * i;
        worst = std::max(worst, std::abs(tr.eval(t)[0] - std::sin(t)));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(TrajectoryEval, OutsideDomainThrows) {
    const auto tr = constant(1.0, 0.0, 1.0);
    EXPECT_THROW((void)tr.eval(-0.1), InvalidInput);
    EXPECT_THROW((void)tr.eval(1.1), InvalidInput);
}

TEST(TrajectoryEval, JumpLimits) {
    const auto tr = step_function(1.0, 2.0, 3.0, 0.0, 2.0);
    EXPECT_EQ(tr.eval(1.0)[0], 2.0);
    EXPECT_EQ(tr.eval_right(1.0)[0], 3.0);
    EXPECT_EQ(tr.eval_right(0.5)[0], tr.eval(0.5)[0]);
    ASSERT_EQ(tr.jumps().size(), 1u);
    EXPECT_EQ(tr.jumps()[0].left[0], 2.0);
    EXPECT_EQ(tr.jumps()[0].right[0], 3.0);
}

TEST(TrajectoryEval, ImpulsiveMultiplier) {
    TrajectoryBuilder b(1);
    b.push(0.0, scalar(2.0), scalar(0.0));
    b.push(1.0, scalar(2.0), scalar(0.0));
    b.jump(1.0, scalar((1.0 + 0.5) * 2.0), scalar(0.0));
    b.push(2.0, scalar(3.0), scalar(0.0));
    const auto tr = std::move(b).finish();
    EXPECT_EQ(tr.eval_right(1.0)[0], 3.0);
    EXPECT_EQ(tr.eval(1.0)[0], 2.0);
}

TEST(TrajectoryCsv, EmitsBothLimitsAtJumps) {
    const auto tr = step_function(0.5, 1.0, 4.0, 0.0, 1.0, 0.25);
    std::ostringstream os;
    tr.write_csv(os);
    EXPECT_EQ(os.str(),
              "t,x_1,is_jump\n"
              "0,1,0\n0.25,1,0\n0.5,1,1\n0.5,4,1\n0.75,4,0\n1,4,0\n");
}

TEST(WDistance, IdenticalTrajectories) {
    const auto tr = step_function(1.0, 0.0, 1.0, 0.0, 2.0);
    for (double eps : {1e-12, 1e-6, 0.1, 10.0}) EXPECT_TRUE(w_distance(tr, tr, eps, {0.0, 2.0}));
}

TEST(WDistance, DistinctConstants) {
    const auto a = constant(0.0, 0.0, 2.0);
    const auto b = constant(1.0, 0.0, 2.0);
    EXPECT_FALSE(w_distance(a, b, 0.5, {0.0, 2.0}));
    EXPECT_TRUE(w_distance(a, b, 1.5, {0.0, 2.0}));
}

TEST(WDistance, NearbyJumps) {
    const auto a = step_function(1.0, 0.0, 1.0, 0.0, 2.0);
    const auto b = step_function(1.05, 0.0, 1.0, 0.0, 2.0);
    EXPECT_TRUE(w_distance(a, b, 0.1, {0.0, 2.0}));
    EXPECT_FALSE(w_distance(a, b, 0.04, {0.0, 2.0}));
}

TEST(WDistance, JumpCountMismatchIsFalse) {
    const auto a = step_function(1.0, 0.0, 1.0, 0.0, 2.0);
    const auto b = constant(0.0, 0.0, 2.0);
    EXPECT_FALSE(w_distance(a, b, 100.0, {0.0, 2.0}));
    EXPECT_TRUE(std::isinf(rho_bound(a, b, {0.0, 2.0})));
}

TEST(WDistance, DimensionMismatchThrows) {
    TrajectoryBuilder b(2);
    b.push(0.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0));
    b.push(2.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0));
    const auto two = std::move(b).finish();
    EXPECT_THROW((void)w_distance(two, constant(0.0, 0.0, 2.0), 0.1, {0.0, 2.0}), InvalidInput);
}

TEST(WDistance, SymmetricAndMonotoneInEps) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double ja = 0.8 + 0.4 * u(rng);
        const double jb = 0.8 + 0.4 * u(rng);
        const auto a = step_function(ja, u(rng), u(rng), 0.0, 2.0);
        const auto b = step_function(jb, u(rng), u(rng), 0.0, 2.0);
        bool previous = false;
        for (double eps = 0.01; eps < 2.0; eps *= 1.3) {
            const bool ab = w_distance(a, b, eps, {0.0, 2.0});
            ASSERT_EQ(ab, w_distance(b, a, eps, {0.0, 2.0}));
            ASSERT_TRUE(ab || !previous) << "lost the relation when eps grew to " << eps;
            previous = ab;
        }
    }
}

TEST(WDistance, ShiftedView) {
    const auto tr = sampled([](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
                            0.0, 20.0, 0.01);
    const double period = 2.0 * M_PI;
    EXPECT_TRUE(w_distance(TrajectoryView(tr, period), tr, 1e-8, {0.0, 10.0}));
    EXPECT_FALSE(w_distance(TrajectoryView(tr, 1.0), tr, 1e-2, {0.0, 10.0}));
    EXPECT_THROW((void)w_distance(TrajectoryView(tr, 15.0), tr, 1e-2, {0.0, 10.0}), InvalidInput);
}

TEST(RhoBound, Identical) {
    const auto tr = step_function(1.0, 0.0, 1.0, 0.0, 2.0);
    EXPECT_LE(rho_bound(tr, tr, {0.0, 2.0}), 1e-6);
}

TEST(RhoBound, Constants) {
    EXPECT_NEAR(rho_bound(constant(0.0, 0.0, 2.0), constant(1.0, 0.0, 2.0), {0.0, 2.0}), 1.0, 1e-6);
}

TEST(RhoBound, StepPairAgreesWithPredicate) {
    const auto a = step_function(1.0, 0.0, 1.0, 0.0, 2.0);
    const auto b = step_function(1.05, 0.0, 1.0, 0.0, 2.0);
    const double rho = rho_bound(a, b, {0.0, 2.0});
    // jump offset dominates; values agree once eps-neighbourhoods of jumps are excluded
    EXPECT_NEAR(rho, 0.05, 2e-6);
    EXPECT_TRUE(w_distance(a, b, rho, {0.0, 2.0}));
    EXPECT_TRUE(w_distance(a, b, rho + 0.3, {0.0, 2.0}));
    EXPECT_FALSE(w_distance(a, b, rho - 2e-6, {0.0, 2.0}));
}

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "degenwave/monitors.hpp"
#include "support.hpp"

using namespace degenwave;
using testing_support::small_run;

namespace {

const testing_support::SmallRun& bump_run() {
  static const auto r = small_run({"gauss_bump", {}});
  return r;
}

}  // namespace

TEST(InvariantRegion, HoldsOnSolverOutput) {
  const auto& r = bump_run();
  const auto v = invariant_region(r.result.trajectory, r.init.bounds, r.init.delta);
  EXPECT_TRUE(v.evaluated);
  EXPECT_TRUE(v.passed) << v.detail;
  EXPECT_TRUE(v.hard);
}

TEST(InvariantRegion, DetectsEscapedState) {
  const auto& r = bump_run();
  Trajectory t = r.result.trajectory;
  t.snapshots[5].w[400] = r.init.bounds->c0;  // above c0 - delta
  const auto v = invariant_region(t, r.init.bounds, r.init.delta);
  EXPECT_FALSE(v.passed);
  EXPECT_NEAR(v.worst, r.init.delta, 1e-12);
  EXPECT_EQ(v.index, 400u);
  EXPECT_DOUBLE_EQ(v.t, t.times[5]);
  EXPECT_NE(v.detail.find("violation"), std::string::npos);
}

TEST(InvariantRegion, NotApplicableWithoutSeparatingLevel) {
  const auto& r = bump_run();
  const auto v = invariant_region(r.result.trajectory, std::nullopt, 0.1);
  EXPECT_FALSE(v.evaluated);
  EXPECT_TRUE(v.passed);
}

TEST(Monotonicity, HoldsAndDetectsIncrease) {
  const auto& r = bump_run();
  EXPECT_TRUE(monotonicity(r.result.trajectory).passed);
  Trajectory t = r.result.trajectory;
  t.snapshots.back().z[300] += 0.05;
  const auto v = monotonicity(t);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.index, 300u - 1u);
  EXPECT_NEAR(v.worst, (t.snapshots.back().z[300] - t.snapshots.back().z[299]) / t.grid.dx(), 1e-9);
}

TEST(ConservedBounds, HoldsAndDetectsViolation) {
  const auto& r = bump_run();
  EXPECT_TRUE(conserved_bounds(r.result.trajectory, r.init.bounds, r.init.delta).passed);
  Trajectory t = r.result.trajectory;
  t.snapshots[3].w[10] += 5.0;
  t.snapshots[3].z[10] += 5.0;  // u far above (c2 + c0)/2
  EXPECT_FALSE(conserved_bounds(t, r.init.bounds, r.init.delta).passed);
}

TEST(VDecreasing, HoldsAndDetectsGrowth) {
  const auto& r = bump_run();
  const auto ok = v_decreasing(r.result.trajectory, r.p);
  EXPECT_TRUE(ok.passed) << ok.detail;
  Trajectory t = r.result.trajectory;
  t.snapshots[4].z[200] += 0.01;
  const auto bad = v_decreasing(t, r.p);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.index, 200u);
}

TEST(L1Bounds, IdentityAndInequalitiesHold) {
  const auto& r = bump_run();
  // u0(-inf) = 0 and u0(+inf) = amplitude = -1
  const auto l1 = l1_derivative_bounds(r.result.trajectory, r.p, r.cfg.epsilon, 0.0, -1.0);
  EXPECT_TRUE(l1.space.passed) << l1.space.detail;
  EXPECT_TRUE(l1.time.passed) << l1.time.detail;
  EXPECT_LT(l1.identity_relative_error, 1e-6);
  EXPECT_NEAR(l1.identity_rhs, 2.0, 1e-15);
  EXPECT_EQ(l1.space_series.size(), r.result.trajectory.size());
  for (std::size_t k = 1; k < l1.space_series.size(); ++k) EXPECT_LE(l1.space_series[k], l1.space_series[k - 1] + 1e-12);
}

TEST(L1Bounds, DetectsOscillation) {
  const auto& r = bump_run();
  Trajectory t = r.result.trajectory;
  for (std::size_t i = 100; i < 200; i += 2) t.snapshots.back().w[i] += 0.01;
  const auto l1 = l1_derivative_bounds(t, r.p, r.cfg.epsilon, 0.0, -1.0);
  EXPECT_FALSE(l1.space.passed);
  EXPECT_NEAR(l1.space.worst, 100 * 0.01, 1e-9);  // 50 spikes, each adding 0.02
  EXPECT_DOUBLE_EQ(l1.space.t, t.times.back());
}

TEST(L1Bounds, DetectsFastTimeVariation) {
  const auto& r = bump_run();
  Trajectory t = r.result.trajectory;
  for (auto& w : t.snapshots[6].w) w -= 0.5;  // uniform jump between snapshots 5 and 6
  const auto l1 = l1_derivative_bounds(t, r.p, r.cfg.epsilon, 0.0, -1.0);
  EXPECT_FALSE(l1.time.passed);
}

TEST(Comparison, HoldsOnSolverOutput) {
  for (const std::string name : {"gauss_bump", "two_bumps", "ramp", "gauss_dip"}) {
    const auto r = small_run({name, {}});
    const auto v = comparison_bounds(r.result.trajectory, r.init, r.p);
    EXPECT_TRUE(v.passed) << name << ": " << v.detail;
  }
}

TEST(Comparison, DetectsStateBelowInitialW) {
  const auto& r = bump_run();
  Trajectory t = r.result.trajectory;
  t.snapshots[2].w[420] = r.init.w0[420] - 0.05;
  const auto v = comparison_bounds(t, r.init, r.p);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.index, 420u);
}

TEST(Comparison, DetectsStateAboveShiftedW) {
  // w at t must not exceed w0(x - lambda_M t); raising w at the left edge breaks that
  const auto& r = bump_run();
  Trajectory t = r.result.trajectory;
  t.snapshots[1].w[3] += 0.5;
  EXPECT_FALSE(comparison_bounds(t, r.init, r.p).passed);
}

TEST(FFunctional, ConstantDataHaveNoMass) {
  const auto r = small_run({"constant", {}});
  const auto f = f_functional(r.result.trajectory, r.p, 3.0);
  for (double x : f.f) EXPECT_NEAR(x, 0.0, 1e-13);
  EXPECT_DOUBLE_EQ(f.slope, 0.0);
  EXPECT_FALSE(f.t_star.has_value());
  EXPECT_TRUE(f_identity(r.result.trajectory, f, r.cfg.epsilon).passed);
}

TEST(FFunctional, SplitSumsAndIdentity) {
  const auto& r = bump_run();
  const auto f = f_functional(r.result.trajectory, r.p, 3.0);
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    EXPECT_NEAR(f.f1[k] + f.f2[k] + f.f3[k], f.f[k], 1e-12);
  }
  EXPECT_NEAR(f.slope, 1.0, 1e-10);
  const auto v = f_identity(r.result.trajectory, f, r.cfg.epsilon);
  EXPECT_TRUE(v.passed) << v.detail;
  // the delta shift lifts max v0 above the far level 1
  EXPECT_GT(f.c_m / (2.0 * 3.0), 1.0);
}

TEST(FFunctional, DetectsMassDefect) {
  const auto& r = bump_run();
  Trajectory t = r.result.trajectory;
  for (std::size_t i = 300; i < 500; ++i) t.snapshots.back().z[i] += 0.3;  // adds mass to v
  const auto f = f_functional(t, r.p, 3.0);
  EXPECT_FALSE(f_identity(t, f, r.cfg.epsilon).passed);
}

TEST(FFunctional, CrossingMatchesTStar) {
  const auto r = small_run({"gauss_bump", {{"amplitude", -4.0}}}, 3.0, 12.0, 801, 2.0);
  const auto f = f_functional(r.result.trajectory, r.p, 1.5);
  ASSERT_TRUE(f.t_star.has_value());
  ASSERT_TRUE(f.crossing.has_value());
  EXPECT_NEAR(*f.crossing, *f.t_star, 1e-9);
  const auto& first = r.result.trajectory.snapshots.front();
  double vmax = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) vmax = std::max(vmax, v_clamped(first.w[i], first.z[i], r.p));
  EXPECT_NEAR(f.c_m, 2.0 * 1.5 * vmax, 1e-12);
  EXPECT_NEAR(*f.t_star, f.c_m / (f.w0_left - f.z0_right), 1e-12);
  EXPECT_THROW(f_functional(r.result.trajectory, r.p, 50.0), ParameterError);
}

TEST(WeakResidual, ConstantStateIsAnExactWeakSolution) {
  // only quadrature error remains; it falls with the number of time slices
  const ModelParams p = params_new(3.0);
  auto residual = [&](std::size_t slices) {
    Trajectory t;
    t.grid = make_grid(-8.0, 8.0, 801);
    for (double time : uniform_times(1.0, slices)) {
      t.times.push_back(time);
      t.snapshots.push_back(RiemannField{std::vector<double>(801, -0.5), std::vector<double>(801, 1.5), time});
    }
    const auto init = conserved_clamped(t.snapshots.front(), p);
    return weak_form_residual(t, p, init, default_test_battery(1.0));
  };
  const auto coarse = residual(81);
  const auto fine = residual(641);
  EXPECT_EQ(fine.rows.size(), 5u);
  EXPECT_LT(coarse.total, 1e-3);
  EXPECT_LT(fine.total, coarse.total / 10.0);
}

TEST(WeakResidual, DetectsWrongInitialData) {
  const auto r = small_run({"constant", {{"level", 1.0}}});
  auto init = conserved_clamped(r.result.trajectory.snapshots.front(), r.p);
  for (double& u : init.u) u += 0.5;
  const auto table = weak_form_residual(r.result.trajectory, r.p, init, default_test_battery(1.0));
  EXPECT_GT(table.total, 0.5);
}

TEST(TestFunctions, BumpAndDerivatives) {
  const TestFunction phi{0.0, 1.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(phi(0.0, 0.0), 1.0);
  EXPECT_EQ(phi(1.0, 0.0), 0.0);
  EXPECT_EQ(phi(0.0, -1.0), 0.0);
  const double h = 1e-6;
  for (double x : {-0.7, -0.2, 0.4, 0.9}) {
    const double fd = (phi(x + h, 0.3) - phi(x - h, 0.3)) / (2 * h);
    EXPECT_NEAR(phi.dx(x, 0.3), fd, 1e-6);
    const double ft = (phi(0.2, x + h) - phi(0.2, x - h)) / (2 * h);
    EXPECT_NEAR(phi.dt(0.2, x), ft, 1e-6);
  }
}

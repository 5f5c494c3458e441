#pragma once

// Checks of the a-priori estimates against a computed trajectory. Every
// monitor is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "degenwave/core.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/grid.hpp"
#include "degenwave/initdata.hpp"
#include "degenwave/test_function.hpp"
#include "degenwave/trajectory.hpp"

namespace degenwave {

namespace monitor_names {
inline constexpr const char* kInvariantRegion = "invariant_region";
inline constexpr const char* kMonotonicity = "monotonicity";
inline constexpr const char* kConservedBounds = "conserved_bounds";
inline constexpr const char* kVDecreasing = "v_decreasing";
inline constexpr const char* kL1Bounds = "l1_derivative_bounds";
inline constexpr const char* kComparison = "comparison_bounds";
inline constexpr const char* kFIdentity = "f_identity";
inline constexpr const char* kWeakResidual = "weak_form_residual";
}  // namespace monitor_names

inline const std::vector<std::string>& all_monitor_names() {
  using namespace monitor_names;
  static const std::vector<std::string> names{kInvariantRegion, kMonotonicity, kConservedBounds, kVDecreasing,
                                              kL1Bounds,        kComparison,   kFIdentity,      kWeakResidual};
  return names;
}

struct Verdict {
  Verdict() = default;
  Verdict(std::string n, bool h) : name(std::move(n)), hard(h) {}

  std::string name;
  bool hard = false;
  bool evaluated = true;
  bool passed = true;
  double worst = 0.0;  // largest measured violation (or error), <= tolerance on pass
  double tolerance = 0.0;
  double t = 0.0;
  std::size_t index = 0;
  std::string detail;
};

struct MonitorSet {
  std::set<std::string> enabled;
  std::size_t cadence = 10;
  std::map<std::string, double> tolerances;
  std::set<std::string> hard{monitor_names::kInvariantRegion, monitor_names::kMonotonicity};

  static MonitorSet all() {
    MonitorSet m;
    for (const auto& n : all_monitor_names()) m.enabled.insert(n);
    return m;
  }
  static MonitorSet none() { return MonitorSet{}; }

  bool is_enabled(const std::string& name) const { return enabled.count(name) > 0; }
  bool is_hard(const std::string& name) const { return hard.count(name) > 0; }
  double tolerance(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }
  void validate() const {
    if (cadence < 1) throw ParameterError("monitor cadence must be >= 1");
  }
};

namespace detail {

inline double snapshot_scale(const RiemannField& f) { return field_scale(f.w, f.z); }

inline std::vector<double> v_profile(const RiemannField& f, const ModelParams& p) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = v_clamped(f.w[i], f.z[i], p);
  return v;
}

inline void record(Verdict& v, double violation, double t, std::size_t index) {
  if (violation > v.worst) {
    v.worst = violation;
    v.t = t;
    v.index = index;
  }
}

inline void finish(Verdict& v, const GridSpec& grid) {
  v.passed = v.worst <= v.tolerance;
  if (!v.passed) {
    std::ostringstream os;
    os << "violation " << v.worst << " > " << v.tolerance << " at x=" << grid.x(v.index) << " (index " << v.index
       << "), t=" << v.t;
    if (!v.detail.empty()) os << "; " << v.detail;
    v.detail = os.str();
  }
}

inline Verdict not_applicable(const std::string& name, bool hard, const std::string& why) {
  Verdict v;
  v.name = name;
  v.hard = hard;
  v.evaluated = false;
  v.passed = true;
  v.detail = why;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Invariant region: c1 - delta <= w <= c0 - delta, c0 + delta <= z <= c2 + delta.

inline void invariant_region_accumulate(Verdict& out, const RiemannField& f, const RegionBounds& b, double delta) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double viol = std::max({(b.c1 - delta) - f.w[i], f.w[i] - (b.c0 - delta), (b.c0 + delta) - f.z[i],
                                  f.z[i] - (b.c2 + delta)});
    detail::record(out, viol, f.t, i);
  }
}

inline Verdict invariant_region_state(const RiemannField& f, const GridSpec& grid,
                                      const std::optional<RegionBounds>& bounds, double delta,
                                      double rel_tol = 1e-10) {
  if (!bounds) {
    return detail::not_applicable(monitor_names::kInvariantRegion, true, "no c0 separates w0 and z0");
  }
  Verdict v{monitor_names::kInvariantRegion, true};
  v.tolerance = rel_tol * detail::snapshot_scale(f);
  invariant_region_accumulate(v, f, *bounds, delta);
  detail::finish(v, grid);
  return v;
}

inline Verdict invariant_region(const Trajectory& traj, const std::optional<RegionBounds>& bounds, double delta,
                                double rel_tol = 1e-10) {
  if (!bounds) {
    return detail::not_applicable(monitor_names::kInvariantRegion, true, "no c0 separates w0 and z0");
  }
  Verdict v{monitor_names::kInvariantRegion, true};
  v.tolerance = rel_tol * detail::snapshot_scale(traj.snapshots.front());
  for (const auto& snap : traj.snapshots) invariant_region_accumulate(v, snap, *bounds, delta);
  detail::finish(v, traj.grid);
  return v;
}

// ---------------------------------------------------------------------------
// Monotonicity: forward difference quotients of w and z stay <= rel_tol*scale/dx.

inline void monotonicity_accumulate(Verdict& out, const RiemannField& f, double dx) {
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double slope = std::max(f.w[i + 1] - f.w[i], f.z[i + 1] - f.z[i]) / dx;
    detail::record(out, slope, f.t, i);
  }
}

inline Verdict monotonicity_state(const RiemannField& f, const GridSpec& grid, double rel_tol = 1e-8) {
  Verdict v{monitor_names::kMonotonicity, true};
  v.tolerance = rel_tol * detail::snapshot_scale(f) / grid.dx();
  monotonicity_accumulate(v, f, grid.dx());
  detail::finish(v, grid);
  return v;
}

inline Verdict monotonicity(const Trajectory& traj, double rel_tol = 1e-8) {
  Verdict v{monitor_names::kMonotonicity, true};
  v.tolerance = rel_tol * detail::snapshot_scale(traj.snapshots.front()) / traj.grid.dx();
  for (const auto& snap : traj.snapshots) monotonicity_accumulate(v, snap, traj.grid.dx());
  detail::finish(v, traj.grid);
  return v;
}

// ---------------------------------------------------------------------------
// Conserved bounds: (c1+c0)/2 <= u <= (c2+c0)/2, c1-c0+2delta <= 2 v^theta <= c2-c1+2delta.

inline Verdict conserved_bounds(const Trajectory& traj, const std::optional<RegionBounds>& bounds, double delta,
                                double rel_tol = 1e-10) {
  if (!bounds) return detail::not_applicable(monitor_names::kConservedBounds, false, "no c0 separates w0 and z0");
  const auto& b = *bounds;
  Verdict v{monitor_names::kConservedBounds, false};
  v.tolerance = rel_tol * detail::snapshot_scale(traj.snapshots.front());
  for (const auto& snap : traj.snapshots) {
    for (std::size_t i = 0; i < snap.size(); ++i) {
      const double u = 0.5 * (snap.w[i] + snap.z[i]);
      const double two_vt = snap.z[i] - snap.w[i];
      const double viol = std::max({0.5 * (b.c1 + b.c0) - u, u - 0.5 * (b.c2 + b.c0),
                                    (b.c1 - b.c0 + 2.0 * delta) - two_vt, two_vt - (b.c2 - b.c1 + 2.0 * delta)});
      detail::record(v, viol, snap.t, i);
    }
  }
  detail::finish(v, traj.grid);
  return v;
}

// ---------------------------------------------------------------------------
// v is nonincreasing in t at every node: v(x, t2) <= v(x, t1) + tol.

inline Verdict v_decreasing(const Trajectory& traj, const ModelParams& p, double tol = 1e-10) {
  Verdict v{monitor_names::kVDecreasing, false};
  v.tolerance = tol;
  std::vector<double> prev = detail::v_profile(traj.snapshots.front(), p);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    auto cur = detail::v_profile(traj.snapshots[k], p);
    for (std::size_t i = 0; i < cur.size(); ++i) detail::record(v, cur[i] - prev[i], traj.times[k], i);
    prev = std::move(cur);
  }
  detail::finish(v, traj.grid);
  return v;
}

// ---------------------------------------------------------------------------
// L1 bounds on w_x, z_x and w_t, z_t.

struct L1Report {
  Verdict space;  // ||w_x(t)|| + ||z_x(t)|| <= ||w_x(0)|| + ||z_x(0)|| + tol
  Verdict time;   // ||w_t|| + ||z_t|| <= lambda_M (||w_x(0)|| + ||z_x(0)||) + tol
  double initial_total = 0.0;              // ||w_x(0)||_1 + ||z_x(0)||_1
  double identity_rhs = 0.0;               // 2 (u0(-inf) - u0(+inf))
  double identity_relative_error = 0.0;
  double lambda_max = 0.0;
  std::vector<double> space_series;
  std::vector<double> time_series;  // per snapshot interval, from difference quotients
};

inline double total_variation(std::span<const double> f) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) tv += std::abs(f[i + 1] - f[i]);
  return tv;
}

inline double max_characteristic_speed(const RiemannField& f, const ModelParams& p) {
  double vmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) vmax = std::max(vmax, v_clamped(f.w[i], f.z[i], p));
  return p.theta * pow_nonneg(vmax, p.s_half);
}

/// u_minus, u_plus are the far-field limits of the undisturbed u0. The
/// time-derivative bound is evaluated on snapshot difference quotients; its
/// tolerance adds the viscous contribution epsilon (||w_xx|| + ||z_xx||).
inline L1Report l1_derivative_bounds(const Trajectory& traj, const ModelParams& p, double epsilon, double u_minus,
                                     double u_plus, double rel_tol = 1e-10) {
  L1Report r;
  const auto& first = traj.snapshots.front();
  const double scale = detail::snapshot_scale(first);
  const double dx = traj.grid.dx();
  r.initial_total = total_variation(first.w) + total_variation(first.z);
  r.identity_rhs = 2.0 * (u_minus - u_plus);
  r.identity_relative_error =
      std::abs(r.initial_total - r.identity_rhs) / std::max(std::abs(r.identity_rhs), std::numeric_limits<double>::min());
  if (r.identity_rhs == 0.0 && r.initial_total == 0.0) r.identity_relative_error = 0.0;
  r.lambda_max = max_characteristic_speed(first, p);

  r.space = Verdict{monitor_names::kL1Bounds, false};
  r.space.tolerance = rel_tol * scale;
  for (const auto& snap : traj.snapshots) {
    const double total = total_variation(snap.w) + total_variation(snap.z);
    r.space_series.push_back(total);
    detail::record(r.space, total - r.initial_total, snap.t, 0);
  }
  detail::finish(r.space, traj.grid);

  r.time = Verdict{monitor_names::kL1Bounds, false};
  double curvature = 0.0;
  for (const auto& snap : traj.snapshots) {
    double c = 0.0;
    for (std::size_t i = 1; i + 1 < snap.size(); ++i) {
      c += std::abs(snap.w[i + 1] - 2.0 * snap.w[i] + snap.w[i - 1]) +
           std::abs(snap.z[i + 1] - 2.0 * snap.z[i] + snap.z[i - 1]);
    }
    curvature = std::max(curvature, c / dx);
  }
  r.time.tolerance = epsilon * curvature + rel_tol * scale;
  const double bound = r.lambda_max * r.initial_total;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj.times[k] - traj.times[k - 1];
    if (dt <= 0.0) continue;
    double norm = 0.0;
    for (std::size_t i = 0; i < traj.snapshots[k].size(); ++i) {
      norm += std::abs(traj.snapshots[k].w[i] - traj.snapshots[k - 1].w[i]) +
              std::abs(traj.snapshots[k].z[i] - traj.snapshots[k - 1].z[i]);
    }
    norm *= dx / dt;
    r.time_series.push_back(norm);
    detail::record(r.time, norm - bound, traj.times[k], 0);
  }
  detail::finish(r.time, traj.grid);
  return r;
}

// ---------------------------------------------------------------------------
// Comparison bounds:
//   w0(x) <= w(x,t) <= w0(x - lambda_M t),  z0(x + lambda_M t) <= z(x,t) <= z0(x).

inline Verdict comparison_bounds(const Trajectory& traj, const MollifiedRiemannData& init, const ModelParams& p) {
  Verdict v{monitor_names::kComparison, false};
  const double dx = traj.grid.dx();
  double max_jump = 0.0;
  for (std::size_t i = 0; i + 1 < init.w0.size(); ++i) {
    max_jump = std::max({max_jump, std::abs(init.w0[i + 1] - init.w0[i]), std::abs(init.z0[i + 1] - init.z0[i])});
  }
  v.tolerance = 2.0 * dx * (max_jump / dx) + 1e-10 * detail::snapshot_scale(traj.snapshots.front());
  const double lambda_m = max_characteristic_speed(init.as_field(), p);
  for (const auto& snap : traj.snapshots) {
    const double shift = lambda_m * snap.t;
    for (std::size_t i = 0; i < snap.size(); ++i) {
      const double x = traj.grid.x(i);
      const double viol = std::max({init.w0[i] - snap.w[i], snap.w[i] - interpolate(init.w0, traj.grid, x - shift),
                                    interpolate(init.z0, traj.grid, x + shift) - snap.z[i], snap.z[i] - init.z0[i]});
      detail::record(v, viol, snap.t, i);
    }
  }
  std::ostringstream os;
  os << "lambda_M=" << lambda_m;
  v.detail = os.str();
  detail::finish(v, traj.grid);
  return v;
}

// ---------------------------------------------------------------------------
// F(t) = -int (v(x,t) - v0(x)) dx and its split at +/- M.

struct FReport {
  double cut = 0.0;
  double u_minus = 0.0;
  double u_plus = 0.0;
  double slope = 0.0;  // u_minus - u_plus
  double w0_left = 0.0;   // w0(-M)
  double z0_right = 0.0;  // z0(M)
  double c_m = 0.0;       // 2 M ||v0||_inf
  std::vector<double> times;
  std::vector<double> f;
  std::vector<double> f1, f2, f3;
  std::vector<double> f1_bound, f3_bound;  // t (u_- - w0(-M)),  t (z0(M) - u_+)
  std::vector<double> margin;              // (w0(-M) - z0(M)) t - C_M
  double max_identity_error = 0.0;         // max_t |F(t) - (u_- - u_+) t|
  std::optional<double> t_star;            // C_M / (w0(-M) - z0(M)) when positive
  std::optional<double> crossing;          // first measured zero of the margin series
};

inline FReport f_functional(const Trajectory& traj, const ModelParams& p, double cut_m) {
  const auto& grid = traj.grid;
  if (!(cut_m > 0.0) || -cut_m < grid.x_min || cut_m > grid.x_max) {
    throw ParameterError("F-functional cut M must satisfy 0 < M and [-M, M] inside the domain");
  }
  FReport r;
  r.cut = cut_m;
  const auto& first = traj.snapshots.front();
  const std::size_t n = first.size();
  r.u_minus = 0.5 * (first.w.front() + first.z.front());
  r.u_plus = 0.5 * (first.w.back() + first.z.back());
  r.slope = r.u_minus - r.u_plus;
  r.w0_left = interpolate(first.w, grid, -cut_m);
  r.z0_right = interpolate(first.z, grid, cut_m);
  const auto v0 = detail::v_profile(first, p);
  r.c_m = 2.0 * cut_m * *std::max_element(v0.begin(), v0.end());
  const double gap = r.w0_left - r.z0_right;
  if (gap > 0.0) r.t_star = r.c_m / gap;

  std::vector<double> diff(n);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    const auto v = detail::v_profile(traj.snapshots[k], p);
    for (std::size_t i = 0; i < n; ++i) diff[i] = v[i] - v0[i];
    const double f1 = -trapezoid_between(diff, grid, grid.x_min, -cut_m);
    const double f2 = -trapezoid_between(diff, grid, -cut_m, cut_m);
    const double f3 = -trapezoid_between(diff, grid, cut_m, grid.x_max);
    const double f = -trapezoid(diff, grid.dx());
    r.times.push_back(t);
    r.f.push_back(f);
    r.f1.push_back(f1);
    r.f2.push_back(f2);
    r.f3.push_back(f3);
    r.f1_bound.push_back(t * (r.u_minus - r.w0_left));
    r.f3_bound.push_back(t * (r.z0_right - r.u_plus));
    r.margin.push_back(gap * t - r.c_m);
    r.max_identity_error = std::max(r.max_identity_error, std::abs(f - r.slope * t));
  }
  for (std::size_t k = 1; k < r.margin.size(); ++k) {
    if (r.margin[k - 1] < 0.0 && r.margin[k] >= 0.0) {
      const double a = r.margin[k - 1];
      const double b = r.margin[k];
      r.crossing = r.times[k - 1] + (r.times[k] - r.times[k - 1]) * (-a) / (b - a);
      break;
    }
  }
  return r;
}

/// |F(t) - (u_- - u_+) t| <= 5 (dx + epsilon) * scale.
inline Verdict f_identity(const Trajectory& traj, const FReport& f, double epsilon) {
  Verdict v{monitor_names::kFIdentity, false};
  v.tolerance = 5.0 * (traj.grid.dx() + epsilon) * detail::snapshot_scale(traj.snapshots.front());
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    detail::record(v, std::abs(f.f[k] - f.slope * f.times[k]), f.times[k], 0);
  }
  v.passed = v.worst <= v.tolerance;
  if (!v.passed) {
    std::ostringstream os;
    os << "|F - (u_- - u_+) t| = " << v.worst << " > " << v.tolerance << " at t=" << v.t;
    v.detail = os.str();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Weak-form residual of v_t - u_x = 0, u_t - c (v^s)_x = 0 against test functions:
//   R1 = iint v phi_t - u phi_x + int v0 phi(x,0)
//   R2 = iint u phi_t - c v^s phi_x + int u0 phi(x,0)

struct WeakResidualRow {
  TestFunction phi;
  double r1 = 0.0;
  double r2 = 0.0;
};

struct WeakResidualTable {
  std::vector<WeakResidualRow> rows;
  double total = 0.0;  // sum of |r1| + |r2|
};

inline WeakResidualTable weak_form_residual(const Trajectory& traj, const ModelParams& p,
                                            const ConservedField& initial, const std::vector<TestFunction>& fns) {
  const auto& grid = traj.grid;
  const std::size_t n = grid.n;
  const auto xs = grid.nodes();
  std::vector<ConservedField> states;
  states.reserve(traj.size());
  for (const auto& snap : traj.snapshots) states.push_back(conserved_clamped(snap, p));

  WeakResidualTable table;
  std::vector<double> integrand1(n), integrand2(n);
  std::vector<double> slice1(traj.size()), slice2(traj.size());
  for (const auto& phi : fns) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.times[k];
      const auto& st = states[k];
      for (std::size_t i = 0; i < n; ++i) {
        const double pt = phi.dt(xs[i], t);
        const double px = phi.dx(xs[i], t);
        const double flux = p.c * pow_nonneg(st.v[i], p.s);
        integrand1[i] = st.v[i] * pt - st.u[i] * px;
        integrand2[i] = st.u[i] * pt - flux * px;
      }
      slice1[k] = trapezoid(integrand1, grid.dx());
      slice2[k] = trapezoid(integrand2, grid.dx());
    }
    WeakResidualRow row{phi};
    row.r1 = trapezoid(slice1, traj.times);
    row.r2 = trapezoid(slice2, traj.times);
    for (std::size_t i = 0; i < n; ++i) {
      const double p0 = phi(xs[i], 0.0);
      integrand1[i] = initial.v[i] * p0;
      integrand2[i] = initial.u[i] * p0;
    }
    row.r1 += trapezoid(integrand1, grid.dx());
    row.r2 += trapezoid(integrand2, grid.dx());
    table.total += std::abs(row.r1) + std::abs(row.r2);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace degenwave

#pragma once

// Explicit monotone scheme for the viscous Riemann-invariant system
//
//     w_t + lambda2 w_x = eps w_xx,    z_t + lambda1 z_x = eps z_xx,
//
// with lambda1 = -lambda2 = -theta v^{(s-1)/2} frozen at the current step.
// lambda2 >= 0 gives a backward difference for w, lambda1 <= 0 a forward
// difference for z; diffusion is the centred second difference.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "degenwave/core.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/grid.hpp"
#include "degenwave/initdata.hpp"
#include "degenwave/monitors.hpp"
#include "degenwave/trajectory.hpp"

namespace degenwave {

inline BoundaryValues boundary_from(const MollifiedRiemannData& init) {
  return {init.w0.front(), init.w0.back(), init.z0.front(), init.z0.back()};
}

/// Largest stable step: every update is then a convex combination of
/// neighbouring values.
inline double cfl_dt(const RiemannField& state, const SolveConfig& cfg, const GridSpec& grid, const ModelParams& p) {
  const double dx = grid.dx();
  const double lambda_max = max_characteristic_speed(state, p);
  const double rate = lambda_max / dx + 2.0 * cfg.epsilon / (dx * dx);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return cfg.cfl / rate;
}

namespace detail {

// One explicit Euler step of size dt from `in` into `out` (same length).
inline void step_into(const RiemannField& in, RiemannField& out, double dt, const SolveConfig& cfg,
                      const GridSpec& grid, const ModelParams& p) {
  const std::size_t n = in.size();
  const double dx = grid.dx();
  const double diffusion = cfg.epsilon * dt / (dx * dx);
  const double courant = dt / dx;
  out.w.resize(n);
  out.z.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = v_clamped(in.w[i], in.z[i], p);
    const double a = p.theta * pow_nonneg(v, p.s_half) * courant;
    const double wi = in.w[i];
    const double zi = in.z[i];
    out.w[i] = wi - a * (wi - in.w[i - 1]) + diffusion * (in.w[i + 1] - 2.0 * wi + in.w[i - 1]);
    out.z[i] = zi + a * (in.z[i + 1] - zi) + diffusion * (in.z[i + 1] - 2.0 * zi + in.z[i - 1]);
  }
  out.w.front() = cfg.boundary.w_left;
  out.w.back() = cfg.boundary.w_right;
  out.z.front() = cfg.boundary.z_left;
  out.z.back() = cfg.boundary.z_right;
  out.t = in.t + dt;
}

inline bool all_finite(const RiemannField& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f.w[i]) || !std::isfinite(f.z[i])) return false;
  }
  return true;
}

}  // namespace detail

/// One step with dt = cfl_dt(state).
inline RiemannField step(const RiemannField& state, const SolveConfig& cfg, const GridSpec& grid,
                         const ModelParams& p, std::size_t step_index = 0) {
  RiemannField out;
  detail::step_into(state, out, cfl_dt(state, cfg, grid, p), cfg, grid, p);
  if (!detail::all_finite(out)) {
    throw BlowUpError("non-finite value after step " + std::to_string(step_index), step_index);
  }
  return out;
}

/// One step with an explicit dt (no stability check).
inline RiemannField step(const RiemannField& state, double dt, const SolveConfig& cfg, const GridSpec& grid,
                         const ModelParams& p, std::size_t step_index = 0) {
  RiemannField out;
  detail::step_into(state, out, dt, cfg, grid, p);
  if (!detail::all_finite(out)) {
    throw BlowUpError("non-finite value after step " + std::to_string(step_index), step_index);
  }
  return out;
}

struct SolverReport {
  std::size_t steps = 0;
  std::vector<Verdict> live_verdicts;  // first failing (or last passing) verdict per live hard monitor
  bool aborted = false;
  std::optional<RiemannField> dump;  // state at the hard failure
  std::optional<DegeneracyEvent> degeneracy;
  double min_v = std::numeric_limits<double>::infinity();
};

struct SolveResult {
  Trajectory trajectory;
  SolverReport report;
};

inline SolveResult run(const MollifiedRiemannData& init, const SolveConfig& cfg, const GridSpec& grid,
                       const ModelParams& p, const MonitorSet& monitors) {
  validate(cfg);
  monitors.validate();
  if (init.w0.size() != grid.n || init.z0.size() != grid.n) {
    throw ParameterError("initial data length does not match the grid");
  }

  std::vector<double> targets = cfg.snapshot_times;
  targets.push_back(0.0);
  targets.push_back(cfg.t_end);
  std::erase_if(targets, [&](double t) { return t < 0.0 || t > cfg.t_end; });
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  SolveResult result;
  Trajectory& traj = result.trajectory;
  SolverReport& rep = result.report;
  traj.grid = grid;

  RiemannField state = init.as_field();
  RiemannField next;
  const bool live_region = monitors.is_enabled(monitor_names::kInvariantRegion) && init.bounds.has_value();
  const bool live_monotone = monitors.is_enabled(monitor_names::kMonotonicity);
  Verdict region_verdict = detail::not_applicable(monitor_names::kInvariantRegion, true, "not enabled");
  Verdict monotone_verdict = detail::not_applicable(monitor_names::kMonotonicity, true, "not enabled");

  auto check_live = [&](const RiemannField& s) {
    if (live_region) {
      auto v = invariant_region_state(s, grid, init.bounds, init.delta,
                                      monitors.tolerance(monitor_names::kInvariantRegion, 1e-10));
      if (!region_verdict.evaluated || v.worst > region_verdict.worst || !v.passed) region_verdict = v;
      if (!v.passed && monitors.is_hard(v.name)) return false;
    }
    if (live_monotone) {
      auto v = monotonicity_state(s, grid, monitors.tolerance(monitor_names::kMonotonicity, 1e-8));
      if (!monotone_verdict.evaluated || v.worst > monotone_verdict.worst || !v.passed) monotone_verdict = v;
      if (!v.passed && monitors.is_hard(v.name)) return false;
    }
    return true;
  };

  auto note_degeneracy = [&](const RiemannField& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double v = v_clamped(s.w[i], s.z[i], p);
      rep.min_v = std::min(rep.min_v, v);
      if (!rep.degeneracy && v < cfg.v_tol) rep.degeneracy = DegeneracyEvent{grid.x(i), s.t, i, v};
    }
  };

  auto store = [&](const RiemannField& s) {
    traj.times.push_back(s.t);
    traj.snapshots.push_back(s);
  };

  note_degeneracy(state);
  std::size_t target = 0;
  if (!targets.empty() && targets.front() == 0.0) {
    store(state);
    ++target;
  }
  bool ok = check_live(state);

  while (ok && target < targets.size()) {
    const double goal = targets[target];
    double dt = cfl_dt(state, cfg, grid, p);
    bool hits_goal = false;
    if (state.t + dt >= goal - 1e-13 * std::max(1.0, goal)) {
      dt = goal - state.t;
      hits_goal = true;
    }
    detail::step_into(state, next, dt, cfg, grid, p);
    ++rep.steps;
    if (!detail::all_finite(next)) {
      throw BlowUpError("non-finite value after step " + std::to_string(rep.steps), rep.steps);
    }
    if (hits_goal) next.t = goal;
    std::swap(state, next);
    traj.dt_history.push_back(dt);
    note_degeneracy(state);
    if (hits_goal) {
      store(state);
      ++target;
    }
    if (hits_goal || rep.steps % monitors.cadence == 0) ok = check_live(state);
  }

  if (!ok) {
    rep.aborted = true;
    rep.dump = state;
  }
  if (live_region) rep.live_verdicts.push_back(region_verdict);
  if (live_monotone) rep.live_verdicts.push_back(monotone_verdict);
  traj.final_state = state;
  return result;
}

// ---------------------------------------------------------------------------
// Conserved-form view: multiplying the viscous system by
//     A = [[a, b], [e, d]] = [[-1/(2 theta v^{(s-1)/2}), 1/(2 theta v^{(s-1)/2})], [1/2, 1/2]]
// gives
//     v_t - u_x = eps (a w_xx + b z_xx) = eps v_xx - eps (a_x w_x + b_x z_x),
//     u_t - c (v^s)_x = eps (e w_xx + d z_xx) = eps u_xx.

struct ConservedFluxes {
  std::vector<double> v_rhs_riemann;    // eps (a w_xx + b z_xx)
  std::vector<double> v_rhs_conserved;  // eps v_xx - eps (a_x w_x + b_x z_x)
  std::vector<double> u_rhs_riemann;    // eps (e w_xx + d z_xx)
  std::vector<double> u_rhs_conserved;  // eps u_xx
  std::vector<double> v_residual;       // conserved - riemann
  std::vector<double> u_residual;
  std::vector<bool> evaluated;  // false at boundary nodes and near the vacuum line
};

inline ConservedFluxes conserved_fluxes(const RiemannField& state, const SolveConfig& cfg, const GridSpec& grid,
                                        const ModelParams& p, double v_floor = 1e-6) {
  const std::size_t n = state.size();
  const double dx = grid.dx();
  const double eps = cfg.epsilon;
  ConservedFluxes out;
  out.v_rhs_riemann.assign(n, 0.0);
  out.v_rhs_conserved.assign(n, 0.0);
  out.u_rhs_riemann.assign(n, 0.0);
  out.u_rhs_conserved.assign(n, 0.0);
  out.v_residual.assign(n, 0.0);
  out.u_residual.assign(n, 0.0);
  out.evaluated.assign(n, false);

  std::vector<double> v(n), u(n), a(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = v_clamped(state.w[i], state.z[i], p);
    u[i] = 0.5 * (state.w[i] + state.z[i]);
    a[i] = v[i] > v_floor ? -1.0 / (2.0 * p.theta * pow_nonneg(v[i], p.s_half)) : 0.0;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (v[i - 1] <= v_floor || v[i] <= v_floor || v[i + 1] <= v_floor) continue;
    const double w_xx = (state.w[i + 1] - 2.0 * state.w[i] + state.w[i - 1]) / (dx * dx);
    const double z_xx = (state.z[i + 1] - 2.0 * state.z[i] + state.z[i - 1]) / (dx * dx);
    const double w_x = (state.w[i + 1] - state.w[i - 1]) / (2.0 * dx);
    const double z_x = (state.z[i + 1] - state.z[i - 1]) / (2.0 * dx);
    const double v_xx = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);
    const double u_xx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
    const double a_x = (a[i + 1] - a[i - 1]) / (2.0 * dx);
    const double b_x = -a_x;
    out.v_rhs_riemann[i] = eps * (a[i] * w_xx - a[i] * z_xx);
    out.v_rhs_conserved[i] = eps * v_xx - eps * (a_x * w_x + b_x * z_x);
    out.u_rhs_riemann[i] = eps * 0.5 * (w_xx + z_xx);
    out.u_rhs_conserved[i] = eps * u_xx;
    out.v_residual[i] = out.v_rhs_conserved[i] - out.v_rhs_riemann[i];
    out.u_residual[i] = out.u_rhs_conserved[i] - out.u_rhs_riemann[i];
    out.evaluated[i] = true;
  }
  return out;
}

}  // namespace degenwave

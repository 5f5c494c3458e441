#pragma once

// Turning a config into the objects a run needs.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "degenwave/harness/config.hpp"
#include "degenwave/initdata.hpp"
#include "degenwave/monitors.hpp"
#include "degenwave/solver.hpp"
#include "degenwave/trajectory.hpp"

namespace degenwave::harness {

/// Half-width of a symmetric domain that keeps every disturbance away from the
/// Dirichlet boundary until t_end: data extent + lambda_M t_end + 10 delta + 1.
/// The extent is where the raw invariants differ from their far-field values by
/// more than 1e-12 * scale on a wide probe grid.
inline double auto_half_width(const FamilySpec& family, const ModelParams& p, double t_end, double delta) {
  const GridSpec probe = make_grid(-200.0, 200.0, 40001);
  const InitialData d = sample_family(family, probe, p);
  const RiemannField raw = raw_riemann(d, p);
  const double scale = field_scale(raw.w, raw.z);
  const double tol = 1e-12 * scale;
  const std::size_t n = probe.n;
  std::size_t lo = n;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool off_left = std::abs(raw.w[i] - raw.w.front()) > tol || std::abs(raw.z[i] - raw.z.front()) > tol;
    const bool off_right = std::abs(raw.w[i] - raw.w.back()) > tol || std::abs(raw.z[i] - raw.z.back()) > tol;
    if (off_left) lo = std::min(lo, i);
    if (off_right) hi = std::max(hi, i);
  }
  double extent = 0.0;
  if (lo < n) extent = std::max(extent, std::abs(probe.x(lo)));
  if (hi > 0) extent = std::max(extent, std::abs(probe.x(hi)));
  double vt_max = 0.0;
  for (double v : d.v0) vt_max = std::max(vt_max, pow_nonneg(v, p.theta));
  // the delta shift raises v^theta by up to delta
  const double v_max = pow_nonneg(vt_max + delta, 1.0 / p.theta);
  const double lambda_m = p.theta * pow_nonneg(v_max, p.s_half);
  return std::ceil(extent + lambda_m * t_end + 10.0 * delta + 1.0);
}

/// Grid for a config; auto width uses the largest delta the config will run.
inline GridSpec resolve_grid(const ExperimentConfig& cfg, const ModelParams& p, double largest_delta) {
  if (cfg.grid.auto_width && !cfg.data.samples) {
    const double h = auto_half_width(cfg.data.family, p, cfg.t_end, largest_delta);
    return make_grid(-h, h, cfg.grid.n);
  }
  if (cfg.grid.auto_width) {
    // sampled data: take the sample span as the domain
    std::vector<double> x, v0, v1;
    read_samples(*cfg.data.samples, x, v0, v1);
    if (x.size() < 2) throw ParameterError("sample file needs at least two rows");
    return make_grid(x.front(), x.back(), cfg.grid.n);
  }
  return make_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n);
}

inline InitialData build_initial_data(const ExperimentConfig& cfg, const GridSpec& grid, const ModelParams& p) {
  if (cfg.data.samples) {
    std::vector<double> x, v0, v1;
    read_samples(*cfg.data.samples, x, v0, v1);
    return from_samples(x, v0, v1, grid, cfg.data.u_left);
  }
  return sample_family(cfg.data.family, grid, p);
}

/// Adds the configured corruption to the mollified start state. The bounds
/// (c1, c0, c2) stay those of the unperturbed raw data.
inline void apply_perturbation(MollifiedRiemannData& m, const PerturbConfig& perturb) {
  if (perturb.kind == "none") return;
  for (std::size_t i = 0; i < m.grid.n; ++i) {
    const double r = (m.grid.x(i) - perturb.center) / perturb.width;
    const double bump = perturb.amplitude * std::exp(-r * r);
    if (perturb.kind == "shift_w") m.w0[i] += perturb.amplitude;
    else if (perturb.kind == "shift_z") m.z0[i] += perturb.amplitude;
    else if (perturb.kind == "bump_w") m.w0[i] += bump;
    else if (perturb.kind == "bump_z") m.z0[i] += bump;
  }
}

inline SolveConfig solve_config(const ExperimentConfig& cfg, const MollifiedRiemannData& m, double delta,
                                double epsilon) {
  SolveConfig s;
  s.delta = delta;
  s.epsilon = epsilon;
  s.t_end = cfg.t_end;
  s.cfl = cfg.cfl;
  s.v_tol = cfg.v_tol;
  s.snapshot_times = cfg.snapshot_list();
  s.boundary = boundary_from(m);
  return s;
}

}  // namespace degenwave::harness

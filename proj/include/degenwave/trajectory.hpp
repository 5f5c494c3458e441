#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "degenwave/core.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/grid.hpp"

namespace degenwave {

/// Far-field Dirichlet values reimposed at both boundary nodes every step.
struct BoundaryValues {
  double w_left = 0.0;
  double w_right = 0.0;
  double z_left = 0.0;
  double z_right = 0.0;
};

struct SolveConfig {
  double epsilon = 1e-3;
  double delta = 0.1;
  double t_end = 1.0;
  double cfl = 0.9;
  BoundaryValues boundary;
  /// Times at which snapshots are stored; t = 0 and t_end are always added.
  std::vector<double> snapshot_times;
  /// A node counts as degenerate when v < v_tol.
  double v_tol = 1e-3;
};

/// Default viscosity coupling epsilon = delta^3.
inline double default_epsilon(double delta) { return delta * delta * delta; }

inline void validate(const SolveConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(cfg.delta > 0.0)) throw ParameterError("delta must be positive");
  if (!(cfg.t_end >= 0.0)) throw ParameterError("t_end must be nonnegative");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw ParameterError("cfl must lie in (0, 1)");
}

/// `count` equally spaced snapshot times covering [0, t_end].
inline std::vector<double> uniform_times(double t_end, std::size_t count) {
  std::vector<double> ts;
  if (count < 2) return {0.0, t_end};
  for (std::size_t k = 0; k < count; ++k) {
    ts.push_back(t_end * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return ts;
}

struct Trajectory {
  GridSpec grid;
  std::vector<double> times;
  std::vector<RiemannField> snapshots;
  std::vector<double> dt_history;
  RiemannField final_state;

  std::size_t size() const noexcept { return snapshots.size(); }
};

struct DegeneracyEvent {
  double x = 0.0;
  double t = 0.0;
  std::size_t index = 0;
  double v = 0.0;
};

}  // namespace degenwave

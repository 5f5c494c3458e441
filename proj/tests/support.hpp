#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "degenwave/degenwave.hpp"

namespace testing_support {

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("degenwave_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Mollified family data and a solve on a small symmetric grid.
struct SmallRun {
  degenwave::ModelParams p;
  degenwave::GridSpec grid;
  degenwave::InitialData data;
  degenwave::MollifiedRiemannData init;
  degenwave::SolveConfig cfg;
  degenwave::SolveResult result;
};

inline SmallRun small_run(const degenwave::FamilySpec& family, double s = 3.0, double half_width = 12.0,
                          std::size_t n = 801, double t_end = 1.0, double delta = 0.1) {
  using namespace degenwave;
  SmallRun r;
  r.p = params_new(s);
  r.grid = make_grid(-half_width, half_width, n);
  r.data = sample_family(family, r.grid, r.p);
  r.init = mollify_riemann(r.data, delta, r.p);
  r.cfg.delta = delta;
  r.cfg.epsilon = default_epsilon(delta);
  r.cfg.t_end = t_end;
  r.cfg.snapshot_times = uniform_times(t_end, 11);
  r.cfg.boundary = boundary_from(r.init);
  r.result = run(r.init, r.cfg, r.grid, r.p, MonitorSet::none());
  return r;
}

}  // namespace testing_support

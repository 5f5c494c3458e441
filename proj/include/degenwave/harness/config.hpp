#pragma once

// Experiment configuration: flat "key = value" text with [sections], one file
// per experiment. Unknown sections and keys are rejected so typos surface.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "degenwave/errors.hpp"
#include "degenwave/initdata.hpp"
#include "degenwave/monitors.hpp"

namespace degenwave::harness {

inline constexpr int kSchemaVersion = 1;

struct GridConfig {
  bool auto_width = true;
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n = 2001;
};

struct DataConfig {
  FamilySpec family{"gauss_bump", {}};
  std::optional<std::filesystem::path> samples;  // CSV with columns x,v0,v1
  double u_left = 0.0;
};

/// Deliberate corruption of the mollified data, used for negative controls.
struct PerturbConfig {
  std::string kind = "none";  // none | shift_w | shift_z | bump_w | bump_z
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.5;
};

struct SweepConfig {
  std::vector<double> deltas{0.2, 0.1, 0.05};
  std::vector<double> epsilons;  // empty: delta^3
  /// Scale dx with delta so each member resolves its mollifier equally well;
  /// grid.n applies to the largest delta.
  bool refine_grid = true;
};

struct ThresholdConfig {
  std::string parameter = "amplitude";
  std::vector<double> values;
};

struct EntropyConfig {
  std::vector<double> s_values{2.0, 3.0, 5.0};
  std::size_t order = 64;
  std::vector<std::string> profiles{"sine", "square"};
  std::size_t points = 20;
  std::uint64_t seed = 12345;
  double v_min = 0.2;
  double v_max = 2.0;
  double u_min = -1.0;
  double u_max = 1.0;
  double h = 0.01;
};

struct ExperimentConfig {
  double s = 3.0;
  DataConfig data;
  GridConfig grid;
  double delta = 0.1;
  std::optional<double> epsilon;  // default delta^3
  double t_end = 2.0;
  double cfl = 0.9;
  double v_tol = 1e-3;
  std::vector<double> snapshot_times;  // empty: snapshot_count uniform times
  std::size_t snapshot_count = 81;
  MonitorSet monitors = MonitorSet::all();
  double f_cut = 3.0;
  SweepConfig sweep;
  ThresholdConfig threshold;
  EntropyConfig entropy;
  PerturbConfig perturb;
  std::string out_dir = "out";
  std::size_t workers = 1;
  /// Sections and keys as read, for the report echo.
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> echo;

  double epsilon_for(double d) const { return epsilon ? *epsilon : default_epsilon(d); }
  std::vector<double> snapshot_list() const {
    return snapshot_times.empty() ? uniform_times(t_end, snapshot_count) : snapshot_times;
  }
};

// ---------------------------------------------------------------------------
// Scalar and list parsing

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParameterError(what + ": expected a finite number, got '" + t + "'");
  }
  return value;
}

inline std::size_t parse_count(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParameterError(what + ": expected a nonnegative integer, got '" + t + "'");
  }
  return value;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item, what));
  if (out.empty()) throw ParameterError(what + ": list is empty");
  return out;
}

inline bool parse_bool(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ParameterError(what + ": expected true/false, got '" + t + "'");
}

// ---------------------------------------------------------------------------

namespace detail {

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"schema_version"}},
      {"model", {"s"}},
      {"data",
       {"family", "samples", "u_left", "level", "amplitude", "center", "width", "amplitude2", "center2", "width2",
        "level_left", "level_right", "ramp_center", "ramp_width", "depth", "dip_center", "dip_width", "slack"}},
      {"grid", {"x_min", "x_max", "n", "half_width"}},
      {"solver", {"delta", "epsilon", "t_end", "cfl", "v_tol", "snapshot_times", "snapshot_count"}},
      {"monitors", {"enabled", "hard", "cadence", "f_cut"}},
      {"sweep", {"deltas", "epsilons", "refine_grid"}},
      {"threshold", {"parameter", "values"}},
      {"entropy", {"s_values", "order", "profiles", "points", "seed", "v_min", "v_max", "u_min", "u_max", "h"}},
      {"perturb", {"kind", "amplitude", "center", "width"}},
      {"output", {"dir", "workers"}},
  };
  return keys;
}

inline std::set<std::string> parse_monitor_list(const std::string& text, const std::string& what) {
  std::set<std::string> out;
  const std::string t = trim(text);
  if (t == "all") {
    for (const auto& n : all_monitor_names()) out.insert(n);
    return out;
  }
  if (t == "none") return out;
  const auto& names = all_monitor_names();
  for (const auto& item : split_list(t)) {
    if (std::find(names.begin(), names.end(), item) == names.end()) {
      throw ParameterError(what + ": unknown monitor '" + item + "'");
    }
    out.insert(item);
  }
  return out;
}

}  // namespace detail

/// Build a config from parsed INI text. `base_dir` resolves relative sample paths.
inline ExperimentConfig config_from_tree(const boost::property_tree::ptree& tree,
                                         const std::filesystem::path& base_dir = ".") {
  ExperimentConfig cfg;
  const auto& allowed = detail::allowed_keys();

  for (const auto& [section, node] : tree) {
    if (node.empty() && allowed.count(section) && !section.empty() && node.data().empty()) continue;  // empty section
    if (node.empty()) {
      // top-level key
      if (!allowed.at("").count(section)) throw ParameterError("unknown top-level key '" + section + "'");
      if (section == "schema_version") {
        const auto v = parse_count(node.data(), "schema_version");
        if (v != static_cast<std::size_t>(kSchemaVersion)) {
          throw ParameterError("unsupported schema_version " + std::to_string(v));
        }
      }
      continue;
    }
    auto it = allowed.find(section);
    if (it == allowed.end() || section.empty()) throw ParameterError("unknown section [" + section + "]");
    std::vector<std::pair<std::string, std::string>> echo;
    for (const auto& [key, leaf] : node) {
      const std::string value = trim(leaf.data());
      const std::string what = section + "." + key;
      const bool tolerance_key = section == "monitors" && key.rfind("tol.", 0) == 0;
      if (!it->second.count(key) && !tolerance_key) throw ParameterError("unknown key '" + what + "'");
      echo.emplace_back(key, value);

      if (section == "model") {
        cfg.s = parse_double(value, what);
      } else if (section == "data") {
        if (key == "family") {
          cfg.data.family.name = value;
        } else if (key == "samples") {
          std::filesystem::path path(value);
          cfg.data.samples = path.is_absolute() ? path : base_dir / path;
        } else if (key == "u_left") {
          cfg.data.u_left = parse_double(value, what);
          cfg.data.family.params[key] = cfg.data.u_left;
        } else {
          cfg.data.family.params[key] = parse_double(value, what);
        }
      } else if (section == "grid") {
        if (key == "half_width") {
          if (value == "auto") {
            cfg.grid.auto_width = true;
          } else {
            const double h = parse_double(value, what);
            cfg.grid.auto_width = false;
            cfg.grid.x_min = -h;
            cfg.grid.x_max = h;
          }
        } else if (key == "x_min") {
          cfg.grid.auto_width = false;
          cfg.grid.x_min = parse_double(value, what);
        } else if (key == "x_max") {
          cfg.grid.auto_width = false;
          cfg.grid.x_max = parse_double(value, what);
        } else {
          cfg.grid.n = parse_count(value, what);
        }
      } else if (section == "solver") {
        if (key == "delta") cfg.delta = parse_double(value, what);
        else if (key == "epsilon") cfg.epsilon = parse_double(value, what);
        else if (key == "t_end") cfg.t_end = parse_double(value, what);
        else if (key == "cfl") cfg.cfl = parse_double(value, what);
        else if (key == "v_tol") cfg.v_tol = parse_double(value, what);
        else if (key == "snapshot_times") cfg.snapshot_times = parse_double_list(value, what);
        else cfg.snapshot_count = parse_count(value, what);
      } else if (section == "monitors") {
        if (key == "enabled") cfg.monitors.enabled = detail::parse_monitor_list(value, what);
        else if (key == "hard") cfg.monitors.hard = detail::parse_monitor_list(value, what);
        else if (key == "cadence") cfg.monitors.cadence = parse_count(value, what);
        else if (key == "f_cut") cfg.f_cut = parse_double(value, what);
        else {
          const std::string name = key.substr(4);
          detail::parse_monitor_list(name, what);
          cfg.monitors.tolerances[name] = parse_double(value, what);
        }
      } else if (section == "sweep") {
        if (key == "deltas") cfg.sweep.deltas = parse_double_list(value, what);
        else if (key == "epsilons") cfg.sweep.epsilons = parse_double_list(value, what);
        else cfg.sweep.refine_grid = parse_bool(value, what);
      } else if (section == "threshold") {
        if (key == "parameter") cfg.threshold.parameter = value;
        else cfg.threshold.values = parse_double_list(value, what);
      } else if (section == "entropy") {
        auto& e = cfg.entropy;
        if (key == "s_values") e.s_values = parse_double_list(value, what);
        else if (key == "order") e.order = parse_count(value, what);
        else if (key == "profiles") e.profiles = split_list(value);
        else if (key == "points") e.points = parse_count(value, what);
        else if (key == "seed") e.seed = parse_count(value, what);
        else if (key == "v_min") e.v_min = parse_double(value, what);
        else if (key == "v_max") e.v_max = parse_double(value, what);
        else if (key == "u_min") e.u_min = parse_double(value, what);
        else if (key == "u_max") e.u_max = parse_double(value, what);
        else e.h = parse_double(value, what);
      } else if (section == "perturb") {
        if (key == "kind") cfg.perturb.kind = value;
        else if (key == "amplitude") cfg.perturb.amplitude = parse_double(value, what);
        else if (key == "center") cfg.perturb.center = parse_double(value, what);
        else cfg.perturb.width = parse_double(value, what);
      } else if (section == "output") {
        if (key == "dir") cfg.out_dir = value;
        else cfg.workers = parse_count(value, what);
      }
    }
    cfg.echo.emplace_back(section, std::move(echo));
  }
  return cfg;
}

/// Checks that do not depend on which subcommand consumes the config.
inline void validate(const ExperimentConfig& cfg) {
  if (!(cfg.s > 1.0)) throw ParameterError("model.s must exceed 1");
  if (!(cfg.delta > 0.0)) throw ParameterError("solver.delta must be positive");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw ParameterError("solver.epsilon must be positive");
  if (!(cfg.t_end > 0.0)) throw ParameterError("solver.t_end must be positive");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw ParameterError("solver.cfl must lie in (0, 1)");
  if (cfg.grid.n < 16) throw ParameterError("grid.n must be at least 16");
  if (!cfg.grid.auto_width && !(cfg.grid.x_max > cfg.grid.x_min)) throw ParameterError("grid.x_max must exceed x_min");
  if (cfg.snapshot_times.empty() && cfg.snapshot_count < 2) throw ParameterError("solver.snapshot_count must be >= 2");
  for (double t : cfg.snapshot_times) {
    if (t < 0.0 || t > cfg.t_end) throw ParameterError("snapshot times must lie in [0, t_end]");
  }
  cfg.monitors.validate();
  if (cfg.sweep.deltas.empty()) throw ParameterError("sweep.deltas must be nonempty");
  for (std::size_t i = 0; i < cfg.sweep.deltas.size(); ++i) {
    if (!(cfg.sweep.deltas[i] > 0.0)) throw ParameterError("sweep.deltas must be positive");
    if (i > 0 && !(cfg.sweep.deltas[i] < cfg.sweep.deltas[i - 1])) {
      throw ParameterError("sweep.deltas must be strictly decreasing");
    }
  }
  if (!cfg.sweep.epsilons.empty() && cfg.sweep.epsilons.size() != cfg.sweep.deltas.size()) {
    throw ParameterError("sweep.epsilons must match sweep.deltas in length");
  }
  const auto& kinds = std::vector<std::string>{"none", "shift_w", "shift_z", "bump_w", "bump_z"};
  if (std::find(kinds.begin(), kinds.end(), cfg.perturb.kind) == kinds.end()) {
    throw ParameterError("unknown perturb.kind '" + cfg.perturb.kind + "'");
  }
  if (!(cfg.perturb.width > 0.0)) throw ParameterError("perturb.width must be positive");
  if (cfg.workers < 1) throw ParameterError("output.workers must be >= 1");
}

inline ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".") {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParameterError("config parse error at line " + std::to_string(e.line()) + ": " + e.message());
  }
  auto cfg = config_from_tree(tree, base_dir);
  validate(cfg);
  return cfg;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

/// Reads "x,v0,v1" CSV (header line required).
inline void read_samples(const std::filesystem::path& path, std::vector<double>& x, std::vector<double>& v0,
                         std::vector<double>& v1) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,v0,v1") {
    throw IoError("'" + path.string() + "': first line must be the header x,v0,v1");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cols = split_list(line);
    if (cols.size() != 3) throw IoError("'" + path.string() + "' line " + std::to_string(row) + ": expected 3 columns");
    const std::string where = path.string() + ":" + std::to_string(row);
    x.push_back(parse_double(cols[0], where));
    v0.push_back(parse_double(cols[1], where));
    v1.push_back(parse_double(cols[2], where));
  }
}

}  // namespace degenwave::harness

#pragma once

// Report persistence: CSV tables and a structured-text summary
// ("key = value" under [sections], schema_version first). Numbers are written
// with 17 significant digits so identical runs give identical bytes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "degenwave/core.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/harness/config.hpp"
#include "degenwave/monitors.hpp"
#include "degenwave/trajectory.hpp"

namespace degenwave::harness {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(std::size_t x) { return std::to_string(x); }
inline std::string fmt(bool b) { return b ? "true" : "false"; }

/// Values may not contain newlines; they are replaced by spaces.
class Summary {
 public:
  Summary() { kv("schema_version", std::to_string(kSchemaVersion)); }

  Summary& section(const std::string& name) {
    out_ << "\n[" << name << "]\n";
    return *this;
  }
  Summary& kv(const std::string& key, const std::string& value) {
    std::string v = value;
    for (char& c : v) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    out_ << key << " = " << v << "\n";
    return *this;
  }
  Summary& kv(const std::string& key, const char* value) { return kv(key, std::string(value)); }
  Summary& kv(const std::string& key, double value) { return kv(key, fmt(value)); }
  Summary& kv(const std::string& key, std::size_t value) { return kv(key, fmt(value)); }
  Summary& kv(const std::string& key, int value) { return kv(key, std::to_string(value)); }
  Summary& kv(const std::string& key, bool value) { return kv(key, fmt(value)); }
  Summary& kv(const std::string& key, const std::optional<double>& value) {
    return value ? kv(key, *value) : kv(key, "none");
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

/// 64-bit FNV-1a, used for run ids derived from the config echo.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string config_echo_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& [section, keys] : cfg.echo) {
    for (const auto& [k, v] : keys) os << section << "." << k << "=" << v << "\n";
  }
  return os.str();
}

inline void echo_config(Summary& s, const ExperimentConfig& cfg) {
  for (const auto& [section, keys] : cfg.echo) {
    s.section("config." + section);
    for (const auto& [k, v] : keys) s.kv(k, v);
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Minimal CSV builder; cells are written verbatim, so callers keep them free of commas.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) : columns_(header.size()) { row_strings(header); }

  template <class... Cells>
  Csv& row(const Cells&... cells) {
    static_assert(sizeof...(Cells) > 0);
    std::vector<std::string> r{cell(cells)...};
    return row_strings(r);
  }
  Csv& row_strings(const std::vector<std::string>& r) {
    if (r.size() != columns_) throw std::logic_error("CSV row width does not match header");
    for (std::size_t i = 0; i < r.size(); ++i) out_ << (i ? "," : "") << r[i];
    out_ << "\n";
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(std::size_t x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(bool b) { return fmt(b); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(const std::optional<double>& x) { return x ? fmt(*x) : std::string(""); }

  std::size_t columns_;
  std::ostringstream out_;
};

/// Long-format snapshot table with columns t,x,w,z,v,u.
inline std::string snapshots_csv(const Trajectory& traj, const ModelParams& p) {
  Csv csv({"t", "x", "w", "z", "v", "u"});
  for (const auto& snap : traj.snapshots) {
    for (std::size_t i = 0; i < snap.size(); ++i) {
      csv.row(snap.t, traj.grid.x(i), snap.w[i], snap.z[i], v_clamped(snap.w[i], snap.z[i], p),
              0.5 * (snap.w[i] + snap.z[i]));
    }
  }
  return csv.str();
}

inline std::string state_csv(const RiemannField& f, const GridSpec& grid, const ModelParams& p) {
  Csv csv({"t", "x", "w", "z", "v", "u"});
  for (std::size_t i = 0; i < f.size(); ++i) {
    csv.row(f.t, grid.x(i), f.w[i], f.z[i], v_clamped(f.w[i], f.z[i], p), 0.5 * (f.w[i] + f.z[i]));
  }
  return csv.str();
}

inline std::string sanitize_cell(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

inline std::string verdicts_csv(const std::vector<Verdict>& verdicts, const GridSpec& grid) {
  Csv csv({"name", "hard", "evaluated", "passed", "worst", "tolerance", "t", "x", "detail"});
  for (const auto& v : verdicts) {
    csv.row(v.name, v.hard, v.evaluated, v.passed, v.worst, v.tolerance, v.t, grid.x(v.index),
            sanitize_cell(v.detail));
  }
  return csv.str();
}

inline std::string f_series_csv(const FReport& f) {
  Csv csv({"t", "F", "predicted", "F1", "F2", "F3", "F1_bound", "F2_bound", "F3_bound", "margin"});
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    csv.row(f.times[k], f.f[k], f.slope * f.times[k], f.f1[k], f.f2[k], f.f3[k], f.f1_bound[k], f.c_m,
            f.f3_bound[k], f.margin[k]);
  }
  return csv.str();
}

inline std::string weak_residual_csv(const WeakResidualTable& table) {
  Csv csv({"xc", "rx", "tc", "rt", "r1", "r2"});
  for (const auto& row : table.rows) csv.row(row.phi.xc, row.phi.rx, row.phi.tc, row.phi.rt, row.r1, row.r2);
  return csv.str();
}

inline void write_verdicts(Summary& s, const std::vector<Verdict>& verdicts, const GridSpec& grid) {
  // l1_derivative_bounds contributes two verdicts; suffix them to keep section names unique
  std::map<std::string, int> seen;
  for (const auto& v : verdicts) {
    const int k = seen[v.name]++;
    s.section("monitor." + v.name + (k ? "." + std::to_string(k) : ""));
    s.kv("hard", v.hard).kv("evaluated", v.evaluated).kv("passed", v.passed);
    s.kv("worst", v.worst).kv("tolerance", v.tolerance).kv("t", v.t).kv("x", grid.x(v.index));
    s.kv("detail", v.detail.empty() ? std::string("-") : v.detail);
  }
}

}  // namespace degenwave::harness

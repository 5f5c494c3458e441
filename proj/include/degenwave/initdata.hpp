#pragma once

// Initial data: analytic families, raw samples, the delta-shifted mollified
// Riemann data the viscous solver starts from, the admissibility condition
//     v1 +/- theta v0^{(s-1)/2} v0' <= 0
// and the threshold quantity T = int v1 + v0^theta(+inf) + v0^theta(-inf).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degenwave/core.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/grid.hpp"

namespace degenwave {

struct InitialData {
  GridSpec grid;
  std::vector<double> v0;
  std::vector<double> v1;
  std::vector<double> u0;
  double u_left = 0.0;
  std::string family = "samples";
};

/// Bounds c1 <= w0 <= c0 <= z0 <= c2 of the raw Riemann data.
struct RegionBounds {
  double c1 = 0.0;
  double c0 = 0.0;
  double c2 = 0.0;
};

struct MollifiedRiemannData {
  GridSpec grid;
  std::vector<double> w0;
  std::vector<double> z0;
  double delta = 0.0;
  std::vector<double> raw_w0;
  std::vector<double> raw_z0;
  /// Empty when max raw w0 > min raw z0: no c0 separates the invariants.
  std::optional<RegionBounds> bounds;
  /// Measured max(-w0', -z0') after mollification (the slope bound M(delta)).
  double max_slope = 0.0;

  RiemannField as_field() const { return RiemannField{w0, z0, 0.0}; }
};

/// Cumulative trapezoid integral of v1 from the left boundary, starting at u_left.
inline std::vector<double> build_u0(std::span<const double> v1, const GridSpec& grid, double u_left = 0.0) {
  std::vector<double> u(v1.size(), u_left);
  const double dx = grid.dx();
  for (std::size_t i = 1; i < v1.size(); ++i) u[i] = u[i - 1] + 0.5 * dx * (v1[i - 1] + v1[i]);
  return u;
}

inline std::vector<double> vtheta_profile(std::span<const double> v0, const ModelParams& p) {
  std::vector<double> out(v0.size());
  for (std::size_t i = 0; i < v0.size(); ++i) {
    if (!(v0[i] >= 0.0)) throw DomainError("v0 must be nonnegative (index " + std::to_string(i) + ")");
    out[i] = pow_nonneg(v0[i], p.theta);
  }
  return out;
}

/// Unmollified Riemann data w0 = u0 - v0^theta, z0 = u0 + v0^theta.
inline RiemannField raw_riemann(const InitialData& d, const ModelParams& p) {
  return riemann_from_conserved(ConservedField{d.v0, d.u0, 0.0}, p);
}

// ---------------------------------------------------------------------------
// Analytic families

/// Named family plus numeric parameters, e.g. {"gauss_bump", {{"amplitude", -1}}}.
struct FamilySpec {
  std::string name;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

namespace detail {

struct Bump {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;

  // normalised Gaussian: integrates to amplitude
  double density(double x) const {
    const double r = (x - center) / width;
    return amplitude * std::exp(-r * r) / (width * std::sqrt(std::numbers::pi));
  }
  double cumulative(double x) const { return amplitude * 0.5 * (1.0 + std::erf((x - center) / width)); }
};

// v0 shape with closed-form (v0^theta)' and running total variation of v0^theta.
struct Shape {
  enum class Kind { kConstant, kRamp, kDip } kind = Kind::kConstant;
  double level = 1.0;        // constant level, ramp left level, dip far level
  double level_right = 1.0;  // ramp right level
  double center = 0.0;
  double width = 1.0;
  double depth = 0.0;  // dip depth

  double v0(double x) const {
    const double r = (x - center) / width;
    switch (kind) {
      case Kind::kConstant: return level;
      case Kind::kRamp: return level_right + (level - level_right) * 0.5 * std::erfc(r);
      case Kind::kDip: return std::max(0.0, level - depth * std::exp(-r * r));
    }
    return level;
  }
  double dv0(double x) const {
    const double r = (x - center) / width;
    switch (kind) {
      case Kind::kConstant: return 0.0;
      case Kind::kRamp: return -(level - level_right) * std::exp(-r * r) / (width * std::sqrt(std::numbers::pi));
      case Kind::kDip: return 2.0 * depth * r * std::exp(-r * r) / width;
    }
    return 0.0;
  }
  double dvtheta(double x, const ModelParams& p) const {
    const double v = v0(x);
    return p.theta * pow_nonneg(v, p.theta - 1.0) * dv0(x);
  }
  // int_{-inf}^x |(v0^theta)'|
  double total_variation(double x, const ModelParams& p) const {
    const double vt = pow_nonneg(v0(x), p.theta);
    switch (kind) {
      case Kind::kConstant: return 0.0;
      case Kind::kRamp: return std::abs(vt - pow_nonneg(level, p.theta));
      case Kind::kDip: {
        const double far = pow_nonneg(level, p.theta);
        const double bottom = pow_nonneg(std::max(0.0, level - depth), p.theta);
        if (x <= center) return far - vt;
        return (far - bottom) + (vt - bottom);
      }
    }
    return 0.0;
  }
};

}  // namespace detail

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"constant", "gauss_bump", "two_bumps", "ramp", "gauss_dip"};
  return names;
}

/// Sample an analytic family on the grid. Every family uses
///     v1 = -(1 + slack) |(v0^theta)'| + sum_k amplitude_k g_k
/// with normalised Gaussians g_k, so the data are admissible whenever
/// slack >= 0 and all amplitudes are <= 0. u0 is the closed-form antiderivative.
inline InitialData sample_family(const FamilySpec& spec, const GridSpec& grid, const ModelParams& p) {
  using detail::Bump;
  using detail::Shape;
  Shape shape;
  std::vector<Bump> bumps;
  const double level = spec.get("level", 1.0);
  if (spec.name == "constant") {
    shape.level = level;
  } else if (spec.name == "gauss_bump" || spec.name == "two_bumps") {
    shape.level = level;
    bumps.push_back({spec.get("amplitude", -1.0), spec.get("center", 0.0), spec.get("width", 1.0)});
    if (spec.name == "two_bumps") {
      bumps.push_back({spec.get("amplitude2", -0.5), spec.get("center2", 2.0), spec.get("width2", 0.5)});
    }
  } else if (spec.name == "ramp") {
    shape.kind = Shape::Kind::kRamp;
    shape.level = spec.get("level_left", 1.5);
    shape.level_right = spec.get("level_right", 0.5);
    shape.center = spec.get("ramp_center", 0.0);
    shape.width = spec.get("ramp_width", 0.7);
    bumps.push_back({spec.get("amplitude", -0.25), spec.get("center", 0.0), spec.get("width", 1.4)});
  } else if (spec.name == "gauss_dip") {
    shape.kind = Shape::Kind::kDip;
    shape.level = level;
    shape.depth = spec.get("depth", 0.5);
    shape.center = spec.get("dip_center", 0.0);
    shape.width = spec.get("dip_width", 0.8);
    const double amplitude = spec.get("amplitude", 0.0);
    if (amplitude != 0.0) bumps.push_back({amplitude, spec.get("center", 0.0), spec.get("width", 1.6)});
  } else {
    throw ParameterError("unknown data family '" + spec.name + "'");
  }
  if (shape.level < 0.0 || shape.level_right < 0.0 || shape.depth > shape.level + 1e-15) {
    throw ParameterError("family '" + spec.name + "' would produce negative v0");
  }
  for (const auto& b : bumps) {
    if (!(b.width > 0.0)) throw ParameterError("bump width must be positive");
  }
  const double slack = spec.get("slack", 0.0);
  const double u_left = spec.get("u_left", 0.0);

  InitialData d;
  d.grid = grid;
  d.family = spec.name;
  d.u_left = u_left;
  d.v0.resize(grid.n);
  d.v1.resize(grid.n);
  d.u0.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    d.v0[i] = shape.v0(x);
    double v1 = -(1.0 + slack) * std::abs(shape.dvtheta(x, p));
    double u0 = u_left - (1.0 + slack) * shape.total_variation(x, p);
    for (const auto& b : bumps) {
      v1 += b.density(x);
      u0 += b.cumulative(x);
    }
    d.v1[i] = v1;
    d.u0[i] = u0;
  }
  return d;
}

/// Raw sampled columns. Samples are linearly interpolated onto the grid when
/// the abscissae differ; u0 is the cumulative trapezoid integral of v1.
inline InitialData from_samples(std::span<const double> x, std::span<const double> v0,
                                std::span<const double> v1, const GridSpec& grid, double u_left = 0.0) {
  if (x.size() != v0.size() || x.size() != v1.size() || x.size() < 2) {
    throw ParameterError("sample columns x, v0, v1 must have equal length >= 2");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ParameterError("sample abscissae must be strictly increasing");
  }
  auto resample = [&](std::span<const double> f) {
    std::vector<double> out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double xi = grid.x(i);
      if (xi <= x.front()) {
        out[i] = f.front();
      } else if (xi >= x.back()) {
        out[i] = f.back();
      } else {
        const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xi) - x.begin());
        const std::size_t lo = hi - 1;
        const double frac = (xi - x[lo]) / (x[hi] - x[lo]);
        out[i] = (1.0 - frac) * f[lo] + frac * f[hi];
      }
    }
    return out;
  };
  InitialData d;
  d.grid = grid;
  d.v0 = resample(v0);
  d.v1 = resample(v1);
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (!(d.v0[i] >= 0.0)) throw DomainError("sampled v0 must be nonnegative");
  }
  d.u_left = u_left;
  d.u0 = build_u0(d.v1, grid, u_left);
  return d;
}

// ---------------------------------------------------------------------------
// Mollification

/// Discrete weights of K(x) ~ (1 - (x/delta)^2)^4 on |x| < delta, summing to 1.
inline std::vector<double> mollifier_weights(double delta, double dx) {
  const auto half = static_cast<std::size_t>(std::floor(delta / dx));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double r = (static_cast<double>(j) - static_cast<double>(half)) * dx / delta;
    const double b = std::max(0.0, 1.0 - r * r);
    k[j] = b * b * b * b;
    sum += k[j];
  }
  for (double& kj : k) kj /= sum;
  return k;
}

/// Convolution with constant extension past both ends.
inline std::vector<double> convolve_clamped(std::span<const double> f, std::span<const double> kernel) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  std::vector<double> out(f.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
      const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(i + j, 0, n - 1);
      acc += kernel[static_cast<std::size_t>(j + half)] * f[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

inline std::optional<RegionBounds> region_bounds(std::span<const double> raw_w0, std::span<const double> raw_z0) {
  const double w_min = *std::min_element(raw_w0.begin(), raw_w0.end());
  const double w_max = *std::max_element(raw_w0.begin(), raw_w0.end());
  const double z_min = *std::min_element(raw_z0.begin(), raw_z0.end());
  const double z_max = *std::max_element(raw_z0.begin(), raw_z0.end());
  if (w_max > z_min) return std::nullopt;
  // c0 = max w0 is the tightest choice on the w side; any value up to min z0 works.
  return RegionBounds{w_min, w_max, z_max};
}

inline MollifiedRiemannData mollify_riemann(const InitialData& d, double delta, const ModelParams& p) {
  if (!(delta > 0.0)) throw ParameterError("mollification width delta must be positive");
  const RiemannField raw = raw_riemann(d, p);
  const auto kernel = mollifier_weights(delta, d.grid.dx());
  MollifiedRiemannData m;
  m.grid = d.grid;
  m.delta = delta;
  m.w0 = convolve_clamped(raw.w, kernel);
  m.z0 = convolve_clamped(raw.z, kernel);
  for (double& w : m.w0) w -= delta;
  for (double& z : m.z0) z += delta;
  m.raw_w0 = raw.w;
  m.raw_z0 = raw.z;
  m.bounds = region_bounds(raw.w, raw.z);
  const double dx = d.grid.dx();
  for (std::size_t i = 0; i + 1 < m.w0.size(); ++i) {
    m.max_slope = std::max({m.max_slope, -(m.w0[i + 1] - m.w0[i]) / dx, -(m.z0[i + 1] - m.z0[i]) / dx});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Admissibility

struct AdmissibilityViolation {
  std::size_t index = 0;
  double x = 0.0;
  int sign = +1;  // which of v1 +/- theta v0^{(s-1)/2} v0' was violated
  double value = 0.0;
  double allowance = 0.0;
};

struct AdmissibilityReport {
  bool admissible = true;
  double tolerance = 0.0;
  std::vector<AdmissibilityViolation> violations;
};

inline double data_scale(const InitialData& d, const ModelParams& p) {
  double scale = 1.0;
  for (std::size_t i = 0; i < d.v0.size(); ++i) {
    scale = std::max({scale, pow_nonneg(d.v0[i], p.theta), std::abs(d.v1[i]), std::abs(d.u0[i])});
  }
  return scale;
}

/// Checks v1 +/- theta v0^{(s-1)/2} v0' <= tol at interior nodes with v0'
/// from central differences. A negative tol selects 1e-10 * data scale.
/// Each node is also allowed twice the leading central-difference truncation
/// term theta v0^{(s-1)/2} dx^2 max|v0'''| / 6: the condition is closed, and data
/// that satisfy it with equality must not be rejected for discretisation error.
inline AdmissibilityReport check_admissible(const InitialData& d, const ModelParams& p, double tol = -1.0) {
  AdmissibilityReport report;
  report.tolerance = tol >= 0.0 ? tol : 1e-10 * data_scale(d, p);
  const std::size_t n = d.v0.size();
  const double dx = d.grid.dx();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dv = (d.v0[i + 1] - d.v0[i - 1]) / (2.0 * dx);
    const double speed = p.theta * pow_nonneg(d.v0[i], p.s_half);
    // the remainder is dx^2 v0'''(xi) / 6 for some xi within one cell, so take
    // the largest third difference over the neighbouring nodes
    double third = 0.0;
    for (std::size_t j = std::max<std::size_t>(i, 3) - 1; j <= i + 1 && j + 2 < n; ++j) {
      third = std::max(third, std::abs(d.v0[j + 2] - 2.0 * d.v0[j + 1] + 2.0 * d.v0[j - 1] - d.v0[j - 2]) /
                                  (2.0 * dx * dx * dx));
    }
    const double allowance = report.tolerance + speed * dx * dx * third / 3.0;
    for (int sign : {+1, -1}) {
      const double value = d.v1[i] + sign * speed * dv;
      if (value > allowance) {
        report.admissible = false;
        report.violations.push_back({i, d.grid.x(i), sign, value, allowance});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Threshold

enum class Classification { kExistence, kNonexistence };

inline const char* to_string(Classification c) {
  return c == Classification::kExistence ? "existence" : "nonexistence";
}

struct ThresholdReport {
  double T = 0.0;
  double integral_v1 = 0.0;
  double vtheta_left = 0.0;
  double vtheta_right = 0.0;
  double quadrature_error = 0.0;  // Richardson estimate for int v1
  Classification classification = Classification::kExistence;
  bool admissible = false;
  std::optional<std::pair<double, double>> witness;  // (x, y) with w0(x) > z0(y)
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kTailNodes = 5;

/// T = int v1 + v0^theta(+inf) + v0^theta(-inf), tails read as the mean of the
/// outermost five nodes. T counts as nonnegative when T >= -quadrature_error:
/// the condition is closed and T is only known to quadrature accuracy.
inline ThresholdReport threshold(const InitialData& d, const ModelParams& p) {
  ThresholdReport r;
  const std::size_t n = d.v0.size();
  const auto vt = vtheta_profile(d.v0, p);
  const std::size_t tail = std::min(kTailNodes, n / 2);
  double left = 0.0;
  double right = 0.0;
  for (std::size_t k = 0; k < tail; ++k) {
    left += vt[k];
    right += vt[n - 1 - k];
  }
  r.vtheta_left = left / static_cast<double>(tail);
  r.vtheta_right = right / static_cast<double>(tail);
  const double scale = data_scale(d, p);
  for (std::size_t k = 0; k < tail; ++k) {
    if (std::abs(vt[k] - r.vtheta_left) > 1e-8 * scale) {
      r.warnings.push_back("left tail of v0 is not flat; v0^theta(-inf) extrapolated");
      break;
    }
  }
  for (std::size_t k = 0; k < tail; ++k) {
    if (std::abs(vt[n - 1 - k] - r.vtheta_right) > 1e-8 * scale) {
      r.warnings.push_back("right tail of v0 is not flat; v0^theta(+inf) extrapolated");
      break;
    }
  }
  const double dx = d.grid.dx();
  r.integral_v1 = trapezoid(d.v1, dx);
  {
    // coarse rule on every other node over [x_0, x_{2m}]
    const std::size_t last = (n - 1) % 2 == 0 ? n - 1 : n - 2;
    std::vector<double> coarse;
    for (std::size_t i = 0; i <= last; i += 2) coarse.push_back(d.v1[i]);
    const double fine = trapezoid(std::span<const double>(d.v1.data(), last + 1), dx);
    r.quadrature_error = std::abs(fine - trapezoid(coarse, 2.0 * dx)) / 3.0;
  }
  r.T = r.integral_v1 + r.vtheta_left + r.vtheta_right;
  r.classification = r.T >= -r.quadrature_error ? Classification::kExistence : Classification::kNonexistence;
  r.admissible = check_admissible(d, p).admissible;

  if (r.classification == Classification::kNonexistence) {
    const RiemannField raw = raw_riemann(d, p);
    const auto wmax = std::max_element(raw.w.begin(), raw.w.end());
    // rightmost minimum of z0
    std::size_t zi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (raw.z[i] <= raw.z[zi]) zi = i;
    }
    const auto wi = static_cast<std::size_t>(wmax - raw.w.begin());
    if (*wmax > raw.z[zi]) r.witness = std::make_pair(d.grid.x(wi), d.grid.x(zi));
  }
  return r;
}

}  // namespace degenwave

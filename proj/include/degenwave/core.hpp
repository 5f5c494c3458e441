#pragma once

// Model constants, Riemann/conserved transforms and characteristic speeds for
//
//     v_t - u_x = 0,   u_t - c (v^s)_x = 0,   v >= 0,
//
// with theta = (s+1)/2, c = theta^2/s, Riemann invariants w = u - v^theta,
// z = u + v^theta and eigenvalues -/+ theta v^{(s-1)/2}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "degenwave/errors.hpp"

namespace degenwave {

/// Smallest admissible distance of the exponent s above 1.
inline constexpr double kExponentFloor = 1e-12;

/// Relative tolerance below which a negative half-gap (z - w)/2 is read as vacuum.
inline constexpr double kClampTolerance = 1e-12;

struct ModelParams {
  double s = 3.0;
  double theta = 2.0;                // (s+1)/2
  double c = 4.0 / 3.0;              // theta^2 / s
  double lambda_exp = -0.75;         // -(s+3)/(2(s+1)), weight exponent of the kinetic kernel
  double s_half = 1.0;               // (s-1)/2, exponent of the characteristic speed
};

inline ModelParams params_new(double s) {
  if (!std::isfinite(s) || s <= 1.0 + kExponentFloor) {
    throw DomainError("exponent s must exceed 1 (got " + std::to_string(s) + ")");
  }
  ModelParams p;
  p.s = s;
  p.theta = 0.5 * (s + 1.0);
  p.c = p.theta * p.theta / s;
  p.lambda_exp = -(s + 3.0) / (2.0 * (s + 1.0));
  p.s_half = 0.5 * (s - 1.0);
  return p;
}

/// x^p for x >= 0 with an exact zero at x == 0.
inline double pow_nonneg(double x, double p) {
  if (x == 0.0) return 0.0;
  return std::exp(p * std::log(x));
}

struct RiemannField {
  std::vector<double> w;
  std::vector<double> z;
  double t = 0.0;

  std::size_t size() const noexcept { return w.size(); }
};

struct ConservedField {
  std::vector<double> v;
  std::vector<double> u;
  double t = 0.0;

  std::size_t size() const noexcept { return v.size(); }
};

struct Eigenvalues {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

inline Eigenvalues eigenvalues(double v, const ModelParams& p) {
  if (!(v >= 0.0)) throw DomainError("eigenvalues: v must be nonnegative");
  const double speed = p.theta * pow_nonneg(v, p.s_half);
  return {-speed, speed};
}

/// Scale used to make the vacuum clamp relative: max(1, |w|, |z|).
inline double riemann_scale(double w, double z) {
  return std::max({1.0, std::abs(w), std::abs(z)});
}

/// v^theta from a Riemann pair, with the vacuum clamp applied. Returns a
/// negative value only when z < w beyond the clamp tolerance.
inline double vtheta_from_riemann(double w, double z) {
  const double half_gap = 0.5 * (z - w);
  if (half_gap >= 0.0) return half_gap;
  if (half_gap > -kClampTolerance * riemann_scale(w, z)) return 0.0;
  return half_gap;
}

/// v from a Riemann pair for states that may have crossed the vacuum line;
/// z <= w maps to v = 0 without error.
inline double v_clamped(double w, double z, const ModelParams& p) {
  const double vt = 0.5 * (z - w);
  if (vt <= 0.0) return 0.0;
  return pow_nonneg(vt, 1.0 / p.theta);
}

inline RiemannField riemann_from_conserved(const ConservedField& f, const ModelParams& p) {
  if (f.u.size() != f.v.size()) throw DomainError("riemann_from_conserved: v and u lengths differ");
  RiemannField r;
  r.t = f.t;
  r.w.resize(f.size());
  r.z.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f.v[i] >= 0.0)) {
      throw DomainError("riemann_from_conserved: negative v at index " + std::to_string(i));
    }
    const double vt = pow_nonneg(f.v[i], p.theta);
    r.w[i] = f.u[i] - vt;
    r.z[i] = f.u[i] + vt;
  }
  return r;
}

inline ConservedField conserved_from_riemann(const RiemannField& f, const ModelParams& p) {
  if (f.z.size() != f.w.size()) throw DomainError("conserved_from_riemann: w and z lengths differ");
  ConservedField c;
  c.t = f.t;
  c.v.resize(f.size());
  c.u.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double vt = vtheta_from_riemann(f.w[i], f.z[i]);
    if (vt < 0.0) {
      throw AdmissibilityError(
          "conserved_from_riemann: z < w at index " + std::to_string(i), i);
    }
    c.v[i] = pow_nonneg(vt, 1.0 / p.theta);
    c.u[i] = 0.5 * (f.w[i] + f.z[i]);
  }
  return c;
}

/// Conserved view that tolerates states past the vacuum line (v clamped to 0).
inline ConservedField conserved_clamped(const RiemannField& f, const ModelParams& p) {
  ConservedField c;
  c.t = f.t;
  c.v.resize(f.size());
  c.u.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    c.v[i] = v_clamped(f.w[i], f.z[i], p);
    c.u[i] = 0.5 * (f.w[i] + f.z[i]);
  }
  return c;
}

/// max(1, max|entries|) over both components.
inline double field_scale(std::span<const double> a, std::span<const double> b) {
  double m = 1.0;
  for (double x : a) m = std::max(m, std::abs(x));
  for (double x : b) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace degenwave

#pragma once

#include <cmath>
#include <vector>

namespace degenwave {

/// phi(x, t) = psi((x - xc)/rx) psi((t - tc)/rt) with the C-infinity bump
/// psi(r) = exp(1 - 1/(1 - r^2)) on |r| < 1, psi(0) = 1.
struct TestFunction {
  double xc = 0.0;
  double rx = 1.0;
  double tc = 0.0;
  double rt = 1.0;

  static double bump(double r) {
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
  }
  static double bump_derivative(double r) {
    if (std::abs(r) >= 1.0) return 0.0;
    const double q = 1.0 - r * r;
    return bump(r) * (-2.0 * r / (q * q));
  }

  double operator()(double x, double t) const { return bump((x - xc) / rx) * bump((t - tc) / rt); }
  double dx(double x, double t) const { return bump_derivative((x - xc) / rx) / rx * bump((t - tc) / rt); }
  double dt(double x, double t) const { return bump((x - xc) / rx) * bump_derivative((t - tc) / rt) / rt; }

  bool x_support_within(double a, double b) const { return xc - rx >= a && xc + rx <= b; }
};

/// Fixed battery of five test functions centred on [-3, 3], each active on
/// t in [0, 0.75 t_end).
inline std::vector<TestFunction> default_test_battery(double t_end) {
  std::vector<TestFunction> fns;
  for (double xc : {-3.0, -1.5, 0.0, 1.5, 3.0}) fns.push_back({xc, 1.5, 0.0, 0.75 * t_end});
  return fns;
}

}  // namespace degenwave

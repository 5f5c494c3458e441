#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "degenwave/errors.hpp"

namespace degenwave {

/// Uniform node-centred grid on [x_min, x_max] with n nodes.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n = 16;

  double dx() const noexcept { return (x_max - x_min) / static_cast<double>(n - 1); }
  double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx(); }

  std::vector<double> nodes() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
  }
};

inline constexpr std::size_t kMinGridNodes = 16;

inline GridSpec make_grid(double x_min, double x_max, std::size_t n) {
  if (n < kMinGridNodes) {
    throw ParameterError("grid needs at least 16 nodes (got " + std::to_string(n) + ")");
  }
  if (!(x_max > x_min)) throw ParameterError("grid needs x_max > x_min");
  return GridSpec{x_min, x_max, n};
}

/// Composite trapezoid rule on a uniform grid.
inline double trapezoid(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * dx;
}

/// Trapezoid rule on a non-uniform abscissa.
inline double trapezoid(std::span<const double> f, std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) sum += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  return sum;
}

/// Trapezoid integral of f over [a, b], with partial cells handled by linear
/// interpolation. Assumes grid.x_min <= a <= b <= grid.x_max.
inline double trapezoid_between(std::span<const double> f, const GridSpec& grid, double a, double b);

/// Linear interpolation of nodal data; constant extension outside the grid.
inline double interpolate(std::span<const double> f, const GridSpec& grid, double x) {
  if (x <= grid.x_min) return f.front();
  if (x >= grid.x_max) return f.back();
  const double r = (x - grid.x_min) / grid.dx();
  const auto i = std::min(static_cast<std::size_t>(r), grid.n - 2);
  const double frac = r - static_cast<double>(i);
  return (1.0 - frac) * f[i] + frac * f[i + 1];
}

inline double trapezoid_between(std::span<const double> f, const GridSpec& grid, double a, double b) {
  if (b <= a) return 0.0;
  const double dx = grid.dx();
  const auto first = static_cast<std::size_t>(std::ceil((a - grid.x_min) / dx - 1e-12));
  const auto last = static_cast<std::size_t>(std::floor((b - grid.x_min) / dx + 1e-12));
  if (first > last || last >= grid.n) {
    // a and b fall within a single cell
    return 0.5 * (interpolate(f, grid, a) + interpolate(f, grid, b)) * (b - a);
  }
  double sum = 0.0;
  const double xa = grid.x(first);
  sum += 0.5 * (interpolate(f, grid, a) + f[first]) * (xa - a);
  for (std::size_t i = first; i < last; ++i) sum += 0.5 * (f[i] + f[i + 1]) * dx;
  const double xb = grid.x(last);
  sum += 0.5 * (f[last] + interpolate(f, grid, b)) * (b - xb);
  return sum;
}

}  // namespace degenwave

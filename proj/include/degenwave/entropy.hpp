#pragma once

// Kinetic entropy pairs generated by a profile f:
//
//   eta0(v, u) =  int_{-1}^{1} f(u + v^theta tau) (1 - tau^2)^lambda dtau
//   q0(v, u)   = -int_{-1}^{1} f(u + v^theta tau) theta v^{(s-1)/2} tau (1 - tau^2)^lambda dtau
//
// with lambda = -(s+3)/(2(s+1)) in (-1, 0). The singular weight is built into
// a Gauss-Jacobi rule with both exponents equal to lambda.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "degenwave/core.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/grid.hpp"
#include "degenwave/test_function.hpp"
#include "degenwave/trajectory.hpp"

namespace degenwave {

/// Nodes and weights for int_{-1}^{1} g(tau) (1 - tau^2)^lambda dtau.
struct JacobiQuadrature {
  double lambda = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const noexcept { return nodes.size(); }

  template <class G>
  double integrate(G&& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * g(nodes[i]);
    return sum;
  }
};

inline constexpr std::size_t kDefaultQuadratureOrder = 64;

/// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
/// orthonormal Jacobi(lambda, lambda) polynomials. The diagonal vanishes for
/// equal exponents; the off-diagonal is sqrt(k (k + 2 lambda) / ((2k + 2 lambda)^2 - 1)).
inline JacobiQuadrature make_jacobi_quadrature(double lambda, std::size_t order = kDefaultQuadratureOrder) {
  if (!(lambda > -1.0)) throw DomainError("Jacobi weight exponent must exceed -1");
  if (order < 1) throw ParameterError("quadrature order must be >= 1");
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double denom = (2.0 * kk + 2.0 * lambda) * (2.0 * kk + 2.0 * lambda) - 1.0;
    sub(k - 1) = std::sqrt(kk * (kk + 2.0 * lambda) / denom);
  }
  // mu0 = int (1 - tau^2)^lambda = 2^{2 lambda + 1} Gamma(lambda + 1)^2 / Gamma(2 lambda + 2)
  const double log_mu0 = (2.0 * lambda + 1.0) * std::log(2.0) + 2.0 * std::lgamma(lambda + 1.0) -
                         std::lgamma(2.0 * lambda + 2.0);
  const double mu0 = std::exp(log_mu0);

  JacobiQuadrature q;
  q.lambda = lambda;
  q.nodes.resize(order);
  q.weights.resize(order);
  if (n == 1) {
    q.nodes[0] = 0.0;
    q.weights[0] = mu0;
    return q;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigensolve failed");
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    q.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    q.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  // symmetric weight: enforce exact odd symmetry of the nodes
  for (std::size_t i = 0; i < order / 2; ++i) {
    const std::size_t j = order - 1 - i;
    const double x = 0.5 * (q.nodes[j] - q.nodes[i]);
    const double w = 0.5 * (q.weights[i] + q.weights[j]);
    q.nodes[i] = -x;
    q.nodes[j] = x;
    q.weights[i] = q.weights[j] = w;
  }
  if (order % 2 == 1) q.nodes[order / 2] = 0.0;
  return q;
}

inline JacobiQuadrature make_jacobi_quadrature(const ModelParams& p, std::size_t order = kDefaultQuadratureOrder) {
  return make_jacobi_quadrature(p.lambda_exp, order);
}

/// Smooth profile f with its first two derivatives.
struct TestProfile {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

namespace profiles {
inline TestProfile one() {
  return {"one", [](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}
inline TestProfile identity() {
  return {"identity", [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}
inline TestProfile square() {
  return {"square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }, [](double) { return 2.0; }};
}
inline TestProfile sine() {
  return {"sine", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
          [](double x) { return -std::sin(x); }};
}
inline std::vector<TestProfile> library() { return {one(), identity(), square(), sine()}; }

inline TestProfile by_name(const std::string& name) {
  for (auto& prof : library()) {
    if (prof.name == name) return prof;
  }
  throw ParameterError("unknown test profile '" + name + "'");
}
}  // namespace profiles

/// d0 = int_{-1}^{1} (1 - tau^2)^lambda dtau, the weight sum of the rule.
inline double d0(const ModelParams&, const JacobiQuadrature& q) {
  double sum = 0.0;
  for (double w : q.weights) sum += w;
  return sum;
}

inline double eta0(double v, double u, const TestProfile& f, const ModelParams& p, const JacobiQuadrature& q) {
  if (!(v >= 0.0)) throw DomainError("eta0: v must be nonnegative");
  const double half_width = pow_nonneg(v, p.theta);
  return q.integrate([&](double tau) { return f.f(u + half_width * tau); });
}

inline double q0(double v, double u, const TestProfile& f, const ModelParams& p, const JacobiQuadrature& q) {
  if (!(v >= 0.0)) throw DomainError("q0: v must be nonnegative");
  if (v == 0.0) return 0.0;
  const double half_width = pow_nonneg(v, p.theta);
  const double speed = p.theta * pow_nonneg(v, p.s_half);
  return -speed * q.integrate([&](double tau) { return tau * f.f(u + half_width * tau); });
}

struct PairResidual {
  double r1 = 0.0;  // q_u + eta_v
  double r2 = 0.0;  // q_v + theta^2 v^{s-1} eta_u
};

/// Central-difference residuals of q_u = -eta_v and q_v = -theta^2 v^{s-1} eta_u.
inline PairResidual entropy_pair_residual(double v, double u, const TestProfile& f, const ModelParams& p,
                                          const JacobiQuadrature& q, double h) {
  if (!(h > 0.0)) throw ParameterError("difference step h must be positive");
  if (!(v > 2.0 * h)) throw DomainError("entropy_pair_residual needs v > 2h");
  const double inv = 1.0 / (2.0 * h);
  const double q_u = (q0(v, u + h, f, p, q) - q0(v, u - h, f, p, q)) * inv;
  const double q_v = (q0(v + h, u, f, p, q) - q0(v - h, u, f, p, q)) * inv;
  const double eta_u = (eta0(v, u + h, f, p, q) - eta0(v, u - h, f, p, q)) * inv;
  const double eta_v = (eta0(v + h, u, f, p, q) - eta0(v - h, u, f, p, q)) * inv;
  const double stiffness = p.theta * p.theta * pow_nonneg(v, p.s - 1.0);
  return {q_u + eta_v, q_v + stiffness * eta_u};
}

/// eta_vv - theta^2 v^{s-1} eta_uu by central differences.
inline double entropy_equation_residual(double v, double u, const TestProfile& f, const ModelParams& p,
                                        const JacobiQuadrature& q, double h) {
  if (!(v > 2.0 * h)) throw DomainError("entropy_equation_residual needs v > 2h");
  const double e = eta0(v, u, f, p, q);
  const double e_vv = (eta0(v + h, u, f, p, q) - 2.0 * e + eta0(v - h, u, f, p, q)) / (h * h);
  const double e_uu = (eta0(v, u + h, f, p, q) - 2.0 * e + eta0(v, u - h, f, p, q)) / (h * h);
  return e_vv - p.theta * p.theta * pow_nonneg(v, p.s - 1.0) * e_uu;
}

/// Weak entropy production per test function:
///   P(phi) = iint eta0 phi_t + q0 phi_x dx dt + int eta0(x, 0) phi(x, 0) dx.
inline std::vector<double> entropy_production(const Trajectory& traj, const TestProfile& f, const ModelParams& p,
                                              const JacobiQuadrature& q, const std::vector<TestFunction>& fns) {
  const auto& grid = traj.grid;
  const std::size_t n = grid.n;
  const auto xs = grid.nodes();
  std::vector<std::vector<double>> eta(traj.size(), std::vector<double>(n));
  std::vector<std::vector<double>> flux(traj.size(), std::vector<double>(n));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& snap = traj.snapshots[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double v = v_clamped(snap.w[i], snap.z[i], p);
      const double u = 0.5 * (snap.w[i] + snap.z[i]);
      eta[k][i] = eta0(v, u, f, p, q);
      flux[k][i] = q0(v, u, f, p, q);
    }
  }
  std::vector<double> out;
  std::vector<double> integrand(n), slice(traj.size());
  for (const auto& phi : fns) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.times[k];
      for (std::size_t i = 0; i < n; ++i) integrand[i] = eta[k][i] * phi.dt(xs[i], t) + flux[k][i] * phi.dx(xs[i], t);
      slice[k] = trapezoid(integrand, grid.dx());
    }
    double value = trapezoid(slice, traj.times);
    for (std::size_t i = 0; i < n; ++i) integrand[i] = eta[0][i] * phi(xs[i], 0.0);
    value += trapezoid(integrand, grid.dx());
    out.push_back(value);
  }
  return out;
}

}  // namespace degenwave

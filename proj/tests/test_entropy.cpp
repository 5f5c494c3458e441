#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "degenwave/entropy.hpp"

using namespace degenwave;

namespace {

// Reference values computed independently with mpmath at 30 digits.
struct BetaOracle {
  double s;
  double half;         // B(1/2, lambda + 1)
  double three_halves; // B(3/2, lambda + 1)
};
const BetaOracle kBeta[] = {
    {2.0, 7.28595194366274, 5.46446395774706},
    {3.0, 5.24411510858424, 3.49607673905616},
    {5.0, 4.20654631597636, 2.52392778958582},
};

}  // namespace

TEST(JacobiQuadrature, D0MatchesBetaOracle) {
  for (const auto& o : kBeta) {
    const ModelParams p = params_new(o.s);
    const auto q = make_jacobi_quadrature(p);
    EXPECT_NEAR(d0(p, q), o.half, 1e-12) << o.s;
    EXPECT_NEAR(d0(p, q), std::beta(0.5, p.lambda_exp + 1.0), 1e-12) << o.s;
  }
}

TEST(JacobiQuadrature, SecondMomentMatchesBetaOracle) {
  for (const auto& o : kBeta) {
    const ModelParams p = params_new(o.s);
    const auto q = make_jacobi_quadrature(p);
    EXPECT_NEAR(q.integrate([](double t) { return t * t; }), o.three_halves, 1e-12) << o.s;
  }
}

TEST(JacobiQuadrature, ExactForEvenMomentsUpToDegree2nMinus1) {
  const auto q = make_jacobi_quadrature(-0.75, 12);
  for (int k = 0; k <= 11; ++k) {
    const double moment = q.integrate([k](double t) { return std::pow(t, 2 * k); });
    EXPECT_NEAR(moment, std::beta(k + 0.5, 0.25), 1e-12 * std::beta(k + 0.5, 0.25)) << k;
    EXPECT_NEAR(q.integrate([k](double t) { return std::pow(t, 2 * k + 1); }), 0.0, 1e-14);
  }
}

TEST(JacobiQuadrature, NodesSymmetricInsideAndWeightsPositive) {
  for (std::size_t order : {1u, 2u, 7u, 16u, 64u}) {
    const auto q = make_jacobi_quadrature(-0.6, order);
    ASSERT_EQ(q.order(), order);
    for (std::size_t i = 0; i < order; ++i) {
      EXPECT_GT(q.nodes[i], -1.0);
      EXPECT_LT(q.nodes[i], 1.0);
      EXPECT_GT(q.weights[i], 0.0);
      EXPECT_EQ(q.nodes[i], -q.nodes[order - 1 - i]);
      if (i > 0) {
        EXPECT_GT(q.nodes[i], q.nodes[i - 1]);
      }
    }
  }
}

TEST(JacobiQuadrature, RejectsInvalidInput) {
  EXPECT_THROW(make_jacobi_quadrature(-1.0, 8), DomainError);
  EXPECT_THROW(make_jacobi_quadrature(-0.5, 0), ParameterError);
}

TEST(EntropyPair, FrozenValues) {
  const ModelParams p = params_new(3.0);
  const auto q = make_jacobi_quadrature(p);
  // q0 for f(xi) = xi at v = 1, u = 0 is -theta B(3/2, lambda + 1)
  EXPECT_NEAR(q0(1.0, 0.0, profiles::identity(), p, q), -6.99215347811232, 1e-12);
  EXPECT_NEAR(eta0(0.7, 0.3, profiles::sine(), p, q), 1.42782268134, 1e-10);
  EXPECT_NEAR(q0(0.7, 0.3, profiles::sine(), p, q), -2.21345699921, 1e-10);
}

TEST(EntropyPair, TrivialProfiles) {
  const ModelParams p = params_new(2.0);
  const auto q = make_jacobi_quadrature(p);
  for (double v : {0.0, 0.4, 1.7}) {
    EXPECT_NEAR(eta0(v, -0.3, profiles::one(), p, q), d0(p, q), 1e-13);
    EXPECT_NEAR(q0(v, -0.3, profiles::one(), p, q), 0.0, 1e-13);
    // f = xi: eta0 = u d0 and q0 = -theta v^{(s-1)/2} v^theta B(3/2, lambda + 1)
    EXPECT_NEAR(eta0(v, -0.3, profiles::identity(), p, q), -0.3 * d0(p, q), 1e-13);
    EXPECT_NEAR(q0(v, -0.3, profiles::identity(), p, q),
                -p.theta * pow_nonneg(v, p.s_half) * pow_nonneg(v, p.theta) * 5.46446395774706, 1e-11);
  }
  EXPECT_THROW(eta0(-0.1, 0.0, profiles::one(), p, q), DomainError);
  EXPECT_THROW(profiles::by_name("cube"), ParameterError);
}

TEST(EntropyPair, ResidualIsSecondOrderInH) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uv(0.3, 2.0), uu(-1.0, 1.0);
  for (double s : {2.0, 3.0, 5.0}) {
    const ModelParams p = params_new(s);
    const auto q = make_jacobi_quadrature(p);
    for (int k = 0; k < 5; ++k) {
      const double v = uv(rng), u = uu(rng);
      const auto coarse = entropy_pair_residual(v, u, profiles::sine(), p, q, 0.02);
      const auto fine = entropy_pair_residual(v, u, profiles::sine(), p, q, 0.01);
      EXPECT_NEAR(coarse.r1 / fine.r1, 4.0, 0.1) << s << " " << v << " " << u;
      EXPECT_NEAR(coarse.r2 / fine.r2, 4.0, 0.1) << s << " " << v << " " << u;
    }
  }
}

TEST(EntropyPair, SatisfiesTheEntropyEquation) {
  const ModelParams p = params_new(3.0);
  const auto q = make_jacobi_quadrature(p);
  const double coarse = entropy_equation_residual(1.1, 0.2, profiles::sine(), p, q, 0.02);
  const double fine = entropy_equation_residual(1.1, 0.2, profiles::sine(), p, q, 0.01);
  EXPECT_LT(std::abs(fine), 1e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.2);
  EXPECT_THROW(entropy_equation_residual(0.01, 0.0, profiles::sine(), p, q, 0.01), DomainError);
}

#include <gtest/gtest.h>

#include <cmath>

#include "isozonoid/ball_barthe.hpp"
#include "test_util.hpp"

using namespace isozonoid;
using namespace isozonoid::bb;

TEST(DecompositionSystem, FromMeasureAndValidation) {
  const auto sys = DecompositionSystem::from_measure(equiangular_measure(3));
  EXPECT_EQ(sys.size(), 3);
  for (const auto& v : sys.vectors()) EXPECT_NEAR(v.squaredNorm(), 2.0 / 3.0, 1e-15);
  EXPECT_CODE(DecompositionSystem(2, {unit(2, 0), 0.5 * unit(2, 1)}), ErrorCode::NotDecomposition);
}

TEST(SubsetExpansion, HexagonClosedForm) {
  // det(sum t_i v_i v_i^T) = (t1 t2 + t1 t3 + t2 t3) / 3 for the hexagonal system.
  const auto sys = DecompositionSystem::from_measure(equiangular_measure(3));
  const std::vector<double> t = {1.0, 2.0, 3.0};
  const auto ex = subset_expansion(sys, t);
  EXPECT_NEAR(ex.det_value, 11.0 / 3.0, 1e-13);
  EXPECT_NEAR(ex.expansion_sum, 11.0 / 3.0, 1e-13);
  EXPECT_TRUE(ex.identity_holds);
  ASSERT_EQ(ex.terms.size(), 3u);
  for (const auto& term : ex.terms) EXPECT_NEAR(term.det_squared, 1.0 / 3.0, 1e-14);
  const auto b = ball_inequality(sys, t);
  EXPECT_NEAR(b.rhs, std::pow(6.0, 2.0 / 3.0), 1e-13);
  EXPECT_TRUE(b.pass);
}

TEST(SubsetExpansion, RandomSystemsSatisfyCauchyBinet) {
  Rng rng(23);
  std::lognormal_distribution<double> w(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 2, k = n + 1 + trial % 4;
    const auto sys = DecompositionSystem::random(n, k, rng);
    std::vector<double> t(k);
    for (auto& x : t) x = w(rng);
    const auto ex = subset_expansion(sys, t);
    EXPECT_TRUE(ex.identity_holds);
    double sum_sq = 0.0;
    for (const auto& term : ex.terms) sum_sq += term.det_squared;
    EXPECT_NEAR(sum_sq, 1.0, 1e-12);
    EXPECT_TRUE(ball_inequality(sys, t).pass);
  }
}

TEST(BallInequality, EqualityForOrthonormalBasis) {
  const DecompositionSystem sys(3, {unit(3, 0), unit(3, 1), unit(3, 2)});
  const auto r = ball_inequality(sys, {2.0, 0.5, 7.0});
  EXPECT_NEAR(r.lhs, 7.0, 1e-13);
  EXPECT_NEAR(r.rhs, 7.0, 1e-13);
  EXPECT_TRUE(r.pass);
  EXPECT_CODE(ball_inequality(sys, {1.0, -1.0, 1.0}), ErrorCode::InvalidArgument);
  EXPECT_CODE(ball_inequality(sys, {1.0, 1.0}), ErrorCode::InvalidArgument);
}

TEST(ThetaStar, StrengthenedInequality) {
  const auto hex = DecompositionSystem::from_measure(equiangular_measure(3));
  const auto eq = theta_star(hex, {1.0, 1.0, 1.0});
  EXPECT_NEAR(eq.theta, 1.0, 1e-12);
  EXPECT_TRUE(eq.strengthened_pass);
  Rng rng(31);
  std::lognormal_distribution<double> w(0.0, 1.5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 2, k = n + 1 + trial % 3;
    const auto sys = DecompositionSystem::random(n, k, rng);
    std::vector<double> t(k);
    for (auto& x : t) x = w(rng);
    const auto r = theta_star(sys, t);
    EXPECT_GE(r.theta, 1.0);
    EXPECT_TRUE(r.strengthened_pass) << r.lhs << " " << r.rhs;
  }
  EXPECT_CODE(theta_star(DecompositionSystem(2, {unit(2, 0), unit(2, 1)}), {1.0, 2.0}), ErrorCode::KTooSmall);
}

TEST(XabGap, Examples) {
  const auto r = xab_gap(2.0, 1.0, 0.5);
  EXPECT_NEAR(r.lhs, 0.25, 1e-15);
  EXPECT_NEAR(r.rhs, 0.18, 1e-15);
  EXPECT_TRUE(r.pass);
  // The minimum over x sits at x = (a + b)/(a^2 + b^2).
  for (double a : {0.3, 1.0, 2.5})
    for (double b : {0.2, 0.9, 4.0}) {
      const double x = (a + b) / (a * a + b * b);
      EXPECT_TRUE(xab_gap(a, b, x).pass) << a << " " << b;
    }
  EXPECT_CODE(xab_gap(0.0, 1.0, 1.0), ErrorCode::InvalidArgument);
}

TEST(VectorEstimate, Examples) {
  const auto hex = equiangular_measure(3);
  std::vector<Vec> u;
  std::vector<double> c, theta;
  Rng rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const auto& a : hex.atoms()) {
    u.push_back(a.u.coords());
    c.push_back(a.c);
    theta.push_back(g(rng));
  }
  const auto r = vector_estimate(u, c, theta);
  EXPECT_TRUE(r.pass);
  // Equality when theta_i = <x, u_i>.
  const Vec x = make_vec({0.4, -1.1});
  for (std::size_t i = 0; i < u.size(); ++i) theta[i] = x.dot(u[i]);
  const auto e = vector_estimate(u, c, theta);
  EXPECT_NEAR(e.z_norm_sq, x.squaredNorm(), 1e-13);
  EXPECT_NEAR(e.weighted_sum, x.squaredNorm(), 1e-13);
  c[0] *= 2;
  EXPECT_CODE(vector_estimate(u, c, theta), ErrorCode::NotDecomposition);
}

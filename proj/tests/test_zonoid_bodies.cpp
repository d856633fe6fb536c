#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "isozonoid/zonoid_bodies.hpp"
#include "test_util.hpp"

using namespace isozonoid;

namespace {

double lp_ball_volume(int n, double p) {
  return std::pow(2.0, n) * std::pow(std::tgamma(1.0 + 1.0 / p), n) / std::tgamma(1.0 + n / p);
}

double lp_norm(const Vec& x, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

// Gauge of a planar body from its support function by an angular sweep.
double gauge_from_support_2d(const std::function<double(const Vec&)>& h, const Vec& x, int m = 200000) {
  double g = 0.0;
  for (int j = 0; j < m; ++j) {
    const double t = 2 * kPi * j / m;
    const Vec v = make_vec({std::cos(t), std::sin(t)});
    g = std::max(g, x.dot(v) / h(v));
  }
  return g;
}

}  // namespace

TEST(Support, CrossMeasureClosedForms) {
  const auto nu = cross_measure(3);
  const Vec v = make_vec({0.3, -1.2, 0.5});
  EXPECT_NEAR(support_Zp(nu, 1.0, v), 2.0, 1e-14);
  EXPECT_NEAR(support_Zp(nu, 2.0, v), v.norm(), 1e-14);
  EXPECT_NEAR(support_Zp(nu, 3.0, v), lp_norm(v, 3.0), 1e-14);
  EXPECT_NEAR(support_Zp(nu, kInf, v), 1.2, 1e-14);
  EXPECT_NEAR(norm_Zp_star(nu, 4.0, v), lp_norm(v, 4.0), 1e-14);
  EXPECT_NEAR(norm_Zp_star(nu, kInf, v), 1.2, 1e-14);
}

TEST(Support, HexagonAtP2IsEuclidean) {
  const auto hex = equiangular_measure(3);
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Vec v = random_unit_vector(2, rng) * 1.7;
    EXPECT_NEAR(support_Zp(hex, 2.0, v), 1.7, 1e-13);
  }
}

TEST(Support, RejectsBadInput) {
  EXPECT_CODE(support_Zp(cross_measure(2), 0.5, unit(2, 0)), ErrorCode::InvalidArgument);
  const auto line = AtomicMeasure::symmetrized(2, {{SphereVector(unit(2, 0)), 0.5}});
  EXPECT_CODE(body_Zp(line, 2.0), ErrorCode::DegenerateMeasure);
  Mat a(2, 2);
  a << 1, 0, 0, 1;
  EXPECT_CODE(BodyRep::from_halfspaces(a, Vec::Ones(2)), ErrorCode::UnboundedBody);
  EXPECT_CODE(BodyRep::from_vertices({unit(2, 0), -unit(2, 0)}), ErrorCode::DegenerateBody);
}

TEST(Volume, ExactPolytopes) {
  // Z_1(nu_3) is the cube [-1, 1]^3.
  const auto z1 = volume(body_Zp(cross_measure(3), 1.0));
  EXPECT_NEAR(z1.value, 8.0, 1e-12);
  EXPECT_EQ(z1.abs_error, 0.0);
  EXPECT_EQ(z1.method, VolumeMethod::Exact);
  EXPECT_NEAR(volume(body_Zp(cross_measure(3), kInf)).value, 8.0 / 6.0, 1e-12);
  EXPECT_NEAR(volume(body_Zp_star(cross_measure(3), 1.0)).value, 8.0 / 6.0, 1e-12);
  EXPECT_NEAR(volume(body_Zp_star(cross_measure(2), kInf)).value, 4.0, 1e-12);

  // Hexagon: Z_inf is the regular hexagon, Z_1 the zonotope of three generators of length 2/3.
  const auto hex = equiangular_measure(3);
  EXPECT_NEAR(volume(body_Zp(hex, kInf)).value, 3 * std::sqrt(3.0) / 2, 1e-12);
  const double z1hex = 4 * 3 * (4.0 / 9.0) * std::sin(kPi / 3);
  EXPECT_NEAR(volume(body_Zp(hex, 1.0)).value, z1hex, 1e-12);
  EXPECT_NEAR(zonotope_volume(zonotope_generators(hex)), z1hex, 1e-12);
  // Polar of a regular hexagon with circumradius R has circumradius 1/(R cos(pi/6)).
  const double r = 1 / std::cos(kPi / 6);
  EXPECT_NEAR(volume(body_Zp_star(hex, kInf)).value, 3 * std::sqrt(3.0) / 2 * r * r, 1e-12);
}

TEST(Volume, GaugeQuadratureMatchesLpBalls) {
  for (int n : {2, 3})
    for (double p : {1.5, 3.0, 5.0}) {
      const auto v = volume(body_Zp_star(cross_measure(n), p));
      EXPECT_EQ(v.method, VolumeMethod::Quadrature);
      EXPECT_NEAR(v.value, lp_ball_volume(n, p), 1e-6 * lp_ball_volume(n, p)) << n << " " << p;
      EXPECT_NEAR(v.value, reference_volume(ReferenceKind::ZStar, n, p), 1e-6 * v.value);
    }
}

TEST(Volume, SupportSandwichMatchesDualLpBalls) {
  for (int n : {2, 3})
    for (double p : {1.5, 3.0}) {
      const double q = conjugate_exponent(p);
      const auto v = volume(body_Zp(cross_measure(n), p));
      EXPECT_EQ(v.method, VolumeMethod::Quadrature);
      EXPECT_NEAR(v.value, lp_ball_volume(n, q), std::max(v.abs_error, 1e-9) + 2e-3 * v.value) << n << " " << p;
      EXPECT_LE(v.abs_error, 1e-2 * v.value);
    }
}

TEST(Volume, ReferenceValues) {
  EXPECT_NEAR(reference_volume(ReferenceKind::Z, 2, 2.0), kPi, 1e-14);
  EXPECT_NEAR(reference_volume(ReferenceKind::Z, 3, 2.0), 4 * kPi / 3, 1e-14);
  EXPECT_NEAR(reference_volume(ReferenceKind::Z, 3, 1.0), 8.0, 1e-14);
  EXPECT_NEAR(reference_volume(ReferenceKind::Z, 3, kInf), 8.0 / 6.0, 1e-14);
  EXPECT_NEAR(reference_volume(ReferenceKind::ZStar, 2, 1.0), 2.0, 1e-14);
  EXPECT_NEAR(reference_volume(ReferenceKind::ZStar, 3, 2.0), 4 * kPi / 3, 1e-13);
  EXPECT_NEAR(reference_volume(ReferenceKind::ZStar, 3, kInf), 8.0, 1e-14);
  EXPECT_NEAR(reference_volume(ReferenceKind::Z, 2, 4.0), lp_ball_volume(2, 4.0 / 3.0), 2e-3);
}

TEST(Volume, BallIntegralAgreesWithQuadrature) {
  const auto hex = equiangular_measure(3);
  for (double p : {1.0, 3.0}) {
    const auto mc = volume_Zp_star_ball_integral(hex, p, 42, 400000);
    const double ref = p == 1.0 ? volume(body_Zp_star(hex, 1.0)).value : volume(body_Zp_star(hex, p)).value;
    EXPECT_NEAR(mc.value, ref, std::max(mc.abs_error, 1e-3 * ref)) << p;
  }
  const auto cube = volume_Zp_star_ball_integral(cross_measure(3), 2.0, 1, 400000);
  EXPECT_NEAR(cube.value, 4 * kPi / 3, std::max(cube.abs_error, 1e-3));
}

TEST(Polar, VolumeProductAndInvolution) {
  const auto hex = equiangular_measure(3);
  const auto k = body_Zp(hex, 1.0);
  const auto kk = polar(polar(k));
  EXPECT_NEAR(volume(kk).value, volume(k).value, 1e-12);
  // Cube and cross-polytope in R^3: product 8 * 4/3.
  EXPECT_NEAR(volume(k).value * volume(polar(k)).value,
              volume(body_Zp(hex, 1.0)).value * volume(body_Zp_star(hex, 1.0)).value, 1e-12);
  EXPECT_NEAR(volume(polar(body_Zp(cross_measure(3), 1.0))).value, 4.0 / 3.0, 1e-12);
}

TEST(LinearImage, ScalesByDeterminant) {
  Mat phi(2, 2);
  phi << 2, 1, 0.5, 1.5;
  const double d = std::abs(phi.determinant());
  const auto hex = equiangular_measure(3);
  EXPECT_NEAR(volume(body_Zp(hex, kInf).linear_image(phi)).value, d * 3 * std::sqrt(3.0) / 2, 1e-12);
  EXPECT_NEAR(volume(body_Zp_star(hex, kInf).linear_image(phi)).value, d * volume(body_Zp_star(hex, kInf)).value,
              1e-12);
  const auto g = body_Zp_star(cross_measure(2), 3.0);
  EXPECT_NEAR(volume(g.linear_image(phi)).value, d * lp_ball_volume(2, 3.0), 1e-6);
}

TEST(Mp, CrossMeasureGivesLpBall) {
  const auto nu = cross_measure(3);
  const Vec x = make_vec({0.4, -0.7, 1.1});
  for (double p : {1.5, 2.0, 4.0}) {
    const auto m = mp_gauge(nu, p, x);
    EXPECT_NEAR(m.gauge, lp_norm(x, p), 1e-9) << p;
    // Representation x = sum c_i theta_i u_i.
    Vec recon = Vec::Zero(3);
    for (std::size_t i = 0; i < nu.size(); ++i) recon += nu.atoms()[i].c * m.theta[i] * nu.atoms()[i].u.coords();
    EXPECT_LE((recon - x).norm(), 1e-8);
  }
}

TEST(Mp, EqualsZqForDiscreteMeasures) {
  // M_p(mu) = Z_{p*}(mu): compare the M_p gauge with the gauge of Z_q from its support function.
  const auto hex = equiangular_measure(3, 0.2);
  for (double p : {1.5, 3.0}) {
    const double q = conjugate_exponent(p);
    const auto h = [&](const Vec& v) { return support_Zp(hex, q, v); };
    for (const Vec& x : {make_vec({1, 0}), make_vec({0.3, 0.9}), make_vec({-0.8, 0.25})})
      EXPECT_NEAR(mp_gauge(hex, p, x).gauge, gauge_from_support_2d(h, x), 1e-6) << p;
  }
}

TEST(Mp, EndpointBodies) {
  const auto hex = equiangular_measure(3);
  EXPECT_NEAR(volume(mp_body(hex, 1.0)).value, 3 * std::sqrt(3.0) / 2, 1e-12);
  EXPECT_NEAR(volume(mp_body(hex, kInf)).value, volume(body_Zp(hex, 1.0)).value, 1e-12);
  EXPECT_NEAR(volume(mp_body(cross_measure(2), 3.0)).value, lp_ball_volume(2, 3.0), 1e-6);
}

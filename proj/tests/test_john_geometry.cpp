#include <gtest/gtest.h>

#include <cmath>

#include "isozonoid/john_geometry.hpp"
#include "isozonoid/stability_harness.hpp"
#include "test_util.hpp"

using namespace isozonoid;

namespace {

BodyRep rectangle(double a, double b) {
  return BodyRep::from_vertices({make_vec({a, b}), make_vec({-a, b}), make_vec({-a, -b}), make_vec({a, -b})});
}

// Area of {y in 0.1 B^2 : <y,u> >= 1/30, <y,u0> >= 1/30, <y,u-u0> >= |u-u0|/120} by midpoint cells.
double xi_area_by_grid(const Vec& u, const Vec& u0, int m = 4000) {
  const Vec d = u - u0;
  const double h = 0.2 / m;
  long hits = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Vec y = make_vec({-0.1 + (i + 0.5) * h, -0.1 + (j + 0.5) * h});
      if (y.norm() <= 0.1 && y.dot(u) >= 1.0 / 30 && y.dot(u0) >= 1.0 / 30 && y.dot(d) >= d.norm() / 120) ++hits;
    }
  return hits * h * h;
}

}  // namespace

TEST(JohnEllipsoid, CubeIsTheUnitBall) {
  for (int n : {2, 3}) {
    const auto j = john_ellipsoid(cube(n));
    EXPECT_LE((j.ellipsoid.A - Mat::Identity(n, n)).norm(), 1e-8);
    EXPECT_NEAR(j.ellipsoid.volume(), special::unit_ball_volume(n), 1e-7);
    EXPECT_LE(j.residual, 1e-8);
    EXPECT_LE(j.containment, 1e-10);
    EXPECT_EQ(static_cast<int>(j.contacts.size()), n);
  }
}

TEST(JohnEllipsoid, RectangleAndHexagon) {
  const auto r = john_ellipsoid(rectangle(2, 1));
  Mat expect(2, 2);
  expect << 0.25, 0, 0, 1;
  EXPECT_LE((r.ellipsoid.A - expect).norm(), 1e-8);
  // Regular hexagon with unit circumradius: inscribed circle of radius cos(pi/6).
  const auto h = john_ellipsoid(body_Zp(equiangular_measure(3), kInf));
  EXPECT_LE((h.ellipsoid.A - Mat::Identity(2, 2) * (4.0 / 3.0)).norm(), 1e-8);
  EXPECT_EQ(h.contacts.size(), 3u);
}

TEST(JohnEllipsoid, LinearCovariance) {
  Mat phi(3, 3);
  phi << 1.5, 0.2, 0.0, -0.3, 0.8, 0.1, 0.0, 0.4, 1.1;
  const auto j = john_ellipsoid(cube(3).linear_image(phi));
  const Mat expect = (phi * phi.transpose()).inverse();
  EXPECT_LE((j.ellipsoid.A - expect).norm(), 1e-7);
  EXPECT_TRUE(j.ellipsoid.contains(Vec::Zero(3)));
}

TEST(JohnEllipsoid, Errors) {
  const auto tri = BodyRep::from_vertices({make_vec({1, 0}), make_vec({-1, 1}), make_vec({-1, -1})}, false);
  EXPECT_CODE(john_ellipsoid(tri), ErrorCode::InvalidArgument);
  const auto off = BodyRep::from_vertices({make_vec({1, 1}), make_vec({2, 1}), make_vec({2, 2}), make_vec({1, 2})});
  EXPECT_CODE(john_ellipsoid(off), ErrorCode::DegenerateBody);
  EXPECT_CODE(john_ellipsoid(body_Zp_star(cross_measure(2), 3.0)), ErrorCode::InvalidArgument);
}

TEST(ContactMeasure, NormalizedBodies) {
  const auto mu = contact_measure(cube(3));
  EXPECT_EQ(mu.size(), 6u);
  EXPECT_TRUE(check_isotropy(mu).is_isotropic);
  for (const auto& a : mu.atoms()) EXPECT_NEAR(a.c, 0.5, 1e-10);

  Mat map;
  const auto k = john_normalize(body_Zp(equiangular_measure(3), kInf), &map);
  const auto hex = contact_measure(k);
  EXPECT_EQ(hex.size(), 6u);
  for (const auto& a : hex.atoms()) EXPECT_NEAR(a.c, 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(std::abs(map.determinant()), std::sqrt(4.0 / 3.0 * 4.0 / 3.0), 1e-8);
}

TEST(ContactMeasure, Errors) {
  EXPECT_CODE(contact_measure(cube(2, 2.0)), ErrorCode::NoContacts);
  // Two facet pairs at unit distance that are not orthogonal cannot carry isotropic weights.
  Mat a(4, 2);
  a << 1, 0, -1, 0, std::cos(1.0), std::sin(1.0), -std::cos(1.0), -std::sin(1.0);
  EXPECT_CODE(contact_measure(BodyRep::from_halfspaces(a, Vec::Ones(4))), ErrorCode::InfeasibleWeights);
  EXPECT_CODE(contact_measure(body_Zp_star(cross_measure(2), 3.0)), ErrorCode::InvalidArgument);
}

TEST(Isoperimetry, CubeRatios) {
  EXPECT_NEAR(surface_area(cube(2)), 8.0, 1e-12);
  EXPECT_NEAR(isoperimetric_ratio(cube(2)), 16.0, 1e-12);
  EXPECT_NEAR(surface_area(cube(3)), 24.0, 1e-12);
  EXPECT_NEAR(isoperimetric_ratio(cube(3)), 216.0, 1e-10);
  // Regular hexagon, unit side: perimeter 6, area 3 sqrt(3) / 2.
  EXPECT_NEAR(isoperimetric_ratio(body_Zp(equiangular_measure(3), kInf)), 36.0 / (3 * std::sqrt(3.0) / 2), 1e-12);
}

TEST(XiRegion, CoincidentDirectionsClosedForm) {
  const SphereVector e1(unit(2, 0));
  const auto r = xi_region_volume(e1, e1, 4'000'000, 3);
  const double rr = 0.1, d = 1.0 / 30;
  const double seg = rr * rr * std::acos(d / rr) - d * std::sqrt(rr * rr - d * d);
  EXPECT_NEAR(r.volume.value, seg, r.volume.abs_error);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.bound, kPi / (240.0 * 240.0), 1e-18);
}

TEST(XiRegion, SeparatedDirectionsAgainstGrid) {
  const Vec u = make_vec({1, 0}), u0 = make_vec({std::cos(1.2), std::sin(1.2)});
  const auto r = xi_region_volume(SphereVector(u), SphereVector(u0), 4'000'000, 9);
  EXPECT_NEAR(r.volume.value, xi_area_by_grid(u, u0), r.volume.abs_error + 2e-6);
  EXPECT_TRUE(r.pass);
  EXPECT_CODE(xi_region_volume(SphereVector(u), SphereVector(-u), 10), ErrorCode::PreconditionViolated);
}

TEST(CubeSandwich, NearCross) {
  const auto r = cube_sandwich_check(cross_measure(2, rotation2(0.02)), 0.1);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.inner_scale, std::exp(-0.2), 1e-15);
  EXPECT_NEAR(r.outer_scale, std::exp(0.4), 1e-15);
  Rng rng(12);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(cube_sandwich_check(stability::near_cross_measure(3, 0.05, rng), 0.1).pass);
}

TEST(CubeSandwich, HypothesisFailures) {
  EXPECT_CODE(cube_sandwich_check(cross_measure(2, rotation2(0.02)), 0.2), ErrorCode::HypothesisFailed);
  EXPECT_CODE(cube_sandwich_check(cross_measure(2, rotation2(0.12)), 0.1), ErrorCode::HypothesisFailed);
}

TEST(Bmkzw, CutSquare) {
  // x + y <= 1.1 and its reflections: the corner (0.6, 0.6) escapes, area 4 - 4 * 0.9^2 / 2.
  const auto k = BodyRep::from_vertices({make_vec({1, 0.1}), make_vec({0.1, 1}), make_vec({-0.1, 1}),
                                         make_vec({-1, 0.1}), make_vec({-1, -0.1}), make_vec({-0.1, -1}),
                                         make_vec({0.1, -1}), make_vec({1, -0.1})});
  const auto r = bmkzw_check(k, cube(2), 0.2);
  EXPECT_NEAR(r.volume_k, 4 - 2 * 0.81, 1e-12);
  EXPECT_NEAR(r.bound, (1 - 0.04 / 4) * 4, 1e-15);
  EXPECT_TRUE(r.pass);
}

TEST(Bmkzw, HypothesisFailures) {
  const auto half = cube(2, 0.5);
  EXPECT_CODE(bmkzw_check(cube(2), cube(2, 0.9), 0.2), ErrorCode::HypothesisFailed);       // K not in Z
  EXPECT_CODE(bmkzw_check(half, cube(2, 0.5), 0.2), ErrorCode::HypothesisFailed);         // (1-tau)W not in Z
  EXPECT_CODE(bmkzw_check(cube(2, 0.7), cube(2), 0.2), ErrorCode::HypothesisFailed);      // (1-2tau)W in K
  EXPECT_CODE(bmkzw_check(half, cube(2, 1.1), 0.2), ErrorCode::HypothesisFailed);         // V(Z) > V(W)
  EXPECT_CODE(bmkzw_check(half, cube(2), 0.3), ErrorCode::HypothesisFailed);              // tau range
}

#pragma once

// John ellipsoids of symmetric polytopes, contact measures, and cube inclusion checks.

#include <string>
#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/linalg.hpp"
#include "isozonoid/metrics.hpp"
#include "isozonoid/polytope.hpp"
#include "isozonoid/special.hpp"
#include "isozonoid/sphere_measures.hpp"
#include "isozonoid/zonoid_bodies.hpp"

namespace isozonoid {

/// Origin-centred ellipsoid {x : x^T A x <= 1}.
struct Ellipsoid {
  Mat A;

  double volume() const { return special::unit_ball_volume(static_cast<int>(A.rows())) / std::sqrt(A.determinant()); }
  bool contains(const Vec& x, double tol = 1e-12) const { return x.dot(A * x) <= 1.0 + tol; }
};

struct JohnResult {
  Ellipsoid ellipsoid;
  Mat normalization;           // A^{1/2}: maps the John ellipsoid onto B^n
  std::vector<Vec> contacts;   // unit contact directions of the normalized body (one per +- pair)
  std::vector<double> weights; // John weights per contact pair, sum c_i u_i (x) u_i = Id with +- split
  double residual = 0.0;       // || sum c_i u_i (x) u_i - Id || over both signs
  double containment = 0.0;    // max_j ||a'_j|| - 1 (<= 0 up to tolerance)
  int iterations = 0;
};

inline constexpr double kContactTolerance = 1e-8;

namespace detail {

// Facet rows of a symmetric polytope scaled to <a_j, x> <= 1, one per +- pair.
inline std::vector<Vec> unit_offset_facets(const BodyRep& k) {
  require(k.is_polytope(), ErrorCode::InvalidArgument, "John ellipsoid needs a polytope");
  const auto [a, b] = k.halfspaces();
  require(b.minCoeff() > 0, ErrorCode::DegenerateBody, "origin must be interior");
  std::vector<Vec> rows;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const Vec y = a.row(j).transpose() / b[j];
    bool dup = false;
    for (const auto& r : rows)
      if ((r - y).norm() < 1e-12 * y.norm() || (r + y).norm() < 1e-12 * y.norm()) dup = true;
    if (!dup) rows.push_back(y);
  }
  return rows;
}

}  // namespace detail

/**
 * @brief Maximum-volume origin-centred ellipsoid in a symmetric polytope.
 *
 * Solved through the dual D-optimal design over the polar points {+-a_j}: Frank-Wolfe
 * with away steps maximizes log det M, M = sum l_j a_j a_j^T, and A = n M.
 */
inline JohnResult john_ellipsoid(const BodyRep& k, double tol = 1e-12, int max_iter = 200000) {
  const int n = k.dim();
  require(n >= 2 && n <= 3, ErrorCode::DimensionUnsupported, "John ellipsoid supports n in {2, 3}");
  require(k.origin_symmetric(), ErrorCode::InvalidArgument, "body must be origin symmetric");
  const auto y = detail::unit_offset_facets(k);
  const int m = static_cast<int>(y.size());
  Mat ym(n, m);
  for (int j = 0; j < m; ++j) ym.col(j) = y[j];
  Eigen::FullPivLU<Mat> lu(ym);
  lu.setThreshold(1e-12);
  require(lu.rank() == n, ErrorCode::DegenerateBody, "facet normals do not span R^n");

  Vec lambda = Vec::Constant(m, 1.0 / m);
  JohnResult out;
  for (int it = 0; it < max_iter; ++it) {
    const Mat mm = ym * lambda.asDiagonal() * ym.transpose();
    const Mat inv = mm.inverse();
    Vec g(m);
    for (int j = 0; j < m; ++j) g[j] = y[j].dot(inv * y[j]);
    int jp = 0, jm = -1;
    for (int j = 0; j < m; ++j) {
      if (g[j] > g[jp]) jp = j;
      if (lambda[j] > 0 && (jm < 0 || g[j] < g[jm])) jm = j;
    }
    const double eps_plus = g[jp] / n - 1.0;
    const double eps_minus = jm >= 0 ? 1.0 - g[jm] / n : 0.0;
    out.iterations = it;
    if (std::max(eps_plus, eps_minus) <= tol) break;
    if (eps_plus >= eps_minus) {
      const double step = (g[jp] - n) / (n * (g[jp] - 1.0));
      lambda *= (1.0 - step);
      lambda[jp] += step;
    } else {
      double step = (n - g[jm]) / (n * (g[jm] - 1.0));
      step = std::min(step, lambda[jm] / (1.0 - lambda[jm]));
      lambda *= (1.0 + step);
      lambda[jm] -= step;
      if (lambda[jm] < 1e-300) lambda[jm] = 0.0;
    }
  }

  const Mat mm = ym * lambda.asDiagonal() * ym.transpose();
  out.ellipsoid.A = n * mm;
  out.normalization = linalg::sqrt_spd(out.ellipsoid.A);
  const Mat to_unit = linalg::inv_sqrt_spd(out.ellipsoid.A);  // a'_j = A^{-1/2} a_j
  Mat s = Mat::Zero(n, n);
  out.containment = -kInf;
  for (int j = 0; j < m; ++j) {
    const Vec a = to_unit * y[j];
    out.containment = std::max(out.containment, a.norm() - 1.0);
    if (lambda[j] > 1e-9) {
      const double c = n * lambda[j] / a.squaredNorm();
      out.contacts.push_back(a.normalized());
      out.weights.push_back(c / 2.0);
      s += c * a.normalized() * a.normalized().transpose();
    }
  }
  out.residual = linalg::op_norm_symmetric(s - Mat::Identity(n, n));
  return out;
}

/// Linear image with John ellipsoid B^n, x -> A^{1/2} x.
inline BodyRep john_normalize(const BodyRep& k, Mat* map = nullptr) {
  const auto j = john_ellipsoid(k);
  if (map) *map = j.normalization;
  return k.linear_image(j.normalization);
}

/// Even isotropic measure on the unit-distance facet normals of a body whose John ellipsoid is B^n.
inline AtomicMeasure contact_measure(const BodyRep& k) {
  require(k.is_polytope(), ErrorCode::InvalidArgument, "contact measure needs a polytope");
  const auto [a, b] = k.halfspaces();
  std::vector<Vec> dirs;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const double r = a.row(j).norm();
    const double dist = b[j] / r;
    if (std::abs(dist - 1.0) > kContactTolerance) continue;
    const Vec u = a.row(j).transpose() / r;
    bool dup = false;
    for (const auto& d : dirs)
      if (angle_between(d, u) <= kMergeAngle) dup = true;
    if (!dup) dirs.push_back(u);
  }
  require(!dirs.empty(), ErrorCode::NoContacts, "no facet touches the unit sphere");
  // Symmetric bodies: close the set under negation.
  const std::size_t base = dirs.size();
  for (std::size_t i = 0; i < base; ++i) {
    bool has = false;
    for (const auto& d : dirs)
      if (angle_between(d, -dirs[i]) <= kMergeAngle) has = true;
    if (!has) dirs.push_back(-dirs[i]);
  }
  try {
    return isotropic_measure(dirs, true);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Infeasible) throw Error(ErrorCode::InfeasibleWeights, e.what());
    throw;
  }
}

// ---------------------------------------------------------------------------
// Isoperimetry

inline double surface_area(const BodyRep& k) {
  require(k.dim() <= 3, ErrorCode::DimensionUnsupported, "surface area needs n <= 3");
  require(k.is_polytope(), ErrorCode::InvalidArgument, "surface area needs a polytope");
  return poly::surface_area(k.vertices());
}

/// S(K)^n / V(K)^{n-1}.
inline double isoperimetric_ratio(const BodyRep& k) {
  const int n = k.dim();
  return std::pow(surface_area(k), n) / std::pow(volume(k).value, n - 1);
}

/// Cube W^n = [-1, 1]^n as an H_REP.
inline BodyRep cube(int n, double r = 1.0) {
  Mat a(2 * n, n);
  a.setZero();
  for (int i = 0; i < n; ++i) {
    a(2 * i, i) = 1.0;
    a(2 * i + 1, i) = -1.0;
  }
  return BodyRep::from_halfspaces(a, Vec::Constant(2 * n, r));
}

// ---------------------------------------------------------------------------
// Xi-region

struct XiVolume {
  VolumeResult volume;
  double bound = 0.0;  // kappa_n / 240^n
  bool pass = false;
};

/**
 * @brief Monte-Carlo volume of {y in 0.1 B^n : <y,u> >= 1/30, <y,u0> >= 1/30, <y,u-u0> >= |u-u0|/120}.
 * Uniform samples in 0.1 B^n drawn as antithetic pairs (y, -y).
 */
inline XiVolume xi_region_volume(const SphereVector& u, const SphereVector& u0, long samples = 10'000'000,
                                 std::uint64_t seed = kDefaultSeed) {
  const int n = u.dim();
  require(n <= 3 && u0.dim() == n, ErrorCode::DimensionUnsupported, "Xi-region needs n <= 3");
  require(u.dot(u0) >= 0, ErrorCode::PreconditionViolated, "need <u, u0> >= 0");
  const Vec d = u.coords() - u0.coords();
  const double dn = d.norm();
  auto inside = [&](const Vec& y) {
    return y.dot(u.coords()) >= 1.0 / 30 && y.dot(u0.coords()) >= 1.0 / 30 && y.dot(d) >= dn / 120;
  };
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  long hits = 0;
  const long pairs = std::max<long>(1, samples / 2);
  Vec y(n);
  for (long i = 0; i < pairs; ++i) {
    for (int j = 0; j < n; ++j) y[j] = g(rng);
    y *= 0.1 * std::pow(uni(rng), 1.0 / n) / y.norm();
    hits += inside(y);
    hits += inside(-y);
  }
  const double ball = special::unit_ball_volume(n) * std::pow(0.1, n);
  const double p = static_cast<double>(hits) / (2.0 * pairs);
  XiVolume out;
  out.volume.value = p * ball;
  out.volume.abs_error = 3.0 * ball * std::sqrt(std::max(p * (1 - p), 1e-300) / (2.0 * pairs));
  out.volume.method = VolumeMethod::MonteCarlo;
  out.bound = special::unit_ball_volume(n) / std::pow(240.0, n);
  out.pass = out.volume.value >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Cube inclusions

struct SandwichReport {
  double inner_scale = 0.0;   // e^{-n alpha}
  double outer_scale = 0.0;   // e^{2 n alpha}
  double inner_margin = 0.0;  // 1 - max |<x, u>| over vertices x of e^{-n alpha} W^n
  double outer_margin = 0.0;  // e^{2 n alpha} - max ||x||_inf over vertices of Z*_inf(mu)
  bool pass = false;
};

/// e^{-n alpha} W^n subset Z*_inf(mu) subset e^{2 n alpha} W^n when delta_H(supp mu, supp nu_n) < alpha < 1/(3n).
inline SandwichReport cube_sandwich_check(const AtomicMeasure& mu, double alpha) {
  const int n = mu.dim();
  require(mu.even(), ErrorCode::HypothesisFailed, "mu must be even");
  require(alpha > 0 && alpha < 1.0 / (3 * n), ErrorCode::HypothesisFailed, "alpha must lie in (0, 1/(3n))");
  const double dh = hausdorff_spherical(mu.directions(), cross_points(Mat::Identity(n, n))).value;
  require(dh < alpha, ErrorCode::HypothesisFailed, "delta_H(supp mu, supp nu_n) must be below alpha");
  SandwichReport r;
  r.inner_scale = std::exp(-n * alpha);
  r.outer_scale = std::exp(2 * n * alpha);
  double worst = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = ((mask >> i) & 1 ? 1.0 : -1.0) * r.inner_scale;
    for (const auto& a : mu.atoms()) worst = std::max(worst, std::abs(a.u.dot(x)));
  }
  r.inner_margin = 1.0 - worst;
  double reach = 0.0;
  const BodyRep zs = body_Zp_star(mu, kInf);
  for (const auto& v : zs.vertices()) reach = std::max(reach, v.cwiseAbs().maxCoeff());
  r.outer_margin = r.outer_scale - reach;
  r.pass = r.inner_margin >= -1e-12 && r.outer_margin >= -1e-12;
  return r;
}

struct BmkzwReport {
  double volume_k = 0.0;
  double bound = 0.0;  // (1 - tau^n / 2^n) V(W^n)
  bool pass = false;
};

/// V(K) <= (1 - tau^n / 2^n) V(W^n) under K subset Z, (1 - tau) W^n subset Z, (1 - 2 tau) W^n not in K, V(Z) <= V(W^n).
inline BmkzwReport bmkzw_check(const BodyRep& k, const BodyRep& z, double tau) {
  const int n = k.dim();
  require(tau > 0 && tau < 0.25, ErrorCode::HypothesisFailed, "tau must lie in (0, 1/4)");
  require(k.is_polytope() && z.is_polytope(), ErrorCode::InvalidArgument, "K and Z must be polytopes");
  const double tol = 1e-12;
  for (const auto& v : k.vertices())
    require(z.gauge(v) <= 1.0 + tol, ErrorCode::HypothesisFailed, "hypothesis K subset Z fails");
  bool escapes = false;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    require(z.gauge((1 - tau) * x) <= 1.0 + tol, ErrorCode::HypothesisFailed, "hypothesis (1-tau)W^n subset Z fails");
    if (k.gauge((1 - 2 * tau) * x) > 1.0 + tol) escapes = true;
  }
  require(escapes, ErrorCode::HypothesisFailed, "hypothesis (1-2tau)W^n not subset K fails");
  const double cube_volume = std::pow(2.0, n);
  require(volume(z).value <= cube_volume * (1 + tol), ErrorCode::HypothesisFailed, "hypothesis V(Z) <= V(W^n) fails");
  BmkzwReport r;
  r.volume_k = volume(k).value;
  r.bound = (1.0 - std::pow(tau, n) / std::pow(2.0, n)) * cube_volume;
  r.pass = r.volume_k <= r.bound * (1 + tol);
  return r;
}

}  // namespace isozonoid

#pragma once

// Distances between measures on the sphere and between convex bodies.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/optimize.hpp"
#include "isozonoid/polytope.hpp"
#include "isozonoid/sphere_measures.hpp"
#include "isozonoid/transport_lp.hpp"
#include "isozonoid/zonoid_bodies.hpp"

namespace isozonoid {

// ---------------------------------------------------------------------------
// Wasserstein

struct TransportPlan {
  std::vector<lp::Flow> flows;
  double cost = 0.0;
};

/// Equal-mass Kantorovich distance with geodesic cost; the optimal plan is returned.
inline TransportPlan wasserstein(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  require(mu.dim() == nu.dim(), ErrorCode::InvalidArgument, "dimension mismatch");
  require(std::abs(mu.total_mass() - nu.total_mass()) <= 1e-9, ErrorCode::MassMismatch, "masses differ");
  std::vector<double> s, d;
  for (const auto& a : mu.atoms()) s.push_back(a.c);
  for (const auto& a : nu.atoms()) d.push_back(a.c);
  Mat c(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          mu.atoms()[i].u.angle_to(nu.atoms()[j].u);
  auto sol = lp::solve_transport(s, d, c);
  return {std::move(sol.flows), sol.cost};
}

// ---------------------------------------------------------------------------
// Orbit searches over rotations

struct OrbitResult {
  double value = kInf;
  Mat rotation;
  double resolution = 0.0;  // grid spacing (n = 2) or final simplex size (n = 3)
  int evaluations = 0;
};

namespace detail {

// 60 quasi-uniform rotation vectors: Fibonacci axes with golden-ratio angles in (0, pi].
inline std::vector<Vec> rotation_starts(int count) {
  std::vector<Vec> out;
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(1.0 - z * z);
    const Vec axis = make_vec({r * std::cos(ga * i), r * std::sin(ga * i), z});
    const double angle = kPi * std::fmod(0.5 + i * 0.6180339887498949, 1.0);
    out.push_back(axis * angle);
  }
  return out;
}

}  // namespace detail

/**
 * @brief Minimizes f(R) over rotations R (reflections are not needed: the cross
 * frames are closed under them). n = 2: grid on [0, pi/2) then golden section;
 * n = 3: Nelder-Mead over rotation vectors from 60 starts.
 */
inline OrbitResult minimize_over_rotations(int n, const std::function<double(const Mat&)>& f, int grid = 720) {
  OrbitResult out;
  if (n == 2) {
    const double h = (kPi / 2) / grid;
    int best = 0;
    for (int i = 0; i < grid; ++i) {
      const double v = f(rotation2(i * h));
      if (v < out.value) {
        out.value = v;
        best = i;
      }
    }
    const auto g = opt::golden_section([&](double t) { return f(rotation2(t)); }, (best - 1) * h, (best + 1) * h, 1e-12);
    out.evaluations = grid + g.evaluations;
    double theta = best * h;
    if (g.value < out.value) {
      out.value = g.value;
      theta = g.x[0];
    }
    out.rotation = rotation2(theta);
    out.resolution = h;
    return out;
  }
  require(n == 3, ErrorCode::DimensionUnsupported, "orbit search supports n in {2, 3}");
  opt::NelderMeadOptions o;
  o.initial_step = 0.15;
  o.max_evals = 1500;
  const auto m = opt::multistart([&](const Vec& w) { return f(rotation3(w)); }, detail::rotation_starts(60), o);
  out.value = m.value;
  out.rotation = rotation3(m.x);
  out.resolution = o.x_tol;
  out.evaluations = m.evaluations;
  return out;
}

/// delta_WO(mu) = min over rotations Phi of delta_W(mu, Phi_* nu_n).
inline OrbitResult wasserstein_to_cross(const AtomicMeasure& mu) {
  const int n = mu.dim();
  require(std::abs(mu.total_mass() - n) <= 1e-9, ErrorCode::MassMismatch, "measure must have mass n");
  return minimize_over_rotations(n, [&](const Mat& r) { return wasserstein(mu, cross_measure(n, r)).cost; });
}

// ---------------------------------------------------------------------------
// Hausdorff

struct HausdorffResult {
  double value = 0.0;     // max of the two one-sided deviations
  double min_form = 0.0;  // min of the two one-sided deviations
};

inline HausdorffResult hausdorff_spherical(const std::vector<Vec>& x, const std::vector<Vec>& y) {
  require(!x.empty() && !y.empty(), ErrorCode::EmptySet, "point sets must be nonempty");
  auto one_sided = [](const std::vector<Vec>& a, const std::vector<Vec>& b) {
    double worst = 0.0;
    for (const auto& p : a) {
      double near = kInf;
      for (const auto& q : b) near = std::min(near, angle_between(p, q));
      worst = std::max(worst, near);
    }
    return worst;
  };
  const double d1 = one_sided(x, y), d2 = one_sided(y, x);
  return {std::max(d1, d2), std::min(d1, d2)};
}

inline std::vector<Vec> cross_points(const Mat& frame) {
  std::vector<Vec> pts;
  for (Eigen::Index i = 0; i < frame.cols(); ++i) {
    pts.push_back(frame.col(i));
    pts.push_back(-frame.col(i));
  }
  return pts;
}

struct HausdorffOrbit {
  OrbitResult orbit;
  double min_form = 0.0;  // min of the one-sided deviations at the optimal frame
};

/// delta_HO(X) over rotated cross supports.
inline HausdorffOrbit hausdorff_to_cross(const std::vector<Vec>& x) {
  require(!x.empty(), ErrorCode::EmptySet, "point set must be nonempty");
  const int n = static_cast<int>(x[0].size());
  HausdorffOrbit out;
  out.orbit = minimize_over_rotations(n, [&](const Mat& r) { return hausdorff_spherical(x, cross_points(r)).value; });
  out.min_form = hausdorff_spherical(x, cross_points(out.orbit.rotation)).min_form;
  return out;
}

struct WassersteinHausdorff {
  double wasserstein = 0.0;
  double hausdorff = 0.0;
  double omega = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/**
 * @brief delta_W(mu, nu) <= 2n delta_H(supp mu, supp nu) for a cross measure nu;
 * with delta and omega given, the general form 2n delta + 2 pi n^2 omega where omega
 * bounds the mass outside the 2n caps of radius delta.
 */
inline WassersteinHausdorff wasserstein_hausdorff_bound(const AtomicMeasure& mu, const AtomicMeasure& nu,
                                                        std::optional<double> delta = std::nullopt) {
  require_isotropic(mu);
  require(mu.even(), ErrorCode::InvalidArgument, "mu must be even");
  const int n = mu.dim();
  WassersteinHausdorff r;
  r.wasserstein = wasserstein(mu, nu).cost;
  if (!delta) {
    r.hausdorff = hausdorff_spherical(mu.directions(), nu.directions()).value;
    require(r.hausdorff < kPi / 4, ErrorCode::HypothesisFailed, "Hausdorff distance must be below pi/4");
    r.bound = 2.0 * n * r.hausdorff;
  } else {
    require(*delta >= 0 && *delta < kPi / 4, ErrorCode::HypothesisFailed, "delta must lie in [0, pi/4)");
    r.hausdorff = *delta;
    for (const auto& a : mu.atoms()) {
      bool covered = false;
      for (const auto& b : nu.atoms())
        if (in_cap(a.u.coords(), b.u, std::max(*delta, 1e-300), false)) covered = true;
      if (!covered) r.omega += a.c;
    }
    require(r.omega < 1.0, ErrorCode::HypothesisFailed, "uncovered mass omega must be below 1");
    r.bound = 2.0 * n * *delta + 2.0 * kPi * n * n * r.omega;
  }
  r.pass = r.wasserstein <= r.bound + 1e-12;
  return r;
}

// ---------------------------------------------------------------------------
// Nearly orthogonal frames

inline double frame_factor(int i) {
  return std::pow(4.0, i - 2) * std::sqrt(special::factorial(i - 1));
}

struct DeepHole {
  Vec u;
  double max_inner = 0.0;  // max_i |<u_i, u>|
  double bound = 0.0;      // 1/sqrt(n) - t / (4 n^{3/2})
  bool pass = false;
};

/**
 * @brief A direction far from all +-u_i when two of the u_i are far from orthogonal:
 * w_i is the unit normal of aff{u_1..u_i} (signs of u_i flipped so <u_i, w_{i-1}> <= 0).
 */
inline DeepHole deep_hole(std::vector<Vec> u, double t) {
  const int n = static_cast<int>(u.size());
  require(n >= 2 && static_cast<int>(u[0].size()) == n, ErrorCode::InvalidArgument, "need n vectors in R^n");
  require(t > 0 && t < 1.0 / (2.0 * frame_factor(n)), ErrorCode::InvalidArgument, "t out of range");
  for (auto& x : u) x.normalize();
  int pi = -1, pj = -1;
  for (int i = 0; i < n && pi < 0; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(u[i].dot(u[j])) >= std::sin(t) - 1e-15) {
        pi = i;
        pj = j;
        break;
      }
  require(pi >= 0, ErrorCode::HypothesisFailed, "all pairs are nearly orthogonal");
  std::vector<Vec> v = {u[pi], u[pj]};
  for (int i = 0; i < n; ++i)
    if (i != pi && i != pj) v.push_back(u[i]);

  Vec w = v[0];
  for (int i = 1; i < n; ++i) {
    if (v[i].dot(w) > 0) v[i] = -v[i];
    Mat b(n, i + 1);
    for (int k = 0; k <= i; ++k) b.col(k) = v[k];
    const Mat g = b.transpose() * b;
    const Vec y = g.ldlt().solve(Vec::Ones(i + 1));
    w = (b * y).normalized();
  }
  DeepHole out;
  out.u = w;
  for (const auto& x : u) out.max_inner = std::max(out.max_inner, std::abs(x.dot(w)));
  out.bound = 1.0 / std::sqrt(static_cast<double>(n)) - t / (4.0 * std::pow(n, 1.5));
  out.pass = out.max_inner <= out.bound + 1e-12;
  require(out.pass, ErrorCode::HypothesisFailed, "constructed direction misses the bound");
  return out;
}

struct CrossFit {
  Mat frame;                   // orthonormal columns v_1..v_n
  std::vector<double> errors;  // angle(v_i, u_i)
  std::vector<double> bounds;  // 4^{i-2} sqrt((i-1)!) t, 0 for i = 1
  double hausdorff = 0.0;      // delta_H({+-v_i}, {+-u_i})
  double certified = 0.0;      // 4^{n-2} sqrt((n-1)!) t
  bool pass = false;
};

/// Gram-Schmidt frame of nearly orthogonal unit vectors with per-vector angle certificates.
inline CrossFit fit_cross_frame(std::vector<Vec> u, double t) {
  const int n = static_cast<int>(u.size());
  require(n >= 2 && static_cast<int>(u[0].size()) == n, ErrorCode::InvalidArgument, "need n vectors in R^n");
  require(t >= 0, ErrorCode::InvalidArgument, "t must be nonnegative");
  for (auto& x : u) x.normalize();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      require(std::abs(u[i].dot(u[j])) <= std::sin(t) + 1e-15, ErrorCode::HypothesisFailed,
              "vectors are not nearly orthogonal");
  CrossFit out;
  out.frame = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    Vec v = u[i];
    for (int k = 0; k < i; ++k) v -= out.frame.col(k).dot(v) * out.frame.col(k);
    v -= out.frame.leftCols(i) * (out.frame.leftCols(i).transpose() * v);
    v.normalize();
    if (v.dot(u[i]) < 0) v = -v;
    out.frame.col(i) = v;
    out.errors.push_back(angle_between(v, u[i]));
    out.bounds.push_back(i == 0 ? 0.0 : frame_factor(i + 1) * t);
  }
  std::vector<Vec> us;
  for (const auto& x : u) {
    us.push_back(x);
    us.push_back(-x);
  }
  out.hausdorff = hausdorff_spherical(cross_points(out.frame), us).value;
  out.certified = frame_factor(n) * t;
  out.pass = out.hausdorff <= out.certified + 1e-12;
  for (int i = 0; i < n; ++i) out.pass = out.pass && out.errors[i] <= out.bounds[i] + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// Banach-Mazur and volume distance

struct BodyProbe {
  std::vector<Vec> boundary;  // vertices, or boundary samples for smooth bodies
  std::function<double(const Vec&)> gauge;
  std::vector<Vec> polygon;  // n = 2: counter-clockwise boundary polygon
  Mat rows;                  // polytopes: facet rows a_j / b_j, gauge = max_j <row_j, x>
  bool exact = true;
};

inline BodyProbe probe(const BodyRep& k, int samples = 2048) {
  BodyProbe p;
  const int n = k.dim();
  if (k.is_polytope()) {
    p.boundary = k.extreme_vertices();
    const auto [a, b] = k.halfspaces();
    p.rows = b.cwiseInverse().asDiagonal() * a;
    p.gauge = [rows = p.rows](const Vec& x) { return (rows * x).maxCoeff(); };
  } else {
    p.exact = false;
    const auto dirs = n == 2 ? poly::circle_grid(samples) : poly::icosphere(3);
    if (k.kind() == BodyKind::GaugeOracle) {
      for (const auto& v : dirs) p.boundary.push_back(v / k.gauge(v));
      p.gauge = [k](const Vec& x) { return k.gauge(x); };
    } else {
      std::vector<double> h;
      for (const auto& v : dirs) {
        p.boundary.push_back(k.touching_point(v));
        h.push_back(k.support(v));
      }
      p.gauge = [dirs, h](const Vec& x) {
        double g = 0.0;
        for (std::size_t j = 0; j < dirs.size(); ++j) g = std::max(g, x.dot(dirs[j]) / h[j]);
        return g;
      };
    }
  }
  if (n == 2) p.polygon = poly::hull2d(p.boundary);
  return p;
}

struct DistanceCertificate {
  double value = kInf;  // an upper bound for the true distance
  Mat map;
  int restarts = 0;
  int evaluations = 0;
  bool exact_containment = true;  // false when a body was sampled on a grid
  double abs_error = 0.0;         // Monte-Carlo error (volume distance, n = 3)
};

namespace detail {

// Khachiyan's iteration for the origin-centred minimal ellipsoid L B^n around +-points; returns L.
inline Mat lowner_factor(const std::vector<Vec>& pts, int n) {
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(pts.size()));
  Mat m = Mat::Zero(n, n);
  for (int it = 0; it < 20000; ++it) {
    m.setZero();
    for (std::size_t i = 0; i < pts.size(); ++i) m += w[i] * pts[i] * pts[i].transpose();
    const Eigen::LDLT<Mat> f(m);
    std::size_t j = 0;
    double gj = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double g = pts[i].dot(f.solve(pts[i]));
      if (g > gj) gj = g, j = i;
    }
    if (gj <= n * (1.0 + 1e-9)) break;
    const double step = (gj / n - 1.0) / (gj - 1.0);
    for (auto& x : w) x *= 1.0 - step;
    w[j] += step;
  }
  const Eigen::SelfAdjointEigenSolver<Mat> es(n * m);
  return es.operatorSqrt();
}

// Identity first; with Lowner factors of both bodies, also lk Q lm^{-1} for random rotations Q.
inline std::vector<Vec> gl_starts(int n, int count, std::uint64_t seed, const Mat* lk = nullptr,
                                  const Mat* lm = nullptr) {
  std::vector<Vec> out;
  const Mat id = Mat::Identity(n, n);
  out.push_back(Eigen::Map<const Vec>(id.data(), n * n));
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  const bool aligned = lk != nullptr && lm != nullptr;
  const Mat lm_inv = aligned ? Mat(lm->inverse()) : id;
  for (int i = 1; i < count; ++i) {
    Mat m = random_orthogonal(n, rng);
    if (aligned && i % 2 == 1) {
      m = *lk * (i == 1 ? id : m) * lm_inv;
    } else {
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) += g(rng);
    }
    out.push_back(Eigen::Map<const Vec>(m.data(), n * n));
  }
  return out;
}

inline Mat unflatten(const Vec& x, int n) { return Eigen::Map<const Mat>(x.data(), n, n); }

}  // namespace detail

/// log of min lambda(Phi) = max_x ||Phi^{-1} x||_M * max_y ||Phi y||_K over multistart Nelder-Mead in GL(n).
inline DistanceCertificate banach_mazur(const BodyRep& k, const BodyRep& m, int starts = 16,
                                        std::uint64_t seed = kDefaultSeed) {
  const int n = k.dim();
  require(m.dim() == n, ErrorCode::InvalidArgument, "dimension mismatch");
  require(n == 2 || n == 3, ErrorCode::DimensionUnsupported, "Banach-Mazur search supports n in {2, 3}");
  const auto pk = probe(k), pm = probe(m);
  auto lambda = [&](const Vec& x) {
    const Mat phi = detail::unflatten(x, n);
    const double det = phi.determinant();
    if (!(std::abs(det) > 1e-9)) return 1e9;
    const Mat inv = phi.inverse();
    double s1 = 0.0, s2 = 0.0;
    for (const auto& v : pk.boundary) s1 = std::max(s1, pm.gauge(inv * v));
    for (const auto& v : pm.boundary) s2 = std::max(s2, pk.gauge(phi * v));
    return std::log(s1 * s2);
  };
  opt::NelderMeadOptions o;
  o.initial_step = 0.25;
  o.max_evals = 3000;
  o.x_tol = 1e-9;
  DistanceCertificate c;
  const Mat lk = detail::lowner_factor(pk.boundary, n), lm = detail::lowner_factor(pm.boundary, n);
  const auto best = opt::multistart(lambda, detail::gl_starts(n, starts, seed, &lk, &lm), o);
  c.value = std::max(0.0, best.value);
  c.map = detail::unflatten(best.x, n);
  c.restarts = starts;
  c.evaluations = best.evaluations;
  c.exact_containment = pk.exact && pm.exact;
  return c;
}

/**
 * @brief min over SL(n) of V(Phi(alpha K) sym-diff (beta M)) with alpha, beta normalizing volumes to 1.
 * n = 2 clips polygons exactly; n = 3 uses Monte-Carlo with common random numbers.
 */
inline DistanceCertificate volume_distance(const BodyRep& k, const BodyRep& m, int starts = 12,
                                           std::uint64_t seed = kDefaultSeed, int mc_samples = 50000) {
  const int n = k.dim();
  require(m.dim() == n, ErrorCode::InvalidArgument, "dimension mismatch");
  require(n == 2 || n == 3, ErrorCode::DimensionUnsupported, "volume distance supports n in {2, 3}");
  const auto pk = probe(k), pm = probe(m);
  const double vk = volume(k).value, vm = volume(m).value;
  const double alpha = std::pow(vk, -1.0 / n), beta = std::pow(vm, -1.0 / n);

  auto sl = [n](const Vec& x) {
    Mat a = detail::unflatten(x, n);
    const double d = a.determinant();
    if (!(d > 1e-6)) return Mat(Mat::Zero(n, n));
    return Mat(a / std::pow(d, 1.0 / n));
  };

  std::function<double(const Vec&)> objective;
  std::vector<Vec> mc_points;
  Mat ys;
  double box_volume = 0.0;
  if (n == 2) {
    std::vector<Vec> km, mm;
    for (const auto& v : pk.polygon) km.push_back(alpha * v);
    for (const auto& v : pm.polygon) mm.push_back(beta * v);
    objective = [km, mm, sl](const Vec& x) {
      const Mat phi = sl(x);
      if (phi.isZero()) return 1e9;
      std::vector<Vec> img;
      for (const auto& v : km) img.push_back(phi * v);
      const auto inter = poly::intersect_convex(img, mm);
      const double a = inter.size() >= 3 ? std::abs(poly::polygon_area(inter)) : 0.0;
      return std::abs(poly::polygon_area(img)) + std::abs(poly::polygon_area(mm)) - 2.0 * a;
    };
  } else {
    // Common random numbers: one fixed sample of the box around beta M.
    double r = 0.0;
    for (const auto& v : pm.boundary) r = std::max(r, beta * v.cwiseAbs().maxCoeff());
    Rng rng(seed);
    std::uniform_real_distribution<double> uni(-r, r);
    for (int i = 0; i < mc_samples; ++i) {
      const Vec y = make_vec({uni(rng), uni(rng), uni(rng)});
      if (pm.gauge(y) <= beta) mc_points.push_back(y);
    }
    box_volume = std::pow(2 * r, 3);
    ys.resize(3, static_cast<Eigen::Index>(mc_points.size()));
    for (std::size_t j = 0; j < mc_points.size(); ++j) ys.col(static_cast<Eigen::Index>(j)) = mc_points[j];
    objective = [&, sl](const Vec& x) {
      const Mat phi = sl(x);
      if (phi.isZero()) return 1e9;
      const Mat inv = phi.inverse();
      long both = 0;
      if (pk.rows.size() > 0) {
        const Mat g = pk.rows * inv * ys;
        for (Eigen::Index j = 0; j < g.cols(); ++j)
          if (g.col(j).maxCoeff() <= alpha) ++both;
      } else {
        for (const auto& y : mc_points)
          if (pk.gauge(inv * y) <= alpha) ++both;
      }
      return 2.0 - 2.0 * box_volume * static_cast<double>(both) / mc_samples;
    };
  }
  opt::NelderMeadOptions o;
  o.initial_step = 0.2;
  o.max_evals = n == 2 ? 3000 : 400;
  DistanceCertificate c;
  const auto best = opt::multistart(objective, detail::gl_starts(n, starts, seed), o);
  c.value = std::max(0.0, best.value);
  c.map = sl(best.x);
  c.restarts = starts;
  c.evaluations = best.evaluations;
  c.exact_containment = pk.exact && pm.exact;
  if (n == 3) {
    const double p = std::clamp((2.0 - c.value) / (2.0 * box_volume), 0.0, 1.0);
    c.abs_error = 2.0 * 3.0 * box_volume * std::sqrt(p * (1 - p) / mc_samples);
  }
  return c;
}

}  // namespace isozonoid

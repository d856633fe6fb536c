#pragma once

// Verification suites: extremal polar volumes, sharp planar constants, stability trends,
// reverse isoperimetry, and the planar square construction.

#include <algorithm>
#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isozonoid/ball_barthe.hpp"
#include "isozonoid/core.hpp"
#include "isozonoid/john_geometry.hpp"
#include "isozonoid/metrics.hpp"
#include "isozonoid/parallel.hpp"
#include "isozonoid/polytope.hpp"
#include "isozonoid/sphere_measures.hpp"
#include "isozonoid/transport_maps.hpp"
#include "isozonoid/zonoid_bodies.hpp"

namespace isozonoid::stability {

struct StabilityReport {
  std::string tag;       // suite and check name
  std::string label;     // input description
  int n = 0;
  double p = 0.0;
  double epsilon = 0.0;  // distance used, see `distance`
  std::string distance;
  double deficit = 0.0;
  double bound = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  double runtime_ms = 0.0;
  std::string note;
};

inline bool all_pass(const std::vector<StabilityReport>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Measure families

enum class FamilyKind { TiltedPair, Equiangular, RandomIsotropic, SplitCluster };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::TiltedPair: return "TILTED_PAIR";
    case FamilyKind::Equiangular: return "EQUIANGULAR";
    case FamilyKind::RandomIsotropic: return "RANDOM_ISOTROPIC";
    case FamilyKind::SplitCluster: return "SPLIT_CLUSTER";
  }
  return "?";
}

/**
 * @brief e_1 split into the pair cos(a) e_1 +- sin(a) e_2 with weight 1/(4 cos^2 a) each,
 * e_2 reweighted to (1 - tan^2 a) / 2; the other axes keep 1/2. Infeasible for a >= pi/4.
 */
inline AtomicMeasure tilted_pair_measure(int n, double alpha) {
  require(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
  require(alpha >= 0 && alpha < kPi / 4, ErrorCode::Infeasible, "tilt angle must lie in [0, pi/4)");
  std::vector<Atom> half;
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double w = 1.0 / (4.0 * c * c);
  half.push_back({SphereVector(c * unit(n, 0) + s * unit(n, 1)), w});
  half.push_back({SphereVector(c * unit(n, 0) - s * unit(n, 1)), w});
  const double w2 = 0.5 * (1.0 - (s * s) / (c * c));
  if (w2 > 0) half.push_back({SphereVector(unit(n, 1)), w2});
  for (int i = 2; i < n; ++i) half.push_back({SphereVector(unit(n, i)), 0.5});
  return AtomicMeasure::symmetrized(n, half);
}

/// Each axis e_i split into the pair cos(s) e_i +- sin(s) e_{i+1}; weights from the isotropy solver.
inline AtomicMeasure split_cluster_measure(int n, double spread) {
  require(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    const Vec e = unit(n, i), f = unit(n, (i + 1) % n);
    for (double sg : {1.0, -1.0}) {
      const Vec d = std::cos(spread) * e + sg * std::sin(spread) * f;
      dirs.push_back(d);
      dirs.push_back(-d);
    }
  }
  return isotropic_measure(dirs, true);
}

/**
 * @brief k random antipodal pairs moved to isotropic position: with M = sum c_i u_i u_i^T the atoms
 * become M^{-1/2} u_i / |M^{-1/2} u_i| with mass c_i |M^{-1/2} u_i|^2. Fewer than n(n+1)/2 generic
 * pairs never admit isotropic weights as drawn, so the directions are moved instead.
 */
inline AtomicMeasure random_isotropic_measure(int n, int k, Rng& rng, int attempts = 200) {
  require(k >= n, ErrorCode::Infeasible, "need at least n pairs");
  std::uniform_real_distribution<double> mass(0.5, 1.5);
  for (int a = 0;; ++a) {
    std::vector<Vec> u;
    std::vector<double> c;
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < k; ++i) {
      u.push_back(random_unit_vector(n, rng));
      c.push_back(mass(rng));
      m += 2.0 * c.back() * u.back() * u.back().transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.eigenvalues().minCoeff() <= 1e-6 * es.eigenvalues().maxCoeff()) {
      require(a + 1 < attempts, ErrorCode::Infeasible, "random directions kept failing to span");
      continue;
    }
    const Mat root = es.operatorInverseSqrt();
    std::vector<Atom> half;
    for (int i = 0; i < k; ++i) {
      const Vec v = root * u[i];
      half.push_back({SphereVector(v), c[i] * v.squaredNorm()});
    }
    return AtomicMeasure::symmetrized(n, half);
  }
}

/**
 * @brief Even isotropic measure whose support lies within `spread` of +-frame columns:
 * two random directions per axis, weights from the solver.
 */
inline AtomicMeasure near_cross_measure(int n, double spread, Rng& rng, const Mat& frame, int attempts = 200) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int a = 0;; ++a) {
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        Vec t = random_unit_vector(n, rng);
        t -= t.dot(frame.col(i)) * frame.col(i);
        if (t.norm() < 1e-9) continue;
        const double r = spread * uni(rng);
        const Vec d = std::cos(r) * frame.col(i) + std::sin(r) * t.normalized();
        dirs.push_back(d);
        dirs.push_back(-d);
      }
    }
    try {
      return isotropic_measure(dirs, true);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible || a + 1 >= attempts) throw;
    }
  }
}

inline AtomicMeasure near_cross_measure(int n, double spread, Rng& rng) {
  return near_cross_measure(n, spread, rng, Mat::Identity(n, n));
}

/**
 * @brief One measure per grid value: tilt angle, m, number of pairs, or cluster spread.
 * Random draws use derive_seed(seed, index).
 */
inline std::vector<AtomicMeasure> perturbation_family(FamilyKind kind, int n, const std::vector<double>& grid,
                                                      std::uint64_t seed = kDefaultSeed) {
  std::vector<AtomicMeasure> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    switch (kind) {
      case FamilyKind::TiltedPair: out.push_back(tilted_pair_measure(n, g)); break;
      case FamilyKind::Equiangular:
        require(n == 2, ErrorCode::InvalidArgument, "equiangular family lives on S^1");
        out.push_back(equiangular_measure(static_cast<int>(std::lround(g))));
        break;
      case FamilyKind::RandomIsotropic: {
        Rng rng(derive_seed(seed, i));
        out.push_back(random_isotropic_measure(n, static_cast<int>(std::lround(g)), rng));
        break;
      }
      case FamilyKind::SplitCluster: out.push_back(split_cluster_measure(n, g)); break;
    }
    const auto iso = check_isotropy(out.back());
    require(iso.is_isotropic && out.back().even(), ErrorCode::Infeasible, "family member is not even isotropic");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extremal volumes against the cross measure

struct TheoremBOptions {
  double equality_gap = 1e-9;  // relative volume gap below which equality is examined
  double equality_distance = 1e-6;
  int jobs = 1;
};

/**
 * @brief V(Z_p(mu)) >= V(Z_p(nu_n)) - err and V(Z*_p(mu)) <= V(Z*_p(nu_n)) + err, two rows per measure.
 * epsilon is delta_HO; near-equality is cross-checked with delta_WO.
 */
inline std::vector<StabilityReport> theorem_b_suite(int n, double p, const std::vector<AtomicMeasure>& family,
                                                    const TheoremBOptions& o = {}) {
  const double ref_z = reference_volume(ReferenceKind::Z, n, p);
  const double ref_s = reference_volume(ReferenceKind::ZStar, n, p);
  const bool exact = p == 1.0 || is_infinite(p);
  auto rows = parallel_map<std::vector<StabilityReport>>(family.size(), o.jobs, [&](std::size_t i) {
    detail::Stopwatch sw;
    const auto& mu = family[i];
    const auto vz = volume(body_Zp(mu, p));
    const auto vs = volume(body_Zp_star(mu, p));
    const double eps = hausdorff_to_cross(mu.directions()).orbit.value;
    const double slack_z = vz.abs_error + 1e-12 * ref_z, slack_s = vs.abs_error + 1e-12 * ref_s;
    const double gap_z = vz.value / ref_z - 1.0, gap_s = 1.0 - vs.value / ref_s;
    std::string note;
    bool equality_ok = true;
    if (std::min(gap_z, gap_s) <= o.equality_gap + std::max(slack_z / ref_z, slack_s / ref_s)) {
      const double wo = wasserstein_to_cross(mu).value;
      note = "equality examined; delta_WO=" + detail::fmt(wo);
      if (exact) equality_ok = wo <= o.equality_distance || std::min(gap_z, gap_s) > o.equality_gap;
    }
    const double ms = sw.ms();
    StabilityReport z{"theoremB.Z", "mu[" + std::to_string(i) + "]", n, p, eps, "delta_HO", gap_z,
                      -slack_z / ref_z, gap_z >= -slack_z / ref_z && equality_ok, slack_z / ref_z, ms, note};
    StabilityReport s{"theoremB.Zstar", "mu[" + std::to_string(i) + "]", n, p, eps, "delta_HO", gap_s,
                      -slack_s / ref_s, gap_s >= -slack_s / ref_s && equality_ok, slack_s / ref_s, ms, note};
    return std::vector<StabilityReport>{z, s};
  });
  std::vector<StabilityReport> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sharp constants on S^1

/// Largest angular gap between consecutive support points on S^1.
inline double max_support_gap(const std::vector<Vec>& pts) {
  std::vector<double> ang;
  for (const auto& u : pts) ang.push_back(std::atan2(u[1], u[0]));
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2 * kPi - ang.back();
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  return gap;
}

/// Proper sets: every open quarter circle meets the support, i.e. consecutive gaps <= pi/2.
inline void require_proper(const std::vector<Vec>& pts) {
  require(max_support_gap(pts) <= kPi / 2 + 1e-12, ErrorCode::NotProper, "an open quarter circle misses the support");
}

struct SharpS1 {
  double epsilon = 0.0;  // delta_HO(supp mu, supp nu_2)
  double area_z = 0.0;   // V(Z_inf(mu))
  double area_zstar = 0.0;
  double bound_z = 0.0;  // (1 + 0.25 eps) * 2
  double bound_zstar = 0.0;  // (1 - 0.1 eps) * 4
  bool pair_exists = true;   // two support points at angle in [eps, pi/2 - eps]
  bool pass = false;
};

inline constexpr double kAreaTolerance = 1e-12;

/// Sharp planar bounds for an even isotropic mu on S^1 with exact polygon areas.
inline SharpS1 s1_sharp_check(const AtomicMeasure& mu) {
  require(mu.dim() == 2, ErrorCode::InvalidArgument, "sharp S^1 check needs n = 2");
  require(mu.even(), ErrorCode::InvalidArgument, "measure must be even");
  const auto pts = mu.directions();
  require_proper(pts);
  require_isotropic(mu);
  SharpS1 r;
  r.epsilon = hausdorff_to_cross(pts).orbit.value;
  r.area_z = volume(body_Zp(mu, kInf)).value;
  r.area_zstar = volume(body_Zp_star(mu, kInf)).value;
  r.bound_z = (1.0 + 0.25 * r.epsilon) * 2.0;
  r.bound_zstar = (1.0 - 0.1 * r.epsilon) * 4.0;
  const double eta = std::min(r.epsilon, kPi / 4);
  if (eta > 1e-9) {
    r.pair_exists = false;
    for (const auto& u : pts)
      for (const auto& v : pts) {
        const double a = angle_between(u, v);
        if (a >= eta - 1e-9 && a <= kPi / 2 - eta + 1e-9) r.pair_exists = true;
      }
  }
  r.pass = r.area_z >= r.bound_z - kAreaTolerance && r.area_zstar <= r.bound_zstar + kAreaTolerance && r.pair_exists;
  return r;
}

/// Two rows per measure (Z and Z* bounds).
inline std::vector<StabilityReport> s1_sharp_suite(const std::vector<AtomicMeasure>& family,
                                                   const std::vector<std::string>& labels = {}, int jobs = 1) {
  auto rows = parallel_map<std::vector<StabilityReport>>(family.size(), jobs, [&](std::size_t i) {
    detail::Stopwatch sw;
    const auto r = s1_sharp_check(family[i]);
    const double ms = sw.ms();
    const std::string label = i < labels.size() ? labels[i] : "mu[" + std::to_string(i) + "]";
    const std::string note = r.pair_exists ? "" : "no support pair with angle in [eps, pi/2 - eps]";
    StabilityReport z{"s1.Zinf", label, 2, kInf, r.epsilon, "delta_HO", r.area_z, r.bound_z,
                      r.area_z >= r.bound_z - kAreaTolerance && r.pair_exists, kAreaTolerance, ms, note};
    StabilityReport s{"s1.Zinf_star", label, 2, kInf, r.epsilon, "delta_HO", r.area_zstar, r.bound_zstar,
                      r.area_zstar <= r.bound_zstar + kAreaTolerance && r.pair_exists, kAreaTolerance, ms, note};
    return std::vector<StabilityReport>{z, s};
  });
  std::vector<StabilityReport> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

/// The 64-point sweep: equiangular m = 2..17 and tilted pairs at 48 angles in (0, 0.75].
inline std::vector<std::pair<std::string, AtomicMeasure>> s1_sweep_family() {
  std::vector<std::pair<std::string, AtomicMeasure>> out;
  for (int m = 2; m <= 17; ++m) out.emplace_back("equiangular m=" + std::to_string(m), equiangular_measure(m));
  for (int k = 1; k <= 48; ++k) {
    const double a = 0.75 * k / 48.0;
    out.emplace_back("tilted alpha=" + detail::fmt(a), tilted_pair_measure(2, a));
  }
  return out;
}

/**
 * @brief Grid checks of the one-variable facts behind the sharp planar bounds: F increasing,
 * G decreasing, sin a + cos a >= 1 + 0.5 eps on [eps, pi/2 - eps], and the closing arithmetic
 * 2 (1 / (1 + 0.25 eps) + 1) < 4 (1 - 0.1 eps); plus dominance over gamma eps^3 for gamma <= 0.1.
 */
inline std::vector<StabilityReport> s1_lemma_checks(int grid = 64) {
  std::vector<StabilityReport> out;
  auto row = [&](const std::string& tag, double worst, bool pass, const std::string& note) {
    out.push_back({tag, "grid " + std::to_string(grid), 2, kInf, 0.0, "none", worst, 0.0, pass, 0.0, 0.0, note});
  };
  detail::Stopwatch sw;
  // (P) and G on 0 <= beta <= alpha < pi/2.
  double worst_f = kInf, worst_g = kInf;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j <= i; ++j) {
      const double alpha = (kPi / 2) * i / grid, beta = (kPi / 2) * j / grid;
      const double tmax = std::min(beta, kPi / 2 - alpha);
      if (tmax <= 0) continue;
      double prev_f = -kInf, prev_g = kInf;
      for (int k = 0; k <= 32; ++k) {
        const double t = tmax * k / 32;
        const double f = std::tan((alpha + t) / 2) + std::tan((beta - t) / 2);
        const double g = std::sin(alpha + t) + std::sin(beta - t);
        if (k > 0) {
          worst_f = std::min(worst_f, f - prev_f);
          worst_g = std::min(worst_g, prev_g - g);
        }
        prev_f = f;
        prev_g = g;
      }
    }
  row("s1.lemma.P", worst_f, worst_f > 0, "min increment of F");
  row("s1.lemma.G", worst_g, worst_g > -1e-15, "min decrement of G");
  double worst_an = kInf, worst_close = kInf, worst_dom = kInf;
  for (int i = 1; i < grid; ++i) {
    const double eps = (kPi / 4) * i / grid;
    for (int k = 0; k <= grid; ++k) {
      const double a = eps + (kPi / 2 - 2 * eps) * k / grid;
      worst_an = std::min(worst_an, std::sin(a) + std::cos(a) - 1.0 - 0.5 * eps);
    }
    worst_close = std::min(worst_close, 4.0 * (1 - 0.1 * eps) - 2.0 * (1.0 / (1 + 0.25 * eps) + 1.0));
  }
  for (int i = 1; i < grid; ++i) {
    const double eps = static_cast<double>(i) / grid;
    worst_dom = std::min({worst_dom, 0.25 * eps - 0.1 * eps * eps * eps, 0.1 * eps - 0.1 * eps * eps * eps});
  }
  row("s1.lemma.anlem", worst_an, worst_an >= -1e-15, "min of sin a + cos a - 1 - eps/2");
  row("s1.lemma.closing", worst_close, worst_close > 0, "min of 4(1 - eps/10) - 2(1/(1 + eps/4) + 1)");
  row("s1.lemma.dominance", worst_dom, worst_dom > 0, "linear constants beat 0.1 eps^3 on (0, 1)");
  for (auto& r : out) r.runtime_ms = sw.ms();
  return out;
}

// ---------------------------------------------------------------------------
// Stability trends

struct TrendOptions {
  bool monotone = false;  // family ordered by a perturbation parameter
  double distance_tolerance = 1e-6;
  int jobs = 1;
};

/**
 * @brief Direction-only consistency: epsilon = delta_WO > tol forces a positive deficit, epsilon ~ 0
 * forces deficit ~ 0, and along ordered families the deficit increases strictly.
 * deficit = min(V(Z_p)/V(Z_p(nu)) - 1, 1 - V(Z*_p)/V(Z*_p(nu))).
 */
inline std::vector<StabilityReport> zpmustab_consistency(int n, double p, const std::vector<AtomicMeasure>& family,
                                                         const TrendOptions& o = {}) {
  require(std::abs(p - 2.0) > 1e-12, ErrorCode::InvalidArgument, "p = 2 carries no stability");
  const double ref_z = reference_volume(ReferenceKind::Z, n, p);
  const double ref_s = reference_volume(ReferenceKind::ZStar, n, p);
  auto rows = parallel_map<StabilityReport>(family.size(), o.jobs, [&](std::size_t i) {
    detail::Stopwatch sw;
    const auto& mu = family[i];
    const auto vz = volume(body_Zp(mu, p));
    const auto vs = volume(body_Zp_star(mu, p));
    StabilityReport r;
    r.tag = "zpstab";
    r.label = "mu[" + std::to_string(i) + "]";
    r.n = n;
    r.p = p;
    r.distance = "delta_WO";
    r.epsilon = wasserstein_to_cross(mu).value;
    r.deficit = std::min(vz.value / ref_z - 1.0, 1.0 - vs.value / ref_s);
    r.tolerance = std::max(vz.abs_error / ref_z, vs.abs_error / ref_s) + 1e-12;
    r.bound = r.tolerance;
    r.pass = r.epsilon > o.distance_tolerance ? r.deficit > r.tolerance : std::abs(r.deficit) <= r.tolerance;
    r.note = "direction-only";
    r.runtime_ms = sw.ms();
    return r;
  });
  if (o.monotone)
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const bool up = rows[i].deficit > rows[i - 1].deficit + rows[i].tolerance;
      if (!up) {
        rows[i].pass = false;
        rows[i].note += "; deficit not increasing";
      }
    }
  return rows;
}

// ---------------------------------------------------------------------------
// Polytope families

/// conv{(+-1, +-1), (+-(1 + t1), s1), (s2, +-(1 + t2))} made symmetric.
inline BodyRep octagon_body(double t1, double t2, double s1 = 0.0, double s2 = 0.0) {
  std::vector<Vec> v = {make_vec({1, 1}), make_vec({-1, 1}), make_vec({1 + t1, s1}), make_vec({s2, 1 + t2})};
  const std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) v.push_back(-v[i]);
  return BodyRep::from_vertices(v);
}

/// W^2 with each corner cut by a segment at distance c along both edges.
inline BodyRep cut_corner_square(double c) {
  require(c >= 0 && c < 1, ErrorCode::InvalidArgument, "cut must lie in [0, 1)");
  std::vector<Vec> v;
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0}) {
      v.push_back(make_vec({sx, sy * (1 - c)}));
      v.push_back(make_vec({sx * (1 - c), sy}));
    }
  return BodyRep::from_vertices(v);
}

/// W^3 with a simplex of height h cut at every vertex.
inline BodyRep truncated_cube(double h) {
  require(h >= 0 && h < std::sqrt(3.0) - 1.0, ErrorCode::InvalidArgument, "cut height out of range");
  Mat a(14, 3);
  Vec b(14);
  int r = 0;
  for (int i = 0; i < 3; ++i)
    for (double s : {1.0, -1.0}) {
      a.row(r) = s * unit(3, i).transpose();
      b[r++] = 1.0;
    }
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) {
        a.row(r) = make_vec({sx, sy, sz}).transpose() / std::sqrt(3.0);
        b[r++] = std::sqrt(3.0) - h;
      }
  return BodyRep::from_halfspaces(a, b);
}

/// Regular hexagon with vertices on the unit circle.
inline BodyRep regular_hexagon() {
  std::vector<Vec> v;
  for (int k = 0; k < 6; ++k) v.push_back(make_vec({std::cos(k * kPi / 3), std::sin(k * kPi / 3)}));
  return BodyRep::from_vertices(v);
}

/// 1 - (S^n / V^{n-1}) / (S(W^n)^n / V(W^n)^{n-1}).
inline double isoperimetric_deficit(const BodyRep& k) {
  const int n = k.dim();
  const double cube = std::pow(2.0 * n * std::pow(2.0, n - 1), n) / std::pow(std::pow(2.0, n), n - 1);
  return 1.0 - isoperimetric_ratio(k) / cube;
}

// ---------------------------------------------------------------------------
// Reverse isoperimetry

struct RevisoOptions {
  double deficit_tolerance = 1e-9;
  double distance_tolerance = 1e-6;
  int bm_starts = 16;
  int vol_starts = 4;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
};

/**
 * @brief Per body: John-normalize, compare the ratio deficit with delta_BM to W^n in direction,
 * and check the contact-measure chain K subset Z*_inf(mu) plus the cube sandwich when it applies.
 */
inline std::vector<StabilityReport> reverse_isoperimetric_suite(const std::vector<BodyRep>& bodies,
                                                                const std::vector<std::string>& labels = {},
                                                                const RevisoOptions& o = {}) {
  return parallel_map<StabilityReport>(bodies.size(), o.jobs, [&](std::size_t i) {
    detail::Stopwatch sw;
    const int n = bodies[i].dim();
    const BodyRep k = john_normalize(bodies[i]);
    StabilityReport r;
    r.tag = "reviso";
    r.label = i < labels.size() ? labels[i] : "K[" + std::to_string(i) + "]";
    r.n = n;
    r.p = kInf;
    r.distance = "delta_BM";
    r.deficit = isoperimetric_deficit(k);
    const BodyRep w = cube(n);
    r.epsilon = banach_mazur(k, w, o.bm_starts, o.seed).value;
    const auto dv = volume_distance(k, w, o.vol_starts, o.seed);
    r.tolerance = o.distance_tolerance;
    r.bound = 0.0;
    const bool positive_deficit = r.deficit > o.deficit_tolerance;
    const bool positive_distance = r.epsilon > o.distance_tolerance;
    bool ok = positive_deficit == positive_distance && r.deficit >= -o.deficit_tolerance;
    std::string note = "delta_vol=" + detail::fmt(dv.value);

    const auto mu = contact_measure(k);
    const auto zs = body_Zp_star(mu, kInf);
    bool inside = true;
    for (const auto& v : k.vertices()) inside = inside && zs.gauge(v) <= 1.0 + 1e-9;
    ok = ok && inside;
    note += inside ? "; K in Z*_inf(mu)" : "; K not in Z*_inf(mu)";
    const double dh = hausdorff_spherical(mu.directions(), cross_points(Mat::Identity(n, n))).value;
    if (dh < 1.0 / (3 * n)) {
      const double alpha = 0.5 * (dh + 1.0 / (3 * n));
      const auto sand = cube_sandwich_check(mu, alpha);
      ok = ok && sand.pass;
      note += sand.pass ? "; cube sandwich holds" : "; cube sandwich fails";
    } else {
      note += "; cube sandwich not applicable (delta_H=" + detail::fmt(dh) + ")";
    }
    r.pass = ok;
    r.note = note;
    r.runtime_ms = sw.ms();
    return r;
  });
}

// ---------------------------------------------------------------------------
// Planar square construction

struct PlanarChain {
  double t1 = 0.0, t2 = 0.0, t = 0.0, t_max = 0.0;
  double support_p1 = 0.0, support_p2 = 0.0;  // h_K at (1,1), (-1,1)
  double perimeter_m = 0.0, perimeter_m_formula = 0.0;
  double area_q = 0.0, area_q_formula = 0.0;
  double deficit = 0.0;        // planar isoperimetric deficit epsilon
  double epsilon_lower = 0.0;  // (3 - 2 sqrt 2) t (1 - t) / (1 + t)
  double delta_bm = 0.0;       // upper bound on delta_BM(K, W^2)
  double delta_vol = 0.0;      // upper bound on delta_vol(K, W^2)
  bool square_inscribed = false;
  bool chain_inclusions = false;  // W subset Q subset K subset M subset (1 + t_max) W
  bool identities = false;
  bool t_bound = false;    // t <= 18 eps
  bool vol_bound = false;  // 3t <= 54 eps and delta_vol <= 54 eps
  bool bm_bound = false;   // delta_BM <= log(1 + t_max) and <= 18 eps
  bool theorem = false;    // eps >= max(delta_vol, delta_BM) / 54
  bool pass = false;
};

inline constexpr double kPlanarIdentityTolerance = 1e-12;

/**
 * @brief Builds Q and M for a symmetric polygon K with W^2 inscribed and (+-1, +-1) on its boundary.
 * @param distances also run the Banach-Mazur and volume-distance searches.
 */
inline PlanarChain planar_chain(const BodyRep& k, bool distances = true, std::uint64_t seed = kDefaultSeed) {
  require(k.dim() == 2 && k.is_polytope(), ErrorCode::InvalidArgument, "planar chain needs a polygon");
  const auto verts = k.extreme_vertices();
  auto h = [&](const Vec& d) {
    double m = -kInf;
    for (const auto& v : verts) m = std::max(m, v.dot(d));
    return m;
  };
  auto argmax = [&](const Vec& d) {
    Vec best = verts.front();
    for (const auto& v : verts)
      if (v.dot(d) > best.dot(d) + 1e-15) best = v;
    return best;
  };
  PlanarChain c;
  const Vec p1 = make_vec({1, 1}), p2 = make_vec({-1, 1});
  const double tol = kPlanarIdentityTolerance;
  c.square_inscribed = k.gauge(p1) <= 1 + tol && k.gauge(p2) <= 1 + tol && std::abs(k.gauge(p1) - 1) <= 1e-9 &&
                       std::abs(k.gauge(p2) - 1) <= 1e-9;
  c.t1 = h(unit(2, 0)) - 1.0;
  c.t2 = h(unit(2, 1)) - 1.0;
  c.t = 0.5 * (c.t1 + c.t2);
  c.t_max = std::max(c.t1, c.t2);
  c.support_p1 = h(p1);
  c.support_p2 = h(p2);
  const Vec q1 = argmax(unit(2, 0)), q2 = argmax(unit(2, 1));

  std::vector<Vec> m = {make_vec({1 + c.t1, -(1 + c.t2)}), make_vec({1 + c.t1, 1 + c.t2}),
                        make_vec({-(1 + c.t1), 1 + c.t2}), make_vec({-(1 + c.t1), -(1 + c.t2)})};
  m = poly::clip_polygon(m, p1, c.support_p1);
  m = poly::clip_polygon(m, -p1, c.support_p1);
  m = poly::clip_polygon(m, p2, c.support_p2);
  m = poly::clip_polygon(m, -p2, c.support_p2);
  c.perimeter_m = poly::polygon_perimeter(m);
  c.perimeter_m_formula = (1.0 + (std::sqrt(2.0) - 1.0) * c.t) * 8.0;
  const auto q = poly::hull2d({p1, p2, -p1, -p2, q1, q2, -q1, -q2});
  c.area_q = std::abs(poly::polygon_area(q));
  c.area_q_formula = (1.0 + c.t) * 4.0;
  c.identities = std::abs(c.perimeter_m - c.perimeter_m_formula) <= tol * 8.0 &&
                 std::abs(c.area_q - c.area_q_formula) <= tol * 4.0;

  bool incl = c.square_inscribed;
  for (const auto& v : q) incl = incl && k.gauge(v) <= 1 + 1e-12;
  for (const auto& v : verts)
    incl = incl && std::abs(v[0]) <= 1 + c.t_max + tol && std::abs(v[1]) <= 1 + c.t_max + tol &&
           std::abs(v.dot(p1)) <= c.support_p1 + tol && std::abs(v.dot(p2)) <= c.support_p2 + tol;
  c.chain_inclusions = incl;

  c.deficit = isoperimetric_deficit(k);
  c.epsilon_lower = (3.0 - 2.0 * std::sqrt(2.0)) * c.t * (1.0 - c.t) / (1.0 + c.t);
  c.t_bound = c.t <= 18.0 * c.deficit + 1e-12 && c.deficit >= c.epsilon_lower - 1e-12 &&
              c.epsilon_lower >= c.t / 18.0 - 1e-15;

  // delta_vol with Phi = Id: both bodies normalized to unit area, clipped exactly.
  const double vk = volume(k).value;
  std::vector<Vec> kk, ww;
  for (const auto& v : poly::hull2d(verts)) kk.push_back(v / std::sqrt(vk));
  for (const auto& v : poly::hull2d({p1, p2, -p1, -p2})) ww.push_back(v / 2.0);
  const auto inter = poly::intersect_convex(kk, ww);
  c.delta_vol = 2.0 - 2.0 * (inter.size() >= 3 ? std::abs(poly::polygon_area(inter)) : 0.0);
  c.delta_bm = std::log(1.0 + c.t_max);
  if (distances) {
    c.delta_vol = std::min(c.delta_vol, volume_distance(k, cube(2), 12, seed).value);
    c.delta_bm = std::min(c.delta_bm, banach_mazur(k, cube(2), 16, seed).value);
  }
  c.vol_bound = 3.0 * c.t <= 54.0 * c.deficit + 1e-12 && c.delta_vol <= 54.0 * c.deficit + 1e-12;
  c.bm_bound = c.delta_bm <= std::log(1.0 + c.t_max) + 1e-12 && c.delta_bm <= 18.0 * c.deficit + 1e-12;
  c.theorem = c.deficit >= std::max(c.delta_vol, c.delta_bm) / 54.0 - 1e-12;
  c.pass = c.square_inscribed && c.chain_inclusions && c.identities && c.t_bound && c.vol_bound && c.bm_bound &&
           c.theorem;
  return c;
}

struct SquareNormalization {
  Mat map;           // Phi with Phi a = (1, 1), Phi b = (-1, 1)
  double area = 0.0;  // area of the maximal inscribed parallelogram of K
  int maximizers = 0;  // vertex pairs attaining it (up to sign)
};

/**
 * @brief Maximum-area inscribed symmetric parallelogram [+-a, +-b]. The area 2|det(a, b)| is
 * bilinear, so the maximum is attained at vertex pairs and the search is exhaustive.
 */
inline SquareNormalization square_normalization(const BodyRep& k) {
  require(k.dim() == 2 && k.is_polytope(), ErrorCode::NoSquareNormalization, "needs a symmetric polygon");
  const auto v = k.extreme_vertices();
  double best = 0.0;
  Vec a, b;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double d = v[i][0] * v[j][1] - v[i][1] * v[j][0];
      if (std::abs(d) > best * (1 + 1e-13)) {
        best = std::abs(d);
        a = v[i];
        b = d > 0 ? v[j] : Vec(-v[j]);
      }
    }
  require(best > 1e-12, ErrorCode::NoSquareNormalization, "no nondegenerate inscribed parallelogram");
  SquareNormalization s;
  s.area = 2.0 * best;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (std::abs(std::abs(v[i][0] * v[j][1] - v[i][1] * v[j][0]) - best) <= 1e-12 * best) ++s.maximizers;
  s.maximizers /= 2;  // (a, b) and (-a, -b) give the same parallelogram
  Mat src(2, 2), dst(2, 2);
  src << a[0], b[0], a[1], b[1];
  dst << 1, -1, 1, 1;
  s.map = dst * src.inverse();
  return s;
}

inline StabilityReport planar_report(const std::string& label, const PlanarChain& c, double ms,
                                     const std::string& extra = "") {
  StabilityReport r;
  r.tag = "planar";
  r.label = label;
  r.n = 2;
  r.p = kInf;
  r.epsilon = std::max(c.delta_bm, c.delta_vol);
  r.distance = "max(delta_BM, delta_vol)";
  r.deficit = c.deficit;
  r.bound = r.epsilon / 54.0;
  r.pass = c.pass;
  r.tolerance = kPlanarIdentityTolerance;
  r.runtime_ms = ms;
  std::string note = "t=" + detail::fmt(c.t) + "; t_max=" + detail::fmt(c.t_max);
  if (!c.identities) note += "; S(M)/V(Q) identities fail";
  if (!c.chain_inclusions) note += "; inclusion chain fails";
  if (!c.t_bound) note += "; t <= 18 eps fails";
  if (!c.vol_bound) note += "; delta_vol <= 54 eps fails";
  if (!c.bm_bound) note += "; delta_BM bound fails";
  if (!extra.empty()) note += "; " + extra;
  r.note = note;
  return r;
}

/// Normalize so the maximal inscribed parallelogram is W^2, then run the construction.
inline StabilityReport planar_suite(const BodyRep& k, const std::string& label = "K",
                                    std::uint64_t seed = kDefaultSeed) {
  detail::Stopwatch sw;
  const auto s = square_normalization(k);
  const auto c = planar_chain(k.linear_image(s.map), true, seed);
  const std::string extra = s.maximizers > 1 ? std::to_string(s.maximizers) + " maximal parallelograms" : "";
  return planar_report(label, c, sw.ms(), extra);
}

// ---------------------------------------------------------------------------
// Component suites

/// Derivative box, second-derivative bounds (p != 2) and mass transport per exponent.
inline std::vector<StabilityReport> transport_suite(const std::vector<double>& ps, int grid = 256, int jobs = 1) {
  auto rows = parallel_map<std::vector<StabilityReport>>(ps.size(), jobs, [&](std::size_t i) {
    const double p = ps[i];
    std::vector<StabilityReport> out;
    auto add = [&](const std::string& tag, const transport::BoundReport& b, double ms) {
      double worst = kInf;
      for (const auto& row : b.rows) worst = std::min(worst, row.margin);
      const std::string note =
          b.witness ? b.witness->quantity + " violated at t=" + detail::fmt(b.witness->t) : std::string();
      out.push_back({tag, "p=" + detail::fmt(p), 1, p, 0.0, "none", worst, 0.0, b.pass, 0.0, ms, note});
    };
    detail::Stopwatch s1;
    add("transport.box", transport::verify_derivative_box(p, grid), s1.ms());
    if (std::abs(p - 2.0) >= 1e-3) {
      detail::Stopwatch s2;
      add("transport.second", transport::verify_second_derivative_bounds(p, grid), s2.ms());
    }
    detail::Stopwatch s3;
    add("transport.mass", transport::verify_mass_transport(p, grid), s3.ms());
    return out;
  });
  std::vector<StabilityReport> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

/// Random decomposition systems: Cauchy-Binet identity and the strengthened determinant inequality.
inline std::vector<StabilityReport> ballbarthe_suite(int count, std::uint64_t seed = kDefaultSeed, int jobs = 1) {
  return parallel_map<StabilityReport>(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
    detail::Stopwatch sw;
    Rng rng(derive_seed(seed, i));
    const int n = 2 + static_cast<int>(i % 2);
    std::uniform_int_distribution<int> kd(n + 1, 10);
    const int k = kd(rng);
    const auto sys = bb::DecompositionSystem::random(n, k, rng);
    std::uniform_real_distribution<double> lt(std::log(0.1), std::log(10.0));
    std::vector<double> t;
    for (int j = 0; j < k; ++j) t.push_back(std::exp(lt(rng)));
    const auto ex = bb::subset_expansion(sys, t);
    const auto th = bb::theta_star(sys, t);
    StabilityReport r;
    r.tag = "ballbarthe";
    r.label = "n=" + std::to_string(n) + " k=" + std::to_string(k);
    r.n = n;
    r.p = 0.0;
    r.distance = "theta_star";
    r.epsilon = th.theta;
    r.deficit = th.lhs / th.rhs - 1.0;
    r.bound = 0.0;
    r.tolerance = 1e-9;
    r.pass = ex.identity_holds && th.strengthened_pass && th.theta >= 1.0;
    r.note = "expansion residual=" + detail::fmt(std::abs(ex.det_value - ex.expansion_sum) / std::abs(ex.expansion_sum));
    r.runtime_ms = sw.ms();
    return r;
  });
}

/// Isotropic cap bound on random (mu, v, alpha) and Dvoretzky-Rogers postconditions on random measures.
inline std::vector<StabilityReport> caps_suite(int count, std::uint64_t seed = kDefaultSeed, int jobs = 1) {
  return parallel_map<StabilityReport>(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
    detail::Stopwatch sw;
    Rng rng(derive_seed(seed, i));
    const int n = 2 + static_cast<int>(i % 2);
    std::uniform_int_distribution<int> kd(n + 1, n + 5);
    const auto mu = random_isotropic_measure(n, kd(rng), rng);
    std::uniform_real_distribution<double> ad(0.05, kPi / 2);
    const SphereVector v(random_unit_vector(n, rng));
    const auto cap = verify_isotropic_cap_bound(mu, v, ad(rng));
    const auto dr = dvoretzky_rogers_caps(mu);
    const double beta_n = std::pow(dr.beta, n);
    bool masses = true;
    for (double m : dr.cap_masses) masses = masses && m >= beta_n * (1 - 1e-12);
    StabilityReport r;
    r.tag = "caps";
    r.label = "mu[" + std::to_string(i) + "]";
    r.n = n;
    r.p = kInf;
    r.distance = "none";
    r.epsilon = 0.0;
    r.deficit = dr.det;
    r.bound = 4.0 * n * dr.beta;
    r.tolerance = 1e-12;
    r.pass = cap.pass && masses && dr.det >= r.bound * (1 - 1e-12);
    r.note = std::string(cap.pass ? "" : "cap bound fails; ") + (masses ? "" : "DR cap mass below beta^n");
    r.runtime_ms = sw.ms();
    return r;
  });
}

}  // namespace isozonoid::stability

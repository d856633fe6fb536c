#pragma once

// L_p zonoids Z_p(mu), their polars Z*_p(mu), the auxiliary bodies M_p(mu), and volumes.

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/linalg.hpp"
#include "isozonoid/polytope.hpp"
#include "isozonoid/special.hpp"
#include "isozonoid/sphere_measures.hpp"

namespace isozonoid {

enum class BodyKind { VRep, HRep, SupportOracle, GaugeOracle };

inline const char* to_string(BodyKind k) {
  switch (k) {
    case BodyKind::VRep: return "V_REP";
    case BodyKind::HRep: return "H_REP";
    case BodyKind::SupportOracle: return "SUPPORT_ORACLE";
    case BodyKind::GaugeOracle: return "GAUGE_ORACLE";
  }
  return "?";
}

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

/**
 * @brief Convex body given by vertices, halfspaces {A x <= b}, a support function or a gauge.
 *
 * Polytope kinds keep a lazily built copy of the other representation (n <= 3 for H_REP).
 */
class BodyRep {
 public:
  static BodyRep from_vertices(std::vector<Vec> v, bool origin_symmetric = true) {
    require(!v.empty(), ErrorCode::DegenerateBody, "no vertices");
    const int n = static_cast<int>(v[0].size());
    Mat m(n, static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) {
      require(v[j].size() == n, ErrorCode::InvalidArgument, "vertex dimension mismatch");
      m.col(static_cast<Eigen::Index>(j)) = v[j];
    }
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(1e-10);
    require(lu.rank() == n, ErrorCode::DegenerateBody, "vertices do not span R^n");
    BodyRep b(n, BodyKind::VRep, origin_symmetric);
    b.vertices_ = std::move(v);
    return b;
  }

  static BodyRep from_halfspaces(Mat a, Vec rhs, bool origin_symmetric = true) {
    require(a.rows() == rhs.size() && a.rows() > 0, ErrorCode::InvalidArgument, "halfspace shape mismatch");
    require(poly::positively_spanning(a), ErrorCode::UnboundedBody, "halfspaces do not bound a region");
    BodyRep b(static_cast<int>(a.cols()), BodyKind::HRep, origin_symmetric);
    b.a_ = std::move(a);
    b.b_ = std::move(rhs);
    return b;
  }

  /// `grad` (optional) returns the touching point grad h(v) used by the inner sandwich body.
  static BodyRep from_support(int n, ScalarField h, VectorField grad = {}, bool origin_symmetric = true) {
    BodyRep b(n, BodyKind::SupportOracle, origin_symmetric);
    b.field_ = std::move(h);
    b.grad_ = std::move(grad);
    Rng rng(17);
    for (int i = 0; i < 4; ++i) {
      const Vec v = random_unit_vector(n, rng);
      const double h1 = b.field_(v), h2 = b.field_(2.0 * v);
      require(std::abs(h2 - 2.0 * h1) <= 1e-10 * std::max(1.0, std::abs(h2)), ErrorCode::InvalidArgument,
              "support oracle is not positively homogeneous");
      require(h1 > 0, ErrorCode::DegenerateBody, "origin is not interior");
    }
    return b;
  }

  static BodyRep from_gauge(int n, ScalarField g, bool origin_symmetric = true) {
    BodyRep b(n, BodyKind::GaugeOracle, origin_symmetric);
    b.field_ = std::move(g);
    return b;
  }

  int dim() const { return dim_; }
  BodyKind kind() const { return kind_; }
  bool origin_symmetric() const { return symmetric_; }
  bool is_polytope() const { return kind_ == BodyKind::VRep || kind_ == BodyKind::HRep; }

  /// Vertices (extreme points for V_REP input are not pruned; use extreme_vertices for that).
  const std::vector<Vec>& vertices() const {
    if (kind_ == BodyKind::VRep) return vertices_;
    require(kind_ == BodyKind::HRep, ErrorCode::InvalidArgument, "body has no vertex representation");
    if (!cache_->vertices) cache_->vertices = poly::hrep_vertices(a_, b_);
    return *cache_->vertices;
  }

  std::vector<Vec> extreme_vertices() const { return poly::extreme_points(vertices()); }

  /// Facet rows (unit normals) and offsets.
  std::pair<Mat, Vec> halfspaces() const {
    if (kind_ == BodyKind::HRep) return {a_, b_};
    require(kind_ == BodyKind::VRep, ErrorCode::InvalidArgument, "body has no halfspace representation");
    if (!cache_->facets) {
      const auto f = poly::facets(vertices_);
      Mat a(static_cast<Eigen::Index>(f.size()), dim_);
      Vec b(static_cast<Eigen::Index>(f.size()));
      for (std::size_t j = 0; j < f.size(); ++j) {
        a.row(static_cast<Eigen::Index>(j)) = f[j].a.transpose();
        b[static_cast<Eigen::Index>(j)] = f[j].b;
      }
      cache_->facets = std::make_pair(a, b);
    }
    return *cache_->facets;
  }

  double support(const Vec& v) const {
    switch (kind_) {
      case BodyKind::SupportOracle: return field_(v);
      case BodyKind::VRep:
      case BodyKind::HRep: {
        double s = -kInf;
        for (const auto& x : vertices()) s = std::max(s, v.dot(x));
        return s;
      }
      case BodyKind::GaugeOracle: break;
    }
    throw Error(ErrorCode::InvalidArgument, "gauge oracle has no support function");
  }

  /// Minkowski functional; requires the origin in the interior.
  double gauge(const Vec& x) const {
    switch (kind_) {
      case BodyKind::GaugeOracle: return field_(x);
      case BodyKind::VRep:
      case BodyKind::HRep: {
        const auto [a, b] = halfspaces();
        require(b.minCoeff() > 0, ErrorCode::DegenerateBody, "origin is not interior");
        return ((a * x).array() / b.array()).maxCoeff();
      }
      case BodyKind::SupportOracle: break;
    }
    throw Error(ErrorCode::InvalidArgument, "support oracle has no closed-form gauge");
  }

  Vec touching_point(const Vec& v) const {
    require(kind_ == BodyKind::SupportOracle, ErrorCode::InvalidArgument, "touching points need a support oracle");
    if (grad_) return grad_(v);
    Vec g(dim_);
    const double h = 1e-6;
    for (int i = 0; i < dim_; ++i) {
      Vec e = unit(dim_, i) * h;
      g[i] = (field_(v + e) - field_(v - e)) / (2 * h);
    }
    return g;
  }

  /// Image under an invertible linear map.
  BodyRep linear_image(const Mat& phi) const {
    switch (kind_) {
      case BodyKind::VRep: {
        std::vector<Vec> v;
        for (const auto& x : vertices_) v.push_back(phi * x);
        return from_vertices(std::move(v), symmetric_);
      }
      case BodyKind::HRep: {
        const Mat inv = phi.inverse();
        return from_halfspaces(a_ * inv, b_, symmetric_);
      }
      case BodyKind::SupportOracle: {
        const Mat pt = phi.transpose();
        auto h = field_;
        auto g = grad_;
        VectorField ng;
        if (g) ng = [g, pt, phi](const Vec& v) { return Vec(phi * g(pt * v)); };
        return from_support(dim_, [h, pt](const Vec& v) { return h(pt * v); }, ng, symmetric_);
      }
      case BodyKind::GaugeOracle: {
        const Mat inv = phi.inverse();
        auto g = field_;
        return from_gauge(dim_, [g, inv](const Vec& x) { return g(inv * x); }, symmetric_);
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown body kind");
  }

 private:
  struct Cache {
    std::optional<std::vector<Vec>> vertices;
    std::optional<std::pair<Mat, Vec>> facets;
  };

  BodyRep(int n, BodyKind k, bool sym) : dim_(n), kind_(k), symmetric_(sym), cache_(std::make_shared<Cache>()) {}

  int dim_ = 0;
  BodyKind kind_ = BodyKind::VRep;
  bool symmetric_ = true;
  std::vector<Vec> vertices_;
  Mat a_;
  Vec b_;
  ScalarField field_;
  VectorField grad_;
  std::shared_ptr<Cache> cache_;
};

/// Polar body of a polytope containing the origin in its interior.
inline BodyRep polar(const BodyRep& k) {
  if (k.kind() == BodyKind::VRep) {
    const auto& v = k.vertices();
    Mat a(static_cast<Eigen::Index>(v.size()), k.dim());
    for (std::size_t j = 0; j < v.size(); ++j) a.row(static_cast<Eigen::Index>(j)) = v[j].transpose();
    return BodyRep::from_halfspaces(a, Vec::Ones(a.rows()), k.origin_symmetric());
  }
  require(k.kind() == BodyKind::HRep, ErrorCode::InvalidArgument, "polar needs a polytope");
  const auto [a, b] = k.halfspaces();
  require(b.minCoeff() > 0, ErrorCode::DegenerateBody, "origin is not interior");
  std::vector<Vec> v;
  for (Eigen::Index j = 0; j < a.rows(); ++j) v.push_back(a.row(j).transpose() / b[j]);
  return BodyRep::from_vertices(std::move(v), k.origin_symmetric());
}

// ---------------------------------------------------------------------------
// Zonoids of a measure

inline void require_full_support(const AtomicMeasure& mu) {
  Mat m(mu.dim(), static_cast<Eigen::Index>(mu.size()));
  for (std::size_t j = 0; j < mu.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = mu.atoms()[j].u.coords();
  Eigen::FullPivLU<Mat> lu(m);
  lu.setThreshold(1e-10);
  require(lu.rank() == mu.dim(), ErrorCode::DegenerateMeasure, "support lies in a hyperplane");
}

inline void check_p(double p) {
  require(p >= 1.0 || is_infinite(p), ErrorCode::InvalidArgument, "p must lie in [1, inf]");
}

namespace detail {

inline double lp_moment(const AtomicMeasure& mu, double p, const Vec& v) {
  if (is_infinite(p)) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s = std::max(s, std::abs(a.u.dot(v)));
    return s;
  }
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.c * std::pow(std::abs(a.u.dot(v)), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace detail

/// h_{Z_p(mu)}(v) = (int |<u, v>|^p dmu)^{1/p}; max over the support for p = inf.
inline double support_Zp(const AtomicMeasure& mu, double p, const Vec& v) {
  check_p(p);
  require_full_support(mu);
  if (is_infinite(p)) {
    double s = -kInf;
    for (const auto& a : mu.atoms()) s = std::max(s, a.u.dot(v));
    return s;
  }
  return detail::lp_moment(mu, p, v);
}

/// ||x||_{Z*_p(mu)} = (int |<x, u>|^p dmu)^{1/p}; max |<x, u>| for p = inf.
inline double norm_Zp_star(const AtomicMeasure& mu, double p, const Vec& x) {
  check_p(p);
  require_full_support(mu);
  return detail::lp_moment(mu, p, x);
}

/// Zonotope generators g = 2 c u, one per antipodal pair, so Z_1(mu) = sum [-g, g].
inline std::vector<Vec> zonotope_generators(const AtomicMeasure& mu) {
  std::vector<Vec> g;
  for (const auto& a : mu.pair_representatives()) g.push_back(2.0 * a.c * a.u.coords());
  return g;
}

/// Candidate vertex set of sum [-g_j, g_j] from its facets (a superset of the vertices).
inline std::vector<Vec> zonotope_vertices(const std::vector<Vec>& gens) {
  const int n = static_cast<int>(gens[0].size());
  const int k = static_cast<int>(gens.size());
  std::vector<Vec> out;
  double sc = 0.0;
  for (const auto& g : gens) sc = std::max(sc, g.norm());
  const double eps = 1e-12 * std::max(sc, 1e-300);
  for_each_subset(k, n - 1, [&](const std::vector<int>& idx) {
    Mat d(n - 1, n);
    for (int r = 0; r < n - 1; ++r) d.row(r) = gens[idx[r]].transpose();
    Vec w;
    if (n == 1) {
      w = Vec::Ones(1);
    } else {
      Eigen::FullPivLU<Mat> lu(d);
      lu.setThreshold(1e-10);
      if (lu.rank() < n - 1) return;
      w = lu.kernel().col(0).normalized();
    }
    for (double s : {1.0, -1.0}) {
      Vec centre = Vec::Zero(n);
      std::vector<int> in_facet;
      for (int j = 0; j < k; ++j) {
        const double ip = s * w.dot(gens[j]);
        if (std::abs(ip) <= eps) in_facet.push_back(j);
        else centre += (ip > 0 ? 1.0 : -1.0) * gens[j];
      }
      const int f = static_cast<int>(in_facet.size());
      require(f <= 20, ErrorCode::CombinatorialBudget, "too many parallel generators");
      for (int mask = 0; mask < (1 << f); ++mask) {
        Vec x = centre;
        for (int b = 0; b < f; ++b) x += ((mask >> b) & 1 ? 1.0 : -1.0) * gens[in_facet[b]];
        out.push_back(x);
      }
    }
  });
  return out;
}

/// Exact zonotope volume 2^n sum_{n-subsets} |det| (Cauchy-Binet).
inline double zonotope_volume(const std::vector<Vec>& gens) {
  const int n = static_cast<int>(gens[0].size());
  std::vector<double> parts;
  for_each_subset(static_cast<int>(gens.size()), n, [&](const std::vector<int>& idx) {
    std::vector<Vec> cols;
    for (int i : idx) cols.push_back(gens[i]);
    parts.push_back(std::abs(linalg::det_columns(cols)));
  });
  return std::pow(2.0, n) * pairwise_sum(parts);
}

inline BodyRep support_oracle_Zp(const AtomicMeasure& mu, double p) {
  auto h = [mu, p](const Vec& v) { return detail::lp_moment(mu, p, v); };
  auto grad = [mu, p](const Vec& v) {
    const double hv = detail::lp_moment(mu, p, v);
    Vec g = Vec::Zero(mu.dim());
    for (const auto& a : mu.atoms()) {
      const double s = a.u.dot(v);
      if (s != 0.0) g += a.c * std::pow(std::abs(s), p - 1.0) * (s > 0 ? 1.0 : -1.0) * a.u.coords();
    }
    return Vec(g * std::pow(hv, 1.0 - p));
  };
  return BodyRep::from_support(mu.dim(), h, grad);
}

/// Z_p(mu): conv supp for p = inf, the zonotope for p = 1 (n <= 3), a support oracle otherwise.
inline BodyRep body_Zp(const AtomicMeasure& mu, double p) {
  check_p(p);
  require_full_support(mu);
  if (is_infinite(p)) return BodyRep::from_vertices(mu.directions());
  if (p == 1.0 && mu.dim() <= 3)
    return BodyRep::from_vertices(poly::extreme_points(zonotope_vertices(zonotope_generators(mu))));
  return support_oracle_Zp(mu, p);
}

/// Z*_p(mu): {<x, u> <= 1 on supp} for p = inf, polar of the zonotope for p = 1 (n <= 3), a gauge otherwise.
inline BodyRep body_Zp_star(const AtomicMeasure& mu, double p) {
  check_p(p);
  require_full_support(mu);
  if (is_infinite(p)) {
    Mat a(static_cast<Eigen::Index>(mu.size()), mu.dim());
    for (std::size_t j = 0; j < mu.size(); ++j) a.row(static_cast<Eigen::Index>(j)) = mu.atoms()[j].u.coords().transpose();
    return BodyRep::from_halfspaces(a, Vec::Ones(a.rows()));
  }
  if (p == 1.0 && mu.dim() <= 3) return polar(body_Zp(mu, 1.0));
  return BodyRep::from_gauge(mu.dim(), [mu, p](const Vec& x) { return detail::lp_moment(mu, p, x); });
}

// ---------------------------------------------------------------------------
// M_p(mu)

struct MpGauge {
  double gauge = 0.0;
  std::vector<double> theta;  // optimal representation x = sum c_i theta_i u_i
};

/**
 * @brief ||x||_{M_p(mu)} for finite p > 1 by Newton's method on the concave dual
 * D(l) = <l, x> - sum c_i (p - 1) |<l, u_i>/p|^{p*}.
 */
inline MpGauge mp_gauge(const AtomicMeasure& mu, double p, const Vec& x) {
  require(p > 1.0 && !is_infinite(p), ErrorCode::InvalidArgument, "mp_gauge needs finite p > 1");
  require_full_support(mu);
  const int n = mu.dim();
  const auto& at = mu.atoms();
  const double q = conjugate_exponent(p);
  MpGauge out;
  out.theta.assign(at.size(), 0.0);
  const double r = x.norm();
  if (r == 0.0) return out;
  const Vec y = x / r;

  auto dual = [&](const Vec& l) {
    double d = l.dot(y);
    for (const auto& a : at) d -= a.c * (p - 1.0) * std::pow(std::abs(a.u.dot(l)) / p, q);
    return d;
  };
  Vec l = p * y;
  double val = dual(l);
  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    Vec g = y;
    Mat h = Mat::Identity(n, n) * 1e-14;
    for (const auto& a : at) {
      const double s = a.u.dot(l);
      const double m = std::abs(s) / p;
      g -= a.c * (s < 0 ? -1.0 : 1.0) * std::pow(m, q - 1.0) * a.u.coords();
      h += a.c * (q - 1.0) / p * std::pow(std::max(m, 1e-9), q - 2.0) * a.u.coords() * a.u.coords().transpose();
    }
    if (g.norm() <= 1e-14) {
      converged = true;
      break;
    }
    Vec step = h.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) <= 0) step = g;
    // Armijo backtracking: a bare increase lets Newton hop between +-s where |s|^q is not C^2.
    const double slope = step.dot(g);
    double t = 1.0;
    double nv = dual(l + step);
    while (nv < val + 0.1 * t * slope && t > 1e-12) {
      t *= 0.5;
      nv = dual(l + t * step);
    }
    if (nv < val + 0.1 * t * slope) {
      converged = g.norm() <= 1e-10;
      break;
    }
    l += t * step;
    val = nv;
  }
  std::vector<double> th(at.size());
  Vec recon = Vec::Zero(n);
  Mat moment = Mat::Zero(n, n);
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double si = at[i].u.dot(l);
    th[i] = (si < 0 ? -1.0 : 1.0) * std::pow(std::abs(si) / p, q - 1.0);
    recon += at[i].c * th[i] * at[i].u.coords();
    moment += at[i].c * at[i].u.coords() * at[i].u.coords().transpose();
  }
  // Least-squares correction makes theta exactly feasible; the primal value is then an upper
  // bound and <l, y> / h_{Z_q}(l) a lower bound, so their gap certifies the result.
  const Vec fix = moment.ldlt().solve(y - recon);
  double s = 0.0, hq = 0.0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    th[i] += at[i].u.dot(fix);
    out.theta[i] = th[i] * r;
    s += at[i].c * std::pow(std::abs(th[i]), p);
    hq += at[i].c * std::pow(std::abs(at[i].u.dot(l)), q);
  }
  const double upper = std::pow(s, 1.0 / p), lower = l.dot(y) / std::pow(hq, 1.0 / q);
  require(converged || upper - lower <= 1e-9 * upper, ErrorCode::NonConverged, "M_p gauge did not converge");
  out.gauge = r * upper;
  return out;
}

/// M_p(mu): conv supp for p = 1, the zonotope sum c_i [-u_i, u_i] for p = inf, a gauge otherwise.
inline BodyRep mp_body(const AtomicMeasure& mu, double p) {
  check_p(p);
  require_full_support(mu);
  if (p == 1.0) return BodyRep::from_vertices(mu.directions());
  if (is_infinite(p)) {
    if (mu.dim() <= 3) return body_Zp(mu, 1.0);
    return support_oracle_Zp(mu, 1.0);
  }
  return BodyRep::from_gauge(mu.dim(), [mu, p](const Vec& x) { return mp_gauge(mu, p, x).gauge; });
}

// ---------------------------------------------------------------------------
// Volumes

enum class VolumeMethod { Exact, Quadrature, MonteCarlo };

inline const char* to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::Exact: return "EXACT";
    case VolumeMethod::Quadrature: return "QUADRATURE";
    case VolumeMethod::MonteCarlo: return "MONTE_CARLO";
  }
  return "?";
}

struct VolumeResult {
  double value = 0.0;
  double abs_error = 0.0;
  VolumeMethod method = VolumeMethod::Exact;
};

struct VolumeOptions {
  int circle_points = 4096;  // support sandwich, n = 2
  int ico_level = 5;         // support sandwich, n = 3 (10242 nodes)
  int panels_2d = 256;       // gauge quadrature, n = 2
  int nodes_3d = 48;         // gauge quadrature per octant axis, n = 3
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] (Newton on P_m).
inline void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

inline double gauge_volume_2d(const ScalarField& g, int panels, int nodes) {
  std::vector<double> x, w;
  gauss_legendre(nodes, x, w);
  std::vector<double> parts;
  const double h = kPi / panels;  // origin symmetry: integrate over [0, pi) and double
  for (int k = 0; k < panels; ++k) {
    const double a = k * h;
    for (int i = 0; i < nodes; ++i) {
      const double t = a + 0.5 * h * (x[i] + 1.0);
      const double r = 1.0 / g(make_vec({std::cos(t), std::sin(t)}));
      parts.push_back(0.5 * h * w[i] * r * r / 2.0);
    }
  }
  return 2.0 * pairwise_sum(parts);
}

// Octant-wise product rule in (z, phi); dS = dz dphi.
inline double gauge_volume_3d(const ScalarField& g, int nodes) {
  std::vector<double> x, w;
  gauss_legendre(nodes, x, w);
  std::vector<double> parts;
  for (int oz = 0; oz < 2; ++oz)
    for (int op = 0; op < 4; ++op) {
      const double z0 = oz == 0 ? 0.0 : -1.0;
      const double p0 = op * kPi / 2;
      for (int i = 0; i < nodes; ++i) {
        const double z = z0 + 0.5 * (x[i] + 1.0);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < nodes; ++j) {
          const double ph = p0 + kPi / 4 * (x[j] + 1.0);
          const double r = 1.0 / g(make_vec({rho * std::cos(ph), rho * std::sin(ph), z}));
          parts.push_back(0.5 * w[i] * kPi / 4 * w[j] * r * r * r / 3.0);
        }
      }
    }
  return pairwise_sum(parts);
}

inline std::vector<Vec> direction_grid(int n, const VolumeOptions& opt) {
  if (n == 2) return poly::circle_grid(opt.circle_points);
  return poly::icosphere(opt.ico_level);
}

}  // namespace detail

/**
 * @brief Volume of a body: exact for polytopes, support sandwich for support oracles,
 * polar-radial Gauss-Legendre quadrature for gauges.
 */
inline VolumeResult volume(const BodyRep& k, const VolumeOptions& opt = {}) {
  const int n = k.dim();
  VolumeResult r;
  switch (k.kind()) {
    case BodyKind::VRep: {
      r.value = poly::volume_vrep(k.vertices());
      r.abs_error = 0.0;
      r.method = VolumeMethod::Exact;
      return r;
    }
    case BodyKind::HRep: {
      require(n <= 3, ErrorCode::DimensionUnsupported, "exact H_REP volume needs n <= 3");
      r.value = poly::volume_vrep(k.vertices());
      r.abs_error = 0.0;
      r.method = VolumeMethod::Exact;
      return r;
    }
    case BodyKind::SupportOracle: {
      require(n == 2 || n == 3, ErrorCode::DimensionUnsupported, "support sandwich needs n in {2, 3}");
      const auto dirs = detail::direction_grid(n, opt);
      std::vector<Vec> inner, polar_pts;
      for (const auto& v : dirs) {
        const double h = k.support(v);
        require(h > 0 && std::isfinite(h), ErrorCode::UnboundedBody, "support must be positive and finite");
        inner.push_back(k.touching_point(v));
        polar_pts.push_back(v / h);
      }
      double outer = 0.0;
      if (n == 2) {
        // Consecutive tangent lines meet at the vertices of the outer polygon.
        std::vector<Vec> poly_out;
        for (std::size_t j = 0; j < dirs.size(); ++j) {
          const Vec& a = dirs[j];
          const Vec& b = dirs[(j + 1) % dirs.size()];
          Mat m(2, 2);
          m << a[0], a[1], b[0], b[1];
          poly_out.push_back(m.partialPivLu().solve(make_vec({k.support(a), k.support(b)})));
        }
        outer = std::abs(poly::polygon_area(poly_out));
      } else {
        std::vector<Vec> verts;
        for (const auto& f : poly::facets(polar_pts)) verts.push_back(f.a / f.b);
        outer = poly::volume_vrep(verts);
      }
      const double in = poly::volume_vrep(inner);
      r.value = 0.5 * (outer + in);
      r.abs_error = 0.5 * std::abs(outer - in);
      r.method = VolumeMethod::Quadrature;
      return r;
    }
    case BodyKind::GaugeOracle: {
      require(n == 2 || n == 3, ErrorCode::DimensionUnsupported, "gauge quadrature needs n in {2, 3}");
      ScalarField g = [&k](const Vec& x) { return k.gauge(x); };
      double coarse = 0.0, fine = 0.0;
      if (n == 2) {
        coarse = detail::gauge_volume_2d(g, opt.panels_2d, 8);
        fine = detail::gauge_volume_2d(g, 2 * opt.panels_2d, 8);
      } else {
        coarse = detail::gauge_volume_3d(g, opt.nodes_3d);
        fine = detail::gauge_volume_3d(g, 2 * opt.nodes_3d);
      }
      r.value = fine;
      r.abs_error = std::max(std::abs(fine - coarse), 1e-14 * fine);
      r.method = VolumeMethod::Quadrature;
      return r;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown body kind");
}

/// Ball's integral V(Z*_p) = Gamma(1 + n/p)^{-1} int exp(-sum c_i |<x, u_i>|^p) dx by importance sampling.
inline VolumeResult volume_Zp_star_ball_integral(const AtomicMeasure& mu, double p, std::uint64_t seed = kDefaultSeed,
                                                 long samples = 2'000'000, double rel_target = 2e-2) {
  require(p >= 1.0 && !is_infinite(p), ErrorCode::InvalidArgument, "ball integral needs finite p >= 1");
  require_isotropic(mu);
  const int n = mu.dim();
  // Lower bound on the gauge over the unit sphere fixes the Laplace proposal scale.
  double a = kInf;
  const auto dirs = n == 2 ? poly::circle_grid(512) : poly::icosphere(3);
  for (const auto& v : dirs) a = std::min(a, detail::lp_moment(mu, p, v));
  a *= 0.9;
  // p = 1 needs the Laplace tail to dominate; for p > 1 any scale does, so match the second moment of
  // the radial profile exp(-(a r)^p) instead.
  const double s = p == 1.0 ? std::sqrt(static_cast<double>(n)) / a
                            : std::sqrt(std::exp(std::lgamma((n + 2.0) / p) - std::lgamma(n / p)) / (2.0 * n)) / a;
  const double log_norm = n * std::log(2.0 * s);

  Rng rng(seed);
  std::exponential_distribution<double> ex(1.0 / s);
  const int signs = 1 << (n - 1);
  double sum = 0.0, sum2 = 0.0;
  const long draws = std::max<long>(1, samples / signs);
  Vec x(n);
  for (long i = 0; i < draws; ++i) {
    double l1 = 0.0;
    for (int j = 0; j < n; ++j) {
      x[j] = ex(rng);
      l1 += x[j];
    }
    // Stratify over octants: f is even, so 2^{n-1} sign patterns cover all of them.
    double acc = 0.0;
    for (int m = 0; m < signs; ++m) {
      Vec y = x;
      for (int j = 1; j < n; ++j)
        if ((m >> (j - 1)) & 1) y[j] = -y[j];
      double e = 0.0;
      for (const auto& at : mu.atoms()) e += at.c * std::pow(std::abs(at.u.dot(y)), p);
      acc += std::exp(log_norm + l1 / s - e);
    }
    const double f = acc / signs;
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / draws;
  const double var = std::max(0.0, sum2 / draws - mean * mean);
  VolumeResult r;
  const double g = special::gamma(1.0 + n / p);
  r.value = mean / g;
  r.abs_error = 3.0 * std::sqrt(var / draws) / g;
  r.method = VolumeMethod::MonteCarlo;
  require(r.abs_error <= rel_target * r.value, ErrorCode::NonConverged, "Monte-Carlo error target not met");
  return r;
}

enum class ReferenceKind { Z, ZStar };

/// Volumes of Z_p(nu_n) and Z*_p(nu_n); Z at p not in {1, 2, inf} is computed from the definition.
inline double reference_volume(ReferenceKind kind, int n, double p) {
  check_p(p);
  require(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
  if (kind == ReferenceKind::ZStar) {
    if (is_infinite(p)) return std::pow(2.0, n);
    return std::pow(2.0, n) * std::pow(special::gamma(1.0 + 1.0 / p), n) / special::gamma(1.0 + n / p);
  }
  if (p == 1.0) return std::pow(2.0, n);
  if (p == 2.0) return special::unit_ball_volume(n);
  if (is_infinite(p)) return std::pow(2.0, n) / special::factorial(n);
  return volume(body_Zp(cross_measure(n), p)).value;
}

}  // namespace isozonoid

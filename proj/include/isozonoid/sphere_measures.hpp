#pragma once

// Discrete even measures on the unit sphere, isotropy, and spherical-cap estimates.

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/linalg.hpp"
#include "isozonoid/special.hpp"

namespace isozonoid {

/// A unit vector; the constructor normalizes and rejects the zero vector.
class SphereVector {
 public:
  SphereVector() = default;
  explicit SphereVector(const Vec& v) {
    const double r = v.norm();
    require(r > 1e-300 && std::isfinite(r), ErrorCode::InvalidArgument, "zero or non-finite direction");
    coords_ = v / r;
  }

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  double dot(const SphereVector& o) const { return coords_.dot(o.coords_); }
  double dot(const Vec& o) const { return coords_.dot(o); }
  SphereVector operator-() const {
    SphereVector r;
    r.coords_ = -coords_;
    return r;
  }
  double angle_to(const SphereVector& o) const { return angle_between(coords_, o.coords_); }

 private:
  Vec coords_;
};

struct Atom {
  SphereVector u;
  double c = 0.0;
};

inline constexpr double kMergeAngle = 1e-9;
inline constexpr double kEvenTolerance = 1e-12;
inline constexpr double kIsotropyTolerance = 1e-9;

/**
 * @brief Finitely supported Borel measure on S^{n-1}.
 *
 * Directions closer than 1e-9 rad are merged (weights summed). When flagged even,
 * every atom (u, c) must have an antipodal partner (-u, c).
 */
class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  AtomicMeasure(int dim, std::vector<Atom> atoms, bool even) : dim_(dim), even_(even) {
    require(dim >= 2, ErrorCode::InvalidArgument, "dimension must be at least 2");
    for (auto& a : atoms) {
      require(a.u.dim() == dim, ErrorCode::InvalidArgument, "atom dimension mismatch");
      require(a.c > 0 && std::isfinite(a.c), ErrorCode::InvalidArgument, "atom weights must be positive");
      bool merged = false;
      for (auto& b : atoms_) {
        if (b.u.angle_to(a.u) <= kMergeAngle) {
          b.c += a.c;
          merged = true;
          break;
        }
      }
      if (!merged) atoms_.push_back(a);
    }
    require(!atoms_.empty(), ErrorCode::InvalidArgument, "measure has no atoms");
    if (even_) {
      for (const auto& a : atoms_) {
        const int j = find(-a.u);
        require(j >= 0, ErrorCode::InvalidArgument, "even measure lacks an antipodal atom");
        require(std::abs(atoms_[j].c - a.c) <= kEvenTolerance * std::max(1.0, a.c), ErrorCode::InvalidArgument,
                "antipodal weights differ");
      }
    }
  }

  /// Builds an even measure from one representative per antipodal pair; each of u, -u gets weight c.
  static AtomicMeasure symmetrized(int dim, const std::vector<Atom>& half) {
    std::vector<Atom> all;
    all.reserve(2 * half.size());
    for (const auto& a : half) {
      all.push_back(a);
      all.push_back({-a.u, a.c});
    }
    return AtomicMeasure(dim, std::move(all), true);
  }

  int dim() const { return dim_; }
  bool even() const { return even_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double total_mass() const {
    std::vector<double> w;
    for (const auto& a : atoms_) w.push_back(a.c);
    return pairwise_sum(w);
  }

  int find(const SphereVector& u) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i].u.angle_to(u) <= kMergeAngle) return static_cast<int>(i);
    return -1;
  }

  std::vector<Vec> directions() const {
    std::vector<Vec> d;
    for (const auto& a : atoms_) d.push_back(a.u.coords());
    return d;
  }

  /// One atom per antipodal pair (the first encountered); only meaningful for even measures.
  std::vector<Atom> pair_representatives() const {
    std::vector<Atom> reps;
    std::vector<bool> used(atoms_.size(), false);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const int j = find(-atoms_[i].u);
      if (j >= 0) used[j] = true;
      reps.push_back(atoms_[i]);
    }
    return reps;
  }

  /// Push-forward under an orthogonal map.
  AtomicMeasure transformed(const Mat& q) const {
    std::vector<Atom> out;
    for (const auto& a : atoms_) out.push_back({SphereVector(q * a.u.coords()), a.c});
    return AtomicMeasure(dim_, std::move(out), even_);
  }

 private:
  int dim_ = 0;
  bool even_ = false;
  std::vector<Atom> atoms_;
};

/// Cross measure: weight 1/2 at each of +-frame columns.
inline AtomicMeasure cross_measure(int n, const Mat& frame) {
  std::vector<Atom> half;
  for (int i = 0; i < n; ++i) half.push_back({SphereVector(frame.col(i)), 0.5});
  return AtomicMeasure::symmetrized(n, half);
}

inline AtomicMeasure cross_measure(int n) { return cross_measure(n, Mat::Identity(n, n)); }

/// 2m equally spaced atoms on S^1, weight 1/m each (m = 3 is the hexagonal measure).
inline AtomicMeasure equiangular_measure(int m, double phase = 0.0) {
  require(m >= 2, ErrorCode::InvalidArgument, "equiangular measure needs m >= 2");
  std::vector<Atom> half;
  for (int j = 0; j < m; ++j) {
    const double th = phase + kPi * j / m;
    half.push_back({SphereVector(make_vec({std::cos(th), std::sin(th)})), 1.0 / m});
  }
  return AtomicMeasure::symmetrized(2, half);
}

// ---------------------------------------------------------------------------
// Isotropy

inline Mat second_moment_matrix(const AtomicMeasure& mu) {
  const int n = mu.dim();
  Mat m = Mat::Zero(n, n);
  for (const auto& a : mu.atoms()) m += a.c * a.u.coords() * a.u.coords().transpose();
  return m;
}

struct IsotropyReport {
  double deviation = 0.0;
  double total_mass = 0.0;
  bool is_isotropic = false;
};

inline IsotropyReport check_isotropy(const AtomicMeasure& mu, double tol = kIsotropyTolerance) {
  require(tol > 0, ErrorCode::InvalidArgument, "tolerance must be positive");
  IsotropyReport r;
  const Mat d = second_moment_matrix(mu) - Mat::Identity(mu.dim(), mu.dim());
  r.deviation = linalg::op_norm_symmetric(d);
  r.total_mass = mu.total_mass();
  r.is_isotropic = r.deviation <= tol;
  return r;
}

inline void require_isotropic(const AtomicMeasure& mu, double tol = kIsotropyTolerance) {
  const auto rep = check_isotropy(mu, tol);
  require(rep.is_isotropic, ErrorCode::NotIsotropic,
          "second moment deviates from identity by " + std::to_string(rep.deviation));
}

namespace detail {

// Upper-triangular moment equations: column j holds the entries of d_j d_j^T.
inline Mat moment_system(const std::vector<Vec>& dirs, int n, double scale) {
  const int m = n * (n + 1) / 2;
  Mat a(m, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    int r = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p; q < n; ++q) a(r++, static_cast<Eigen::Index>(j)) = scale * dirs[j][p] * dirs[j][q];
  }
  return a;
}

inline Vec identity_moments(int n) {
  Vec b(n * (n + 1) / 2);
  int r = 0;
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) b[r++] = (p == q) ? 1.0 : 0.0;
  return b;
}

}  // namespace detail

/**
 * @brief Nonnegative weights making sum c_i u_i (x) u_i the identity.
 *
 * The minimum-norm solution of the moment equations is used when it is strictly
 * positive (it then keeps every direction in the support); otherwise the
 * Lawson-Hanson NNLS vertex solution is taken. For even input the weights are
 * solved per antipodal pair so c(u) = c(-u) holds exactly.
 * Throws Infeasible when no nonnegative solution reaches residual 1e-10.
 */
inline std::vector<double> solve_isotropic_weights(const std::vector<Vec>& directions, bool even) {
  require(!directions.empty(), ErrorCode::Infeasible, "no directions");
  const int n = static_cast<int>(directions[0].size());
  std::vector<Vec> dirs;
  for (const auto& d : directions) {
    require(d.size() == n, ErrorCode::InvalidArgument, "direction dimension mismatch");
    dirs.push_back(d.normalized());
  }

  // Group into unknowns: each unknown is either a single direction or an antipodal pair.
  std::vector<int> group(dirs.size(), -1);
  std::vector<Vec> reps;
  double scale = 1.0;
  if (even) {
    scale = 2.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (group[i] >= 0) continue;
      int partner = -1;
      for (std::size_t j = 0; j < dirs.size(); ++j)
        if (j != i && group[j] < 0 && angle_between(dirs[j], -dirs[i]) <= kMergeAngle) {
          partner = static_cast<int>(j);
          break;
        }
      require(partner >= 0, ErrorCode::InvalidArgument, "even direction set is not closed under negation");
      group[i] = group[partner] = static_cast<int>(reps.size());
      reps.push_back(dirs[i]);
    }
  } else {
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      group[i] = static_cast<int>(reps.size());
      reps.push_back(dirs[i]);
    }
  }

  Mat span(n, static_cast<Eigen::Index>(reps.size()));
  for (std::size_t j = 0; j < reps.size(); ++j) span.col(static_cast<Eigen::Index>(j)) = reps[j];
  Eigen::FullPivLU<Mat> lu(span);
  lu.setThreshold(1e-10);
  require(lu.rank() == n, ErrorCode::Infeasible, "directions do not span R^n");

  const Mat a = detail::moment_system(reps, n, scale);
  const Vec b = detail::identity_moments(n);

  auto residual = [&](const Vec& w) {
    Mat m = Mat::Zero(n, n);
    for (std::size_t j = 0; j < reps.size(); ++j)
      m += scale * w[static_cast<Eigen::Index>(j)] * reps[j] * reps[j].transpose();
    return linalg::op_norm_symmetric(m - Mat::Identity(n, n));
  };

  Vec w = a.completeOrthogonalDecomposition().solve(b);
  if (!(w.minCoeff() > 1e-12 && residual(w) <= 1e-10)) {
    w = linalg::nnls(a, b);
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (w[j] < 1e-14) w[j] = 0.0;
    // Polish the support with an exact least-squares solve on the active columns.
    std::vector<int> act;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (w[j] > 0) act.push_back(static_cast<int>(j));
    if (!act.empty()) {
      Mat aa(a.rows(), static_cast<Eigen::Index>(act.size()));
      for (std::size_t k = 0; k < act.size(); ++k) aa.col(static_cast<Eigen::Index>(k)) = a.col(act[k]);
      Vec z = aa.completeOrthogonalDecomposition().solve(b);
      if (z.minCoeff() > 0) {
        w.setZero();
        for (std::size_t k = 0; k < act.size(); ++k) w[act[k]] = z[static_cast<Eigen::Index>(k)];
      }
    }
  }
  require(residual(w) <= 1e-10, ErrorCode::Infeasible, "no nonnegative isotropic weights exist");

  std::vector<double> out(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) out[i] = w[group[i]];
  return out;
}

/// Isotropic measure on the given directions; zero-weight directions are dropped.
inline AtomicMeasure isotropic_measure(const std::vector<Vec>& directions, bool even) {
  const auto w = solve_isotropic_weights(directions, even);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < directions.size(); ++i)
    if (w[i] > 0) atoms.push_back({SphereVector(directions[i]), w[i]});
  return AtomicMeasure(static_cast<int>(directions[0].size()), std::move(atoms), even);
}

// ---------------------------------------------------------------------------
// Caps

/// Closed cap Omega(center, radius) or open cap; radius in (0, pi/2].
struct CapQuery {
  SphereVector center;
  double radius = 0.0;

  CapQuery() = default;
  CapQuery(SphereVector c, double r) : center(std::move(c)), radius(r) {
    require(r > 0 && r <= kPi / 2 + 1e-15, ErrorCode::InvalidArgument, "cap radius must lie in (0, pi/2]");
  }
};

/// Inner products within this band of cos(radius) count as on the boundary.
inline constexpr double kCapBoundaryBand = 1e-12;

inline bool in_cap(const Vec& u, const SphereVector& center, double radius, bool open) {
  const double ip = center.dot(u);
  const double c = std::cos(radius);
  return open ? ip > c + kCapBoundaryBand : ip >= c - kCapBoundaryBand;
}

inline double cap_mass(const AtomicMeasure& mu, const CapQuery& q, bool open) {
  std::vector<double> w;
  for (const auto& a : mu.atoms())
    if (in_cap(a.u.coords(), q.center, q.radius, open)) w.push_back(a.c);
  return pairwise_sum(w);
}

inline double cap_mass(const AtomicMeasure& mu, const SphereVector& center, double radius, bool open = false) {
  return cap_mass(mu, CapQuery(center, radius), open);
}

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// mu(open cap at v) + mu(open cap at -v) >= 1 - n cos^2(alpha) for isotropic mu.
inline BoundCheck verify_isotropic_cap_bound(const AtomicMeasure& mu, const SphereVector& v, double alpha) {
  require_isotropic(mu);
  require(alpha > 0 && alpha < kPi / 2, ErrorCode::InvalidArgument, "alpha must lie in (0, pi/2)");
  BoundCheck r;
  r.lhs = cap_mass(mu, v, alpha, true) + cap_mass(mu, -v, alpha, true);
  r.rhs = 1.0 - mu.dim() * std::pow(std::cos(alpha), 2);
  r.pass = r.lhs >= r.rhs - 1e-12;
  return r;
}

namespace detail {

// Orthonormal basis of v^perp (columns), deterministic.
inline Mat orthogonal_complement(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Mat m(n, n);
  m.col(0) = v.normalized();
  int filled = 1;
  for (int i = 0; i < n && filled < n; ++i) {
    Vec e = unit(n, i);
    for (int k = 0; k < filled; ++k) e -= m.col(k).dot(e) * m.col(k);
    if (e.norm() > 1e-6) m.col(filled++) = e.normalized();
  }
  return m.rightCols(n - 1);
}

// Points of S^{n-1} at geodesic distance r from p along unit tangent t.
inline Vec exp_map(const Vec& p, const Vec& t, double r) { return std::cos(r) * p + std::sin(r) * t; }

}  // namespace detail

/// Lower bound factor sin^{n-1}(beta) / sqrt(2 pi n) of the dense-subcap claim.
inline double dense_subcap_factor(int n, double beta) {
  return std::pow(std::sin(beta), n - 1) / std::sqrt(2.0 * kPi * n);
}

struct DenseSubcap {
  SphereVector v;
  double subcap_mass = 0.0;  // mu(Omega(p, alpha) cap Omega(v, beta))
  double cap_mass = 0.0;     // mu(Omega(p, alpha))
  double bound = 0.0;        // cap_mass * sin^{n-1} beta / sqrt(2 pi n)
  bool empty_cap = false;
};

/**
 * @brief Finds v in Omega(p, alpha) carrying a large share of the cap's mass in Omega(v, beta).
 *
 * Candidates are the atoms inside the cap, then a geodesic grid of spacing beta/4;
 * the search stops at the first candidate beating the bound strictly.
 */
inline DenseSubcap find_dense_subcap(const AtomicMeasure& mu, const SphereVector& p, double alpha, double beta) {
  require(beta > 0 && beta < alpha && alpha < kPi / 2, ErrorCode::InvalidArgument, "need 0 < beta < alpha < pi/2");
  const int n = mu.dim();
  std::vector<const Atom*> inside;
  for (const auto& a : mu.atoms())
    if (in_cap(a.u.coords(), p, alpha, false)) inside.push_back(&a);

  DenseSubcap out;
  out.v = p;
  for (const auto* a : inside) out.cap_mass += a->c;
  out.bound = out.cap_mass * dense_subcap_factor(n, beta);
  if (inside.empty()) {
    out.empty_cap = true;
    return out;
  }

  auto score = [&](const Vec& v) {
    double s = 0.0;
    for (const auto* a : inside)
      if (v.dot(a->u.coords()) >= std::cos(beta) - kCapBoundaryBand) s += a->c;
    return s;
  };
  auto consider = [&](const Vec& v) {
    const double s = score(v);
    if (s > out.subcap_mass) {
      out.subcap_mass = s;
      out.v = SphereVector(v);
    }
    return out.subcap_mass > out.bound;
  };

  for (const auto* a : inside)
    if (consider(a->u.coords())) return out;

  // Geodesic grid in the cap: rings of radius j * h, each sampled at spacing ~h.
  const double h = beta / 4;
  const Mat tangent = detail::orthogonal_complement(p.coords());
  for (double r = 0.0; r <= alpha + 1e-15; r += h) {
    if (n == 2) {
      for (double s : {1.0, -1.0})
        if (consider(detail::exp_map(p.coords(), s * tangent.col(0), r))) return out;
      continue;
    }
    // n >= 3: walk a great-circle parameterization of the tangent sphere (n = 3 exact ring; higher n sparse).
    const int m = std::max(1, static_cast<int>(std::ceil(2 * kPi * std::sin(r) / h)));
    for (int k = 0; k < m; ++k) {
      const double phi = 2 * kPi * k / m;
      Vec t = std::cos(phi) * tangent.col(0) + std::sin(phi) * tangent.col(1);
      if (consider(detail::exp_map(p.coords(), t, r))) return out;
    }
  }
  return out;
}

struct DRCaps {
  std::vector<SphereVector> centers;
  double beta = 0.0;
  std::vector<double> cap_masses;
  double det = 0.0;  // |det[v_1..v_n]|
};

/// beta = 2^{-(n+1)} n^{-(n+1)/2}.
inline double dr_beta(int n) { return std::pow(2.0, -(n + 1)) * std::pow(static_cast<double>(n), -(n + 1) / 2.0); }

/**
 * @brief Measure-theoretic Dvoretzky-Rogers caps.
 *
 * Inductive construction: p_i is orthogonal to v_1..v_{i-1} with the heavier of the
 * two caps Omega(+-p_i, alpha_n), cos(alpha_n) = 1/(2 sqrt n); v_i comes from
 * find_dense_subcap inside that cap.
 */
inline DRCaps dvoretzky_rogers_caps(const AtomicMeasure& mu) {
  require_isotropic(mu);
  const int n = mu.dim();
  DRCaps out;
  out.beta = dr_beta(n);
  const double alpha_n = std::acos(1.0 / (2.0 * std::sqrt(static_cast<double>(n))));

  std::vector<Vec> vs;
  for (int i = 0; i < n; ++i) {
    // Candidate p'_i: the standard basis vector with the largest component orthogonal to v_1..v_{i-1}.
    Mat q = Mat::Zero(n, 0);
    if (!vs.empty()) {
      Mat v(n, static_cast<Eigen::Index>(vs.size()));
      for (std::size_t k = 0; k < vs.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = vs[k];
      Eigen::HouseholderQR<Mat> qr(v);
      q = Mat(qr.householderQ()).leftCols(v.cols());
    }
    Vec best;
    double best_norm = -1.0;
    for (int k = 0; k < n; ++k) {
      Vec e = unit(n, k) - q * (q.transpose() * unit(n, k));
      if (e.norm() > best_norm + 1e-12) {
        best_norm = e.norm();
        best = e;
      }
    }
    SphereVector p(best);
    if (cap_mass(mu, -p, alpha_n) > cap_mass(mu, p, alpha_n)) p = -p;
    const auto sub = find_dense_subcap(mu, p, alpha_n, out.beta);
    vs.push_back(sub.v.coords());
    out.centers.push_back(sub.v);
  }
  for (const auto& c : out.centers) out.cap_masses.push_back(cap_mass(mu, c, out.beta));
  out.det = std::abs(linalg::det_columns(vs));
  return out;
}

/// |det[b_i + s_i]| >= |det[b]| / 2 whenever ||s_i|| <= |det[b]| / (4n).
inline BoundCheck perturbed_determinant_bound(const std::vector<Vec>& b, const std::vector<Vec>& s) {
  const int n = static_cast<int>(b.size());
  require(n >= 1 && static_cast<int>(s.size()) == n, ErrorCode::InvalidArgument, "need n vectors b and s");
  const double d = std::abs(linalg::det_columns(b));
  for (const auto& si : s)
    require(si.norm() <= d / (4.0 * n) * (1 + 1e-12), ErrorCode::PreconditionViolated,
            "perturbation exceeds |det|/(4n)");
  std::vector<Vec> bs;
  for (int i = 0; i < n; ++i) bs.push_back(b[i] + s[i]);
  BoundCheck r;
  r.lhs = std::abs(linalg::det_columns(bs));
  r.rhs = d / 2.0;
  r.pass = r.lhs >= r.rhs - 1e-12;
  return r;
}

struct CapDichotomy {
  enum class Kind { Concentrated, Split };
  Kind kind = Kind::Concentrated;
  SphereVector q;                   // Concentrated: centre of the small cap
  double concentrated_mass = 0.0;   // mu(Omega(v, beta) cap Omega(q, eta))
  std::vector<int> psi1, psi2;      // Split: atom indices into mu.atoms()
  double mass1 = 0.0, mass2 = 0.0;
  double separation = 0.0;          // min ||a1 - a2|| over the two groups
  double threshold = 0.0;           // beta^n / (4n)
};

/**
 * @brief Either a small cap of radius eta with mass >= beta^n/(4n) inside Omega(v, beta),
 * or two atom groups of that mass at Euclidean separation >= eta/sqrt(n).
 *
 * Follows the coordinate-quantile construction: per coordinate of v^perp the lower and
 * upper beta^n/(4n) quantiles s_j <= t_j; the widest coordinate splits, otherwise q sits
 * at the quantile midpoints.
 */
inline CapDichotomy cap_dichotomy(const AtomicMeasure& mu, const SphereVector& v, double beta, double eta) {
  require(eta > 0 && eta < beta, ErrorCode::PreconditionViolated, "need 0 < eta < beta");
  require_isotropic(mu);
  const int n = mu.dim();
  CapDichotomy out;
  out.threshold = std::pow(beta, n) / (4.0 * n);

  std::vector<int> in;
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (in_cap(mu.atoms()[i].u.coords(), v, beta, false)) {
      in.push_back(static_cast<int>(i));
      total += mu.atoms()[i].c;
    }
  require(total >= std::pow(beta, n) * (1 - 1e-12), ErrorCode::PreconditionViolated,
          "cap Omega(v, beta) carries less than beta^n");

  auto small_cap_mass = [&](const SphereVector& q) {
    double s = 0.0;
    for (int i : in)
      if (in_cap(mu.atoms()[i].u.coords(), q, eta, false)) s += mu.atoms()[i].c;
    return s;
  };

  // A heavy atom settles the first alternative directly.
  int heavy = -1;
  for (int i : in)
    if (mu.atoms()[i].c >= out.threshold && (heavy < 0 || mu.atoms()[i].c > mu.atoms()[heavy].c)) heavy = i;
  if (heavy >= 0) {
    out.kind = CapDichotomy::Kind::Concentrated;
    out.q = mu.atoms()[heavy].u;
    out.concentrated_mass = small_cap_mass(out.q);
    return out;
  }

  const Mat w = detail::orthogonal_complement(v.coords());
  struct Coord {
    int j;
    double s, t;
  };
  std::vector<Coord> coords;
  for (int j = 0; j < n - 1; ++j) {
    std::vector<std::pair<double, double>> proj;
    for (int i : in) proj.emplace_back(w.col(j).dot(mu.atoms()[i].u.coords()), mu.atoms()[i].c);
    std::sort(proj.begin(), proj.end());
    double acc = 0.0, s = proj.front().first, t = proj.back().first;
    for (const auto& [x, c] : proj) {
      acc += c;
      if (acc >= out.threshold) {
        s = x;
        break;
      }
    }
    acc = 0.0;
    for (auto it = proj.rbegin(); it != proj.rend(); ++it) {
      acc += it->second;
      if (acc >= out.threshold) {
        t = it->first;
        break;
      }
    }
    coords.push_back({j, s, t});
  }
  std::stable_sort(coords.begin(), coords.end(),
                   [](const Coord& a, const Coord& b) { return (a.t - a.s) > (b.t - b.s); });

  const Coord& top = coords.front();
  if (top.t - top.s >= eta / std::sqrt(static_cast<double>(n))) {
    out.kind = CapDichotomy::Kind::Split;
    for (int i : in) {
      const double x = w.col(top.j).dot(mu.atoms()[i].u.coords());
      if (x <= top.s) {
        out.psi1.push_back(i);
        out.mass1 += mu.atoms()[i].c;
      }
      if (x >= top.t) {
        out.psi2.push_back(i);
        out.mass2 += mu.atoms()[i].c;
      }
    }
    out.separation = kInf;
    for (int a : out.psi1)
      for (int b : out.psi2)
        out.separation =
            std::min(out.separation, (mu.atoms()[a].u.coords() - mu.atoms()[b].u.coords()).norm());
    return out;
  }

  Vec q = Vec::Zero(n);
  for (const auto& c : coords) q += 0.5 * (c.s + c.t) * w.col(c.j);
  q += std::sqrt(std::max(0.0, 1.0 - q.squaredNorm())) * v.coords();
  out.kind = CapDichotomy::Kind::Concentrated;
  out.q = SphereVector(q);
  out.concentrated_mass = small_cap_mass(out.q);
  return out;
}

}  // namespace isozonoid

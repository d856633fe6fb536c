#pragma once

// Determinant layer of the Brascamp-Lieb / Barthe inequalities and its stability form.

#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/linalg.hpp"
#include "isozonoid/sphere_measures.hpp"

namespace isozonoid::bb {

inline constexpr double kDecompositionTolerance = 1e-10;
inline constexpr double kSubsetBudget = 1e6;

/// Vectors v_1..v_k in R^n with sum v_i (x) v_i = Id.
class DecompositionSystem {
 public:
  DecompositionSystem(int dim, std::vector<Vec> v) : dim_(dim), v_(std::move(v)) {
    require(dim >= 1 && !v_.empty(), ErrorCode::InvalidArgument, "empty system");
    Mat s = Mat::Zero(dim, dim);
    for (const auto& x : v_) {
      require(x.size() == dim, ErrorCode::InvalidArgument, "vector dimension mismatch");
      s += x * x.transpose();
    }
    require(linalg::op_norm_symmetric(s - Mat::Identity(dim, dim)) <= kDecompositionTolerance,
            ErrorCode::NotDecomposition, "sum of v_i (x) v_i is not the identity");
  }

  /// v_i = sqrt(2 c_i) u_i over one representative per antipodal pair of an even isotropic measure.
  static DecompositionSystem from_measure(const AtomicMeasure& mu) {
    std::vector<Vec> v;
    for (const auto& a : mu.pair_representatives()) v.push_back(std::sqrt(2.0 * a.c) * a.u.coords());
    return DecompositionSystem(mu.dim(), std::move(v));
  }

  /// Rows of a random k x n matrix with orthonormal columns.
  static DecompositionSystem random(int n, int k, Rng& rng) {
    require(k >= n, ErrorCode::InvalidArgument, "need k >= n");
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(k, n);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    const Mat q = Mat(qr.householderQ()).leftCols(n);
    std::vector<Vec> v;
    for (int i = 0; i < k; ++i) v.push_back(q.row(i).transpose());
    return DecompositionSystem(n, std::move(v));
  }

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(v_.size()); }
  const std::vector<Vec>& vectors() const { return v_; }

 private:
  int dim_;
  std::vector<Vec> v_;
};

struct SubsetTerm {
  std::vector<int> indices;
  double det_squared = 0.0;  // det[v_i1..v_in]^2
  double weighted = 0.0;     // t_i1...t_in det^2
};

struct SubsetExpansion {
  double det_value = 0.0;  // det(sum t_i v_i (x) v_i)
  double t0 = 0.0;
  std::vector<SubsetTerm> terms;  // nonzero subsets only
  double expansion_sum = 0.0;
  bool identity_holds = false;  // det_value = sum of terms within 1e-9 relative
};

inline void check_weights(const DecompositionSystem& sys, const std::vector<double>& t) {
  require(static_cast<int>(t.size()) == sys.size(), ErrorCode::InvalidArgument, "need one weight per vector");
  for (double x : t) require(x > 0 && std::isfinite(x), ErrorCode::InvalidArgument, "weights must be positive");
}

inline Mat weighted_moment(const DecompositionSystem& sys, const std::vector<double>& t) {
  Mat m = Mat::Zero(sys.dim(), sys.dim());
  for (int i = 0; i < sys.size(); ++i) m += t[i] * sys.vectors()[i] * sys.vectors()[i].transpose();
  return m;
}

/// Cauchy-Binet expansion of det(sum t_i v_i (x) v_i) over n-subsets.
inline SubsetExpansion subset_expansion(const DecompositionSystem& sys, const std::vector<double>& t) {
  check_weights(sys, t);
  const int n = sys.dim(), k = sys.size();
  require(binomial(k, n) <= kSubsetBudget, ErrorCode::CombinatorialBudget, "too many n-subsets");
  SubsetExpansion out;
  out.det_value = weighted_moment(sys, t).partialPivLu().determinant();
  double scale = 0.0;
  for (const auto& v : sys.vectors()) scale = std::max(scale, v.norm());
  const double zero = 1e-14 * std::pow(std::max(scale, 1e-300), n);
  std::vector<double> parts;
  for_each_subset(k, n, [&](const std::vector<int>& idx) {
    std::vector<Vec> cols;
    double tp = 1.0;
    for (int i : idx) {
      cols.push_back(sys.vectors()[i]);
      tp *= t[i];
    }
    const double d = linalg::det_columns(cols);
    if (std::abs(d) <= zero) return;
    out.terms.push_back({idx, d * d, tp * d * d});
    parts.push_back(tp * d * d);
  });
  out.expansion_sum = pairwise_sum(parts);
  out.t0 = std::sqrt(out.expansion_sum);
  out.identity_holds = std::abs(out.det_value - out.expansion_sum) <= 1e-9 * std::abs(out.expansion_sum);
  return out;
}

struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

inline double weighted_product(const DecompositionSystem& sys, const std::vector<double>& t) {
  double lp = 0.0;
  for (int i = 0; i < sys.size(); ++i) lp += sys.vectors()[i].squaredNorm() * std::log(t[i]);
  return std::exp(lp);
}

/// det(sum t_i v_i (x) v_i) >= prod t_i^{<v_i, v_i>}.
inline Inequality ball_inequality(const DecompositionSystem& sys, const std::vector<double>& t) {
  check_weights(sys, t);
  Inequality r;
  r.lhs = weighted_moment(sys, t).partialPivLu().determinant();
  r.rhs = weighted_product(sys, t);
  r.pass = r.lhs >= r.rhs * (1 - 1e-9);
  return r;
}

struct ThetaStar {
  double theta = 1.0;
  double lhs = 0.0;  // det
  double rhs = 0.0;  // theta * prod t^{<v,v>}
  bool strengthened_pass = false;
};

/// Stability factor theta* >= 1 of the strengthened determinant inequality (k >= n + 1).
inline ThetaStar theta_star(const DecompositionSystem& sys, const std::vector<double>& t) {
  require(sys.size() >= sys.dim() + 1, ErrorCode::KTooSmall, "need k >= n + 1");
  const auto ex = subset_expansion(sys, t);
  std::vector<double> parts;
  for (const auto& term : ex.terms) {
    double tp = 1.0;
    for (int i : term.indices) tp *= t[i];
    const double r = std::sqrt(tp) / ex.t0 - 1.0;
    parts.push_back(term.det_squared * r * r);
  }
  ThetaStar out;
  out.theta = 1.0 + 0.5 * pairwise_sum(parts);
  out.lhs = ex.det_value;
  out.rhs = out.theta * weighted_product(sys, t);
  out.strengthened_pass = out.lhs >= out.rhs * (1 - 1e-9);
  return out;
}

/// (xa - 1)^2 + (xb - 1)^2 >= (a^2 - b^2)^2 / (2 (a^2 + b^2)^2).
inline Inequality xab_gap(double a, double b, double x) {
  require(a > 0 && b > 0 && x > 0, ErrorCode::InvalidArgument, "a, b, x must be positive");
  Inequality r;
  r.lhs = std::pow(x * a - 1, 2) + std::pow(x * b - 1, 2);
  const double s = a * a + b * b;
  r.rhs = std::pow(a * a - b * b, 2) / (2 * s * s);
  r.pass = r.lhs >= r.rhs - 1e-15;
  return r;
}

struct VectorEstimate {
  double z_norm_sq = 0.0;
  double weighted_sum = 0.0;
  bool pass = false;
};

/// ||sum c_i theta_i u_i||^2 <= sum c_i theta_i^2 for an isotropic decomposition.
inline VectorEstimate vector_estimate(const std::vector<Vec>& u, const std::vector<double>& c,
                                      const std::vector<double>& theta) {
  require(!u.empty() && u.size() == c.size() && u.size() == theta.size(), ErrorCode::InvalidArgument,
          "u, c, theta lengths differ");
  const int n = static_cast<int>(u[0].size());
  Mat s = Mat::Zero(n, n);
  Vec z = Vec::Zero(n);
  VectorEstimate r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += c[i] * u[i] * u[i].transpose();
    z += c[i] * theta[i] * u[i];
    r.weighted_sum += c[i] * theta[i] * theta[i];
  }
  require(linalg::op_norm_symmetric(s - Mat::Identity(n, n)) <= kDecompositionTolerance, ErrorCode::NotDecomposition,
          "sum c_i u_i (x) u_i is not the identity");
  r.z_norm_sq = z.squaredNorm();
  r.pass = r.z_norm_sq <= r.weighted_sum + 1e-12;
  return r;
}

}  // namespace isozonoid::bb

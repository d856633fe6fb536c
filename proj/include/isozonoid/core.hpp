#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace isozonoid {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Default seed for every randomized routine (overridable via ISOZONOID_SEED in the CLI).
inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

enum class ErrorCode {
  InvalidArgument,
  NotIsotropic,
  Infeasible,
  EmptyCap,
  PreconditionViolated,
  DegenerateMeasure,
  UnboundedBody,
  DimensionUnsupported,
  NonConverged,
  Domain,
  HypothesisFailed,
  CombinatorialBudget,
  KTooSmall,
  NotDecomposition,
  MassMismatch,
  EmptySet,
  DegenerateBody,
  NoContacts,
  InfeasibleWeights,
  NotProper,
  NoSquareNormalization,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::NotIsotropic: return "NOT_ISOTROPIC";
    case ErrorCode::Infeasible: return "INFEASIBLE";
    case ErrorCode::EmptyCap: return "EMPTY_CAP";
    case ErrorCode::PreconditionViolated: return "PRECONDITION_VIOLATED";
    case ErrorCode::DegenerateMeasure: return "DEGENERATE_MEASURE";
    case ErrorCode::UnboundedBody: return "UNBOUNDED_BODY";
    case ErrorCode::DimensionUnsupported: return "DIMENSION_UNSUPPORTED";
    case ErrorCode::NonConverged: return "NONCONVERGED";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::HypothesisFailed: return "HYPOTHESIS_FAILED";
    case ErrorCode::CombinatorialBudget: return "COMBINATORIAL_BUDGET";
    case ErrorCode::KTooSmall: return "K_TOO_SMALL";
    case ErrorCode::NotDecomposition: return "NOT_DECOMPOSITION";
    case ErrorCode::MassMismatch: return "MASS_MISMATCH";
    case ErrorCode::EmptySet: return "EMPTY_SET";
    case ErrorCode::DegenerateBody: return "DEGENERATE_BODY";
    case ErrorCode::NoContacts: return "NO_CONTACTS";
    case ErrorCode::InfeasibleWeights: return "INFEASIBLE_WEIGHTS";
    case ErrorCode::NotProper: return "NOT_PROPER";
    case ErrorCode::NoSquareNormalization: return "NO_SQUARE_NORMALIZATION";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

inline bool is_infinite(double p) { return std::isinf(p) && p > 0; }

/// Conjugate exponent p* with 1/p + 1/p* = 1.
inline double conjugate_exponent(double p) {
  if (is_infinite(p)) return 1.0;
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

/// Geodesic angle between two non-zero vectors.
inline double angle_between(const Vec& a, const Vec& b) {
  // Half-angle form stays accurate for nearly (anti)parallel inputs, unlike acos.
  const Vec x = a.normalized(), y = b.normalized();
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

/// Lexicographic enumeration of k-subsets of {0..n-1}; `fn` receives the index vector.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k > n || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(static_cast<const std::vector<int>&>(idx));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Pairwise summation; order-independent enough for 1e-12 reproducibility across runs.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

using Rng = std::mt19937_64;

inline Vec random_unit_vector(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = g(rng);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
inline Mat random_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

inline Mat rotation2(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Rotation matrix from an axis-angle (rotation) vector in R^3 via Rodrigues' formula.
inline Mat rotation3(const Vec& w) {
  const double th = w.norm();
  Mat r = Mat::Identity(3, 3);
  if (th < 1e-300) return r;
  const Vec k = w / th;
  Mat kx(3, 3);
  kx << 0, -k[2], k[1], k[2], 0, -k[0], -k[1], k[0], 0;
  return r + std::sin(th) * kx + (1 - std::cos(th)) * kx * kx;
}

inline Vec unit(int n, int i) {
  Vec e = Vec::Zero(n);
  e[i] = 1.0;
  return e;
}

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace isozonoid

#pragma once

#include <algorithm>
#include <vector>

#include "isozonoid/core.hpp"

namespace isozonoid::linalg {

/// Determinant of the matrix with the given columns (LU with partial pivoting).
inline double det_columns(const std::vector<Vec>& cols) {
  const int n = static_cast<int>(cols.size());
  Mat m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = cols[j];
  return m.partialPivLu().determinant();
}

inline double op_norm_symmetric(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
inline Mat sqrt_spd(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

inline Mat inv_sqrt_spd(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

/**
 * @brief Lawson-Hanson active set solver for min ||A x - b|| subject to x >= 0.
 *
 * Returns the solution vector; the residual is left to the caller.
 */
inline Vec nnls(const Mat& a, const Vec& b, int max_iter = 0) {
  const int n = static_cast<int>(a.cols());
  if (max_iter <= 0) max_iter = 30 * std::max(n, 1);
  Vec x = Vec::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());

  for (int outer = 0; outer < max_iter; ++outer) {
    Vec w = a.transpose() * (b - a * x);
    int best = -1;
    double best_w = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<int> p;
      for (int j = 0; j < n; ++j)
        if (passive[j]) p.push_back(j);
      Mat ap(a.rows(), static_cast<Eigen::Index>(p.size()));
      for (std::size_t k = 0; k < p.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(p[k]);
      Vec zp = ap.completeOrthogonalDecomposition().solve(b);
      bool all_pos = true;
      for (Eigen::Index k = 0; k < zp.size(); ++k)
        if (zp[k] <= 0) all_pos = false;
      if (all_pos) {
        x.setZero();
        for (std::size_t k = 0; k < p.size(); ++k) x[p[k]] = zp[static_cast<Eigen::Index>(k)];
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double zk = zp[static_cast<Eigen::Index>(k)];
        if (zk <= 0) alpha = std::min(alpha, x[p[k]] / (x[p[k]] - zk));
      }
      for (std::size_t k = 0; k < p.size(); ++k) {
        const int j = p[k];
        x[j] += alpha * (zp[static_cast<Eigen::Index>(k)] - x[j]);
        if (x[j] <= 1e-15) {
          x[j] = 0.0;
          passive[j] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace isozonoid::linalg

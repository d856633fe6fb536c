#pragma once

// Derivative-free minimizers used by the orbit and Banach-Mazur searches.

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "isozonoid/core.hpp"

namespace isozonoid::opt {

struct Minimum {
  Vec x;
  double value = kInf;
  int evaluations = 0;
};

/// Golden-section search for a unimodal f on [a, b].
inline Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                              int max_iter = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  Minimum m;
  m.x = Vec::Constant(1, fc < fd ? c : d);
  m.value = std::min(fc, fd);
  m.evaluations = evals;
  return m;
}

struct NelderMeadOptions {
  double initial_step = 0.2;
  double f_tol = 1e-12;
  double x_tol = 1e-10;
  int max_evals = 4000;
};

/// Nelder-Mead simplex search with standard coefficients (1, 2, 0.5, 0.5).
inline Minimum nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                           const NelderMeadOptions& o = {}) {
  const int d = static_cast<int>(x0.size());
  std::vector<Vec> s(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (int i = 0; i < d; ++i) s[i + 1][i] += o.initial_step;
  int evals = 0;
  for (int i = 0; i <= d; ++i) {
    fv[i] = f(s[i]);
    ++evals;
  }
  std::vector<int> idx(d + 1);
  while (evals < o.max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = idx.front(), worst = idx.back(), second = idx[d - 1];
    double spread = 0.0;
    for (int i = 0; i <= d; ++i) spread = std::max(spread, (s[i] - s[best]).cwiseAbs().maxCoeff());
    if (std::abs(fv[worst] - fv[best]) <= o.f_tol * (1.0 + std::abs(fv[best])) && spread <= o.x_tol) break;
    if (spread <= o.x_tol * 1e-3) break;

    Vec centroid = Vec::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += s[i];
    centroid /= d;

    const Vec xr = centroid + (centroid - s[worst]);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[best]) {
      const Vec xe = centroid + 2.0 * (centroid - s[worst]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        s[worst] = xe;
        fv[worst] = fe;
      } else {
        s[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      s[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (s[worst] - centroid));
    const double fc = f(xc);
    ++evals;
    if (fc < std::min(fr, fv[worst])) {
      s[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int i = 0; i <= d; ++i) {
      if (i == best) continue;
      s[i] = s[best] + 0.5 * (s[i] - s[best]);
      fv[i] = f(s[i]);
      ++evals;
    }
  }
  const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  Minimum m;
  m.x = s[best];
  m.value = fv[best];
  m.evaluations = evals;
  return m;
}

/// Nelder-Mead from every start; best value wins, lowest start index on ties.
inline Minimum multistart(const std::function<double(const Vec&)>& f, const std::vector<Vec>& starts,
                          const NelderMeadOptions& o = {}) {
  Minimum best;
  for (const auto& x0 : starts) {
    auto m = nelder_mead(f, x0, o);
    const int total = best.evaluations + m.evaluations;
    if (m.value < best.value) best = m;
    best.evaluations = total;
  }
  return best;
}

}  // namespace isozonoid::opt

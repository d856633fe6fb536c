#pragma once

// Thin layer over Boost.Math and <cmath> for the special functions used by the
// closed-form volumes and the transport maps.

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "isozonoid/core.hpp"

namespace isozonoid::special {

inline double gamma(double x) { return std::tgamma(x); }
inline double lgamma(double x) { return std::lgamma(x); }

/// Regularized lower / upper incomplete gamma P(a, x), Q(a, x).
inline double gamma_p(double a, double x) { return x <= 0 ? 0.0 : boost::math::gamma_p(a, x); }
inline double gamma_q(double a, double x) { return x <= 0 ? 1.0 : boost::math::gamma_q(a, x); }
inline double gamma_p_inv(double a, double p) { return p <= 0 ? 0.0 : boost::math::gamma_p_inv(a, p); }
inline double gamma_q_inv(double a, double q) { return q >= 1 ? 0.0 : boost::math::gamma_q_inv(a, q); }

inline double erf(double x) { return std::erf(x); }
inline double erfc(double x) { return std::erfc(x); }

inline double erf_inv(double y) {
  if (y <= -1.0) return -kInf;
  if (y >= 1.0) return kInf;
  return boost::math::erf_inv(y);
}

inline double erfc_inv(double y) {
  if (y <= 0.0) return kInf;
  if (y >= 2.0) return -kInf;
  return boost::math::erfc_inv(y);
}

/// Volume of the n-dimensional Euclidean unit ball.
inline double unit_ball_volume(int n) { return std::pow(kPi, 0.5 * n) / std::tgamma(1.0 + 0.5 * n); }

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace isozonoid::special

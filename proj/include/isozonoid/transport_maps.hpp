#pragma once

// The densities rho_p and the monotone maps phi_p (rho_p -> rho_2), psi_p (rho_2 -> rho_p).

#include <optional>
#include <string>
#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/special.hpp"

namespace isozonoid::transport {

inline void check_exponent(double p) {
  require(p >= 1.0 || is_infinite(p), ErrorCode::InvalidArgument, "p must lie in [1, inf]");
}

inline double sign(double t) { return t < 0 ? -1.0 : 1.0; }

namespace detail {

// Far tails, where Q(a, x) or erfc(y) underflow: asymptotic series in log space.
inline constexpr double kTailFloor = 1e-300;

inline double log_gamma_q_large(double a, double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= (a - k) / x;
    sum += term;
  }
  return (a - 1.0) * std::log(x) - x - std::lgamma(a) + std::log(sum);
}

inline double log_erfc_large(double y) {
  const double z = 1.0 / (2.0 * y * y);
  return -y * y - std::log(y * std::sqrt(kPi)) + std::log(1.0 - z + 3.0 * z * z - 15.0 * z * z * z);
}

inline double erfc_inv_log(double l) {
  double y = std::sqrt(-l);
  for (int it = 0; it < 60; ++it) {
    const double step = (log_erfc_large(y) - l) / (-2.0 * y - 1.0 / y);
    y -= step;
    if (std::abs(step) <= 1e-16 * y) break;
  }
  return y;
}

inline double gamma_q_inv_log(double a, double l) {
  double x = -l;
  for (int it = 0; it < 60; ++it) {
    const double step = (log_gamma_q_large(a, x) - l) / ((a - 1.0) / x - 1.0);
    x -= step;
    if (std::abs(step) <= 1e-16 * x) break;
  }
  return x;
}

}  // namespace detail

/// e^{-|s|^p} / (2 Gamma(1 + 1/p)); uniform 1/2 on [-1, 1] for p = inf.
inline double rho_p(double p, double s) {
  check_exponent(p);
  if (is_infinite(p)) return std::abs(s) <= 1.0 ? 0.5 : 0.0;
  return std::exp(-std::pow(std::abs(s), p)) / (2.0 * special::gamma(1.0 + 1.0 / p));
}

inline double cdf_rho_p(double p, double t) {
  check_exponent(p);
  if (is_infinite(p)) return std::clamp(0.5 * (t + 1.0), 0.0, 1.0);
  const double x = std::pow(std::abs(t), p);
  return t >= 0 ? 1.0 - 0.5 * special::gamma_q(1.0 / p, x) : 0.5 * special::gamma_q(1.0 / p, x);
}

/// phi_p(t): pushes rho_p forward to rho_2; erf^{-1} for p = inf.
inline double phi_p(double p, double t) {
  check_exponent(p);
  if (is_infinite(p)) {
    require(std::abs(t) < 1.0, ErrorCode::Domain, "phi_inf is defined on (-1, 1)");
    return special::erf_inv(t);
  }
  if (t == 0.0) return 0.0;
  const double x = std::pow(std::abs(t), p);
  const double q = special::gamma_q(1.0 / p, x);
  if (q > detail::kTailFloor) return sign(t) * special::erfc_inv(q);
  return sign(t) * detail::erfc_inv_log(detail::log_gamma_q_large(1.0 / p, x));
}

/// psi_p(t) = phi_p^{-1}(t); erf for p = inf.
inline double psi_p(double p, double t) {
  check_exponent(p);
  if (is_infinite(p)) return special::erf(t);
  if (t == 0.0) return 0.0;
  const double e = special::erfc(std::abs(t));
  if (e > detail::kTailFloor) return sign(t) * std::pow(special::gamma_q_inv(1.0 / p, e), 1.0 / p);
  return sign(t) * std::pow(detail::gamma_q_inv_log(1.0 / p, detail::log_erfc_large(std::abs(t))), 1.0 / p);
}

struct Derivatives {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// phi_p with closed-form first and second derivatives; t = 0 uses the right-hand limit.
inline Derivatives phi_p_derivatives(double p, double t) {
  Derivatives d;
  d.value = phi_p(p, t);
  if (is_infinite(p)) {
    d.first = std::sqrt(kPi) / 2.0 * std::exp(d.value * d.value);
    d.second = 2.0 * d.value * d.first * d.first;
    return d;
  }
  const double a = std::abs(t);
  d.first = special::gamma(1.5) / special::gamma(1.0 + 1.0 / p) * std::exp(d.value * d.value - std::pow(a, p));
  d.second = (2.0 * d.value * d.first - sign(t) * p * std::pow(a, p - 1.0)) * d.first;
  return d;
}

inline Derivatives psi_p_derivatives(double p, double t) {
  Derivatives d;
  d.value = psi_p(p, t);
  if (is_infinite(p)) {
    d.first = 2.0 / std::sqrt(kPi) * std::exp(-t * t);
    d.second = -2.0 * t * d.first;
    return d;
  }
  const double a = std::abs(d.value);
  d.first = special::gamma(1.0 + 1.0 / p) / special::gamma(1.5) * std::exp(std::pow(a, p) - t * t);
  d.second = (sign(d.value) * p * std::pow(a, p - 1.0) * d.first - 2.0 * t) * d.first;
  return d;
}

enum class Direction { Forward, Inverse };

/// Handle for phi_p (Forward) or psi_p (Inverse).
class TransportMap {
 public:
  TransportMap(double p, Direction dir) : p_(p), dir_(dir) { check_exponent(p); }

  double p() const { return p_; }
  Direction direction() const { return dir_; }
  bool in_domain(double t) const { return !(dir_ == Direction::Forward && is_infinite(p_) && std::abs(t) >= 1.0); }

  double operator()(double t) const { return dir_ == Direction::Forward ? phi_p(p_, t) : psi_p(p_, t); }
  Derivatives derivatives(double t) const {
    return dir_ == Direction::Forward ? phi_p_derivatives(p_, t) : psi_p_derivatives(p_, t);
  }
  TransportMap inverse() const {
    return TransportMap(p_, dir_ == Direction::Forward ? Direction::Inverse : Direction::Forward);
  }

 private:
  double p_;
  Direction dir_;
};

// ---------------------------------------------------------------------------
// Bound verification

struct BoundRow {
  std::string quantity;
  double t = 0.0;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // positive when the inequality holds
};

struct BoundReport {
  bool pass = true;
  std::vector<BoundRow> rows;
  std::optional<BoundRow> witness;  // first violating row

  void add(BoundRow r) {
    if (!(r.margin > 0) && pass) {
      pass = false;
      witness = r;
    }
    rows.push_back(std::move(r));
  }
};

/// Open grid t_j = range * j / (m + 1), j = 1..m.
inline std::vector<double> open_grid(double range, int m) {
  std::vector<double> g;
  for (int j = 1; j <= m; ++j) g.push_back(range * j / (m + 1.0));
  return g;
}

/// 1/3.1 < phi'_p, psi'_p < 3.1 on the grid, and 1/(2e) <= rho_p < 1/(2 * 0.8856) on [0, 1].
inline BoundReport verify_derivative_box(double p, const std::vector<double>& grid) {
  check_exponent(p);
  BoundReport rep;
  const double lo = 1.0 / 3.1, hi = 3.1;
  for (double s : grid) {
    require(s >= 0 && s <= 1.0 / 3.1 + 1e-15, ErrorCode::InvalidArgument, "grid must lie in [0, 1/3.1]");
    const double f = phi_p_derivatives(p, s).first;
    const double g = psi_p_derivatives(p, s).first;
    rep.add({"phi'>", s, f, lo, f - lo});
    rep.add({"phi'<", s, f, hi, hi - f});
    rep.add({"psi'>", s, g, lo, g - lo});
    rep.add({"psi'<", s, g, hi, hi - g});
  }
  const int m = std::max<int>(2, static_cast<int>(grid.size()));
  const double dlo = 1.0 / (2.0 * std::exp(1.0)), dhi = 1.0 / (2.0 * 0.8856);
  for (int j = 0; j < m; ++j) {
    const double s = static_cast<double>(j) / (m - 1);
    const double r = rho_p(p, s);
    // rho_1(1) = 1/(2e) exactly; a relative slack keeps the equality case.
    rep.add({"rho>=", s, r, dlo, r - dlo + 1e-12 * dlo});
    rep.add({"rho<", s, r, dhi, dhi - r});
  }
  return rep;
}

inline BoundReport verify_derivative_box(double p, int points) { return verify_derivative_box(p, open_grid(1.0 / 3.1, points)); }

/// Second-derivative sign bounds for phi_p on (0, 1/8) and psi_p on (0, 1/10); p != 2.
inline BoundReport verify_second_derivative_bounds(double p, const std::vector<double>& phi_grid,
                                                   const std::vector<double>& psi_grid) {
  check_exponent(p);
  require(std::abs(p - 2.0) >= 1e-3, ErrorCode::InvalidArgument, "bounds are vacuous for |p - 2| < 1e-3");
  BoundReport rep;
  const bool inf = is_infinite(p);
  for (double t : phi_grid) {
    require(t > 0 && t < 1.0 / 8, ErrorCode::InvalidArgument, "phi grid must lie in (0, 1/8)");
    const double v = phi_p_derivatives(p, t).second;
    if (!inf && p < 2) {
      const double b = -(2.0 - p) / 48.0 * t;
      rep.add({"phi''<", t, v, b, b - v});
    } else if (!inf && p <= 3) {
      const double b = (p - 2.0) / 5.0 * std::pow(t, 1.3);
      rep.add({"phi''>", t, v, b, v - b});
    } else {
      const double b = 0.2 * std::pow(t, 1.3);
      rep.add({"phi''>", t, v, b, v - b});
    }
  }
  for (double t : psi_grid) {
    require(t > 0 && t < 1.0 / 10, ErrorCode::InvalidArgument, "psi grid must lie in (0, 1/10)");
    const double v = psi_p_derivatives(p, t).second;
    if (!inf && p < 2) {
      const double b = (2.0 - p) / 16.0 * t;
      rep.add({"psi''>", t, v, b, v - b});
    } else if (!inf && p <= 3) {
      const double b = -(p - 2.0) / 11.0 * std::pow(t, 1.3);
      rep.add({"psi''<", t, v, b, b - v});
    } else {
      const double b = -1.0 / 11.0 * std::pow(t, 1.3);
      rep.add({"psi''<", t, v, b, b - v});
    }
  }
  return rep;
}

inline BoundReport verify_second_derivative_bounds(double p, int points) {
  return verify_second_derivative_bounds(p, open_grid(1.0 / 8, points), open_grid(1.0 / 10, points));
}

/// rho_p(t) = rho_2(phi_p(t)) phi_p'(t) within tol on the grid (intersected with the domain).
inline BoundReport verify_mass_transport(double p, const std::vector<double>& grid, double tol = 1e-9) {
  BoundReport rep;
  for (double t : grid) {
    if (is_infinite(p) && std::abs(t) >= 1.0) continue;
    const auto d = phi_p_derivatives(p, t);
    const double pushed = rho_p(2.0, d.value) * d.first;
    const double lhs = rho_p(p, t);
    rep.add({"mass", t, pushed, lhs, tol - std::abs(pushed - lhs)});
  }
  return rep;
}

inline BoundReport verify_mass_transport(double p, int points) {
  std::vector<double> g;
  for (int j = 1; j <= points; ++j) g.push_back(-2.0 + 4.0 * j / (points + 1.0));
  return verify_mass_transport(p, g);
}

struct P2Estimate {
  double f_value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/**
 * @brief f(t) = nu t - p t^{p-1} against +-(p(p-1)|2-p| / 2^{4-p}) t^{p-1}.
 *
 * Requires p in (1, 3) \ {2}, tau in (0, 1], t in (0, tau/2], and f(tau) <= 0 for p < 2
 * (>= 0 for p > 2); otherwise HypothesisFailed.
 */
inline P2Estimate p2est_bound(double p, double nu, double tau, double t) {
  require(p > 1 && p < 3 && p != 2, ErrorCode::InvalidArgument, "p must lie in (1, 3) \\ {2}");
  require(tau > 0 && tau <= 1, ErrorCode::InvalidArgument, "tau must lie in (0, 1]");
  require(t > 0 && t <= tau / 2, ErrorCode::InvalidArgument, "t must lie in (0, tau/2]");
  auto f = [&](double s) { return nu * s - p * std::pow(s, p - 1.0); };
  const double ft = f(tau);
  const double slack = 1e-14 * std::max(1.0, std::abs(nu) * tau + p);
  if (p < 2)
    require(ft <= slack, ErrorCode::HypothesisFailed, "f(tau) > 0");
  else
    require(ft >= -slack, ErrorCode::HypothesisFailed, "f(tau) < 0");
  P2Estimate r;
  r.f_value = f(t);
  const double c = p * (p - 1.0) * std::abs(2.0 - p) / std::pow(2.0, 4.0 - p) * std::pow(t, p - 1.0);
  if (p < 2) {
    r.bound = -c;
    r.pass = r.f_value < r.bound;
  } else {
    r.bound = c;
    r.pass = r.f_value > r.bound;
  }
  return r;
}

}  // namespace isozonoid::transport

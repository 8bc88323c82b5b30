#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace typik {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {

// log of the regularized lower incomplete gamma P(a,y) for y < a+1,
// via the standard ascending series; all terms positive, no cancellation.
inline double log_gamma_p_series(double a, double y) {
  double term = 1.0, sum = 1.0, ap = a;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= y / ap;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return a * std::log(y) - y - std::lgamma(a + 1.0) + std::log(sum);
}

// log of the regularized upper incomplete gamma Q(a,y) for y >= a+1,
// via the Lentz continued fraction.
inline double log_gamma_q_cf(double a, double y) {
  const double tiny = 1e-300;
  double b = y + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 3e-17) break;
  }
  return a * std::log(y) - y - std::lgamma(a) + std::log(h);
}

}  // namespace detail

// Regularized incomplete gamma tails, in log space.  Whichever tail is the
// smaller of the two is computed directly (series or continued fraction), so
// both stay relatively accurate down to magnitudes ~exp(-745) and the log
// forms stay finite far beyond that.
inline double log_gamma_p(double a, double y) {
  if (!(a > 0.0)) throw std::domain_error("log_gamma_p: a must be positive");
  if (y <= 0.0) return kNegInf;
  if (y < a + 1.0) return detail::log_gamma_p_series(a, y);
  const double lq = detail::log_gamma_q_cf(a, y);
  return std::log1p(-std::exp(lq));
}

inline double log_gamma_q(double a, double y) {
  if (!(a > 0.0)) throw std::domain_error("log_gamma_q: a must be positive");
  if (y <= 0.0) return 0.0;
  if (y >= a + 1.0) return detail::log_gamma_q_cf(a, y);
  const double lp = detail::log_gamma_p_series(a, y);
  return std::log1p(-std::exp(lp));
}

inline double gamma_p(double a, double y) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p: a must be positive");
  if (y <= 0.0) return 0.0;
  if (y < a + 1.0) return std::exp(detail::log_gamma_p_series(a, y));
  return -std::expm1(detail::log_gamma_q_cf(a, y));
}

inline double gamma_q(double a, double y) {
  if (!(a > 0.0)) throw std::domain_error("gamma_q: a must be positive");
  if (y <= 0.0) return 1.0;
  if (y >= a + 1.0) return std::exp(detail::log_gamma_q_cf(a, y));
  return -std::expm1(detail::log_gamma_p_series(a, y));
}

// log(exp(a) + exp(b)) without overflow.
inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(std::fabs(a - b))));
}

}  // namespace typik

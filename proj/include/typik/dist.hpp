#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "typik/rng.hpp"
#include "typik/special.hpp"

namespace typik {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)

// Parameter carrier for the distribution kernel: degrees of freedom n,
// non-centrality phi^2, and the Gaussian (mean, sd).
struct DistParams {
  int df = 1;
  double noncentrality = 0.0;
  double mean = 0.0;
  double sd = 1.0;

  void check() const {
    if (df < 1) throw std::domain_error("DistParams: df must be >= 1");
    if (!(noncentrality >= 0.0))
      throw std::domain_error("DistParams: noncentrality must be >= 0");
    if (!(sd > 0.0)) throw std::domain_error("DistParams: sd must be > 0");
  }
};

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z - kLogSqrt2Pi);
}

inline double std_normal_logpdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

inline double std_normal_cdf(double z) {
  if (!std::isfinite(z)) throw std::domain_error("std_normal_cdf: non-finite z");
  return 0.5 * std::erfc(-z * M_SQRT1_2);
}

// --- central chi-square -----------------------------------------------------

inline double chisq_logpdf(int df, double x) {
  if (df < 1) throw std::domain_error("chisq_logpdf: df must be >= 1");
  if (!(x > 0.0)) throw std::domain_error("chisq_logpdf: x must be > 0");
  const double a = 0.5 * df;
  return (a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a) - M_LN2;
}

inline double chisq_pdf(int df, double x) { return std::exp(chisq_logpdf(df, x)); }

inline double chisq_cdf(int df, double x) {
  if (df < 1) throw std::domain_error("chisq_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * df, 0.5 * x);
}

inline double chisq_sf(int df, double x) {
  if (df < 1) throw std::domain_error("chisq_sf: df must be >= 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

inline double chisq_log_cdf(int df, double x) {
  if (df < 1) throw std::domain_error("chisq_log_cdf: df must be >= 1");
  if (x <= 0.0) return kNegInf;
  return log_gamma_p(0.5 * df, 0.5 * x);
}

inline double chisq_log_sf(int df, double x) {
  if (df < 1) throw std::domain_error("chisq_log_sf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return log_gamma_q(0.5 * df, 0.5 * x);
}

// Quantile by safeguarded Newton iteration on the CDF.
inline double chisq_quantile(int df, double p) {
  if (df < 1) throw std::domain_error("chisq_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("chisq_quantile: p must be in (0,1)");
  double x = static_cast<double>(df);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 300; ++i) {
    const double f = chisq_cdf(df, x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double d = chisq_pdf(df, x);
    double next = d > 0.0 ? x - f / d : x;
    if (!(next > lo) || !(next < hi))
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x + 1.0;
    if (std::fabs(next - x) < 1e-13 * (1.0 + x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// --- non-central chi-square -------------------------------------------------
//
// Poisson(nc/2)-weighted mixture of central chi-square terms, expanded
// outward from the modal Poisson index until the residual Poisson mass is
// below 1e-13.  The central CDF/SF factors advance by
// the stable one-term gamma recurrences; the direction in which the factor
// grows is the additive (cancellation-free) one for each tail.  This follows
// the scheme of Benton & Krishnamoorthy, Comput. Statist. Data Anal. 43
// (2003) 249-267.

namespace detail {

inline constexpr double kPoissonTailEps = 1e-13;
inline constexpr int kMaxMixtureTerms = 200000;

// t(s) = y^s e^{-y} / Gamma(s+1): the step between consecutive regularized
// incomplete gamma values, P(s+1,y) = P(s,y) - t(s,y).
inline double gamma_step(double s, double y) {
  return std::exp(s * std::log(y) - y - std::lgamma(s + 1.0));
}

inline double log_poisson_pmf(int k, double lambda) {
  return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
}

}  // namespace detail

// Density q_{phi^2} of the non-central chi-square with df degrees of freedom
// and non-centrality nc, evaluated at x > 0.
inline double noncentral_chisq_logpdf(int df, double nc, double x) {
  if (df < 1) throw std::domain_error("noncentral_chisq_pdf: df must be >= 1");
  if (!(nc >= 0.0))
    throw std::domain_error("noncentral_chisq_pdf: nc must be >= 0");
  if (!(x > 0.0)) throw std::domain_error("noncentral_chisq_pdf: x must be > 0");
  if (nc == 0.0) return chisq_logpdf(df, x);

  const double l = 0.5 * nc;
  const double a = 0.5 * df;
  const double y = 0.5 * x;
  const int j0 = static_cast<int>(l);
  // start at the modal Poisson index and accumulate term ratios; the product
  // can still peak far from j0 when x is far from the mean, so the running
  // sum is rescaled whenever the terms grow large
  const double log_modal =
      detail::log_poisson_pmf(j0, l) + (a + j0 - 1.0) * std::log(y) - y -
      std::lgamma(a + j0) - M_LN2;
  double log_shift = 0.0;
  double sum = 1.0;
  const auto rescale = [&](double& term) {
    if (term > 1e270) {
      term *= 1e-270;
      sum *= 1e-270;
      log_shift += 270.0 * M_LN10;
    }
  };
  double term = 1.0;
  for (int j = j0; j < j0 + detail::kMaxMixtureTerms; ++j) {
    term *= l / (j + 1.0) * (y / (a + j));
    rescale(term);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  // when the upward sweep rescaled, x sits far above the mean and the
  // downward terms are negligible at the shifted scale
  if (log_shift == 0.0) {
    term = 1.0;
    for (int j = j0; j > 0; --j) {
      term *= (j / l) * ((a + j - 1.0) / y);
      rescale(term);
      sum += term;
      if (term < sum * 1e-17) break;
    }
  }
  return log_modal + log_shift + std::log(sum);
}

inline double noncentral_chisq_pdf(int df, double nc, double x) {
  return std::exp(noncentral_chisq_logpdf(df, nc, x));
}

struct Tails {
  double lower = 0.0;  // P(X <= x)
  double upper = 0.0;  // P(X >= x)
};

namespace detail {

// One sweep produces both tails: each tail's central-gamma factor advances by
// the one-term recurrence, additive (stable) in its own growing direction and
// clamped in the other.
inline Tails noncentral_chisq_tails(int df, double nc, double x) {
  const double l = 0.5 * nc;
  const double a = 0.5 * df;
  const double y = 0.5 * x;
  const int j0 = static_cast<int>(l);

  const double w0 = std::exp(log_poisson_pmf(j0, l));
  double p0 = 0.0, q0 = 0.0;
  if (y < a + j0 + 1.0) {
    const double lp = log_gamma_p_series(a + j0, y);
    p0 = std::exp(lp);
    q0 = -std::expm1(lp);
  } else {
    const double lq = log_gamma_q_cf(a + j0, y);
    q0 = std::exp(lq);
    p0 = -std::expm1(lq);
  }
  const double t0 = gamma_step(a + j0, y);

  double sum_p = w0 * p0;
  double sum_q = w0 * q0;
  double mass = w0;

  // upward sweep: j0+1, j0+2, ...
  {
    double w = w0, p = p0, q = q0, t = t0;
    for (int j = j0; j < j0 + kMaxMixtureTerms; ++j) {
      w *= l / (j + 1.0);
      p -= t;  // P(a+j+1) = P(a+j) - t(a+j)
      if (p < 0.0) p = 0.0;
      q += t;  // Q(a+j+1) = Q(a+j) + t(a+j)
      if (q > 1.0) q = 1.0;
      t *= y / (a + j + 1.0);
      sum_p += w * p;
      sum_q += w * q;
      mass += w;
      if (1.0 - mass < kPoissonTailEps || w < 1e-18 * w0) break;
    }
  }
  // downward sweep: j0-1, ..., 0
  if (j0 > 0) {
    double w = w0, p = p0, q = q0;
    double t = t0 * (a + j0) / y;  // t(a+j0-1)
    for (int j = j0; j > 0; --j) {
      w *= j / l;
      p += t;  // P(a+j-1) = P(a+j) + t(a+j-1)
      if (p > 1.0) p = 1.0;
      q -= t;
      if (q < 0.0) q = 0.0;
      t *= (a + j - 1.0) / y;
      sum_p += w * p;
      sum_q += w * q;
      mass += w;
      if (1.0 - mass < kPoissonTailEps || w < 1e-18 * w0) break;
    }
  }
  return {std::clamp(sum_p, 0.0, 1.0), std::clamp(sum_q, 0.0, 1.0)};
}

}  // namespace detail

// Both tails of the non-central chi-square law at x.
inline Tails noncentral_chisq_both(int df, double nc, double x) {
  if (df < 1) throw std::domain_error("noncentral_chisq: df must be >= 1");
  if (!(nc >= 0.0)) throw std::domain_error("noncentral_chisq: nc must be >= 0");
  if (x <= 0.0) return {0.0, 1.0};
  if (nc == 0.0) return {chisq_cdf(df, x), chisq_sf(df, x)};
  return detail::noncentral_chisq_tails(df, nc, x);
}

// Distribution function Q_{phi^2} of the non-central chi-square.
inline double noncentral_chisq_cdf(int df, double nc, double x) {
  return noncentral_chisq_both(df, nc, x).lower;
}

inline double noncentral_chisq_sf(int df, double nc, double x) {
  return noncentral_chisq_both(df, nc, x).upper;
}

// --- sampling ----------------------------------------------------------------

inline std::vector<double> sample_normal(RngStream& stream, double mean,
                                         double sd, std::size_t n) {
  if (!(sd > 0.0)) throw std::domain_error("sample_normal: sd must be > 0");
  std::vector<double> out(n);
  for (auto& v : out) v = mean + sd * stream.next_normal();
  return out;
}

}  // namespace typik

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "typik/dataset.hpp"
#include "typik/dist.hpp"
#include "typik/gof.hpp"
#include "typik/rng.hpp"

namespace typik::lecam {

// Two-component normal mixture (1-alpha) N(mu,1) + alpha N(mu,sigma2) with a
// tiny known weight alpha.  Its likelihood is unbounded as sigma2 -> 0 at
// mu equal to any observed point, which is the pathology the penalized
// objective repairs.

inline void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("lecam: sigma2 must be > 0");
}

inline double loglik(const Dataset& x, double mu, double sigma2, double alpha) {
  check_sigma2(sigma2);
  const double sigma = std::sqrt(sigma2);
  const double log_w1 = std::log1p(-alpha);
  const double log_w2 = std::log(alpha);
  const double log_inv_sigma = -std::log(sigma);
  double total = 0.0;
  for (double xi : x.values) {
    const double z = xi - mu;
    const double a = log_w1 + std_normal_logpdf(z);
    const double b = alpha > 0.0
                         ? log_w2 + log_inv_sigma + std_normal_logpdf(z / sigma)
                         : kNegInf;
    total += log_sum_exp(a, b);
  }
  return total;
}

inline double cdf(double t, double mu, double sigma2, double alpha) {
  check_sigma2(sigma2);
  const double sigma = std::sqrt(sigma2);
  return (1.0 - alpha) * std_normal_cdf(t - mu) +
         alpha * std_normal_cdf((t - mu) / sigma);
}

// KS p-value of the PIT uniformity under P_(mu,sigma2); scratch buffers are
// caller-owned so grid scans do not allocate.
inline PValue gof_pvalue(const Dataset& x, double mu, double sigma2,
                         double alpha, std::vector<double>& scratch) {
  check_sigma2(sigma2);
  pit_into(x.values, [&](double t) { return cdf(t, mu, sigma2, alpha); },
           scratch);
  std::sort(scratch.begin(), scratch.end());
  const double d = ks_statistic_sorted(scratch);
  return ks_pvalue(d, static_cast<long>(x.n));
}

inline Dataset sample(std::size_t n, double mu, double sigma2, double alpha,
                      RngStream& stream) {
  check_sigma2(sigma2);
  const double sigma = std::sqrt(sigma2);
  std::vector<double> v(n);
  for (auto& vi : v) {
    const double u = stream.next_unit();
    const double z = stream.next_normal();
    vi = mu + z * (u < alpha ? sigma : 1.0);
  }
  return Dataset::scalar(std::move(v));
}

}  // namespace typik::lecam

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "typik/dataset.hpp"
#include "typik/dist.hpp"
#include "typik/gof.hpp"
#include "typik/rng.hpp"

namespace typik::ns {

// Paired observations X_i1, X_i2 ~ N(xi_i, sigma2) with per-pair nuisance
// means.  Exposed in profiled form: the interest parameter is sigma2, the
// means are eliminated by their pair averages.

struct Profile {
  std::vector<double> xi_hat;  // pair means
  double sigma2_hat = 0.0;     // pooled estimate, E = Sigma^2 / 2
};

inline Profile profile(const Dataset& x) {
  if (x.shape != DataShape::paired_sample || x.n == 0)
    throw std::domain_error("ns: paired sample required");
  Profile p;
  p.xi_hat.resize(x.n);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.n; ++i) {
    const auto [a, b] = x.pair(i);
    const double m = 0.5 * (a + b);
    p.xi_hat[i] = m;
    ss += (a - m) * (a - m) + (b - m) * (b - m);
  }
  p.sigma2_hat = ss / (2.0 * static_cast<double>(x.n));
  return p;
}

// Profile log-likelihood in sigma2 (additive constant dropped).
inline double loglik(std::size_t n, double sigma2_hat, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("ns: sigma2 must be > 0");
  const double dn = static_cast<double>(n);
  return -dn * std::log(sigma2) - dn * sigma2_hat / sigma2;
}

// Residual sum of squares over sigma2; ChiSq(n) under the true variance.
inline double gof_statistic(std::size_t n, double sigma2_hat, double sigma2) {
  return 2.0 * static_cast<double>(n) * sigma2_hat / sigma2;
}

inline PValue gof_pvalue(std::size_t n, double sigma2_hat, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("ns: sigma2 must be > 0");
  return chisq_variance_pvalue(gof_statistic(n, sigma2_hat, sigma2),
                               static_cast<int>(n));
}

// Alternative full-parameter route (--gof ks-full): KS of the standardized
// residuals {(x_ij - xi_hat_i)/sigma} against N(0,1).  Diagnostic only; with
// profiled means the residuals are not iid standard normal.
inline PValue gof_pvalue_ks_full(const Dataset& x, const Profile& prof,
                                 double sigma2, std::vector<double>& scratch) {
  if (!(sigma2 > 0.0)) throw std::domain_error("ns: sigma2 must be > 0");
  const double sigma = std::sqrt(sigma2);
  scratch.resize(2 * x.n);
  for (std::size_t i = 0; i < x.n; ++i) {
    const auto [a, b] = x.pair(i);
    scratch[2 * i] = std_normal_cdf((a - prof.xi_hat[i]) / sigma);
    scratch[2 * i + 1] = std_normal_cdf((b - prof.xi_hat[i]) / sigma);
  }
  std::sort(scratch.begin(), scratch.end());
  const double d = ks_statistic_sorted(scratch);
  return ks_pvalue(d, static_cast<long>(2 * x.n));
}

inline Dataset sample(std::span<const double> xi, double sigma2,
                      RngStream& stream) {
  if (!(sigma2 > 0.0)) throw std::domain_error("ns: sigma2 must be > 0");
  const double sigma = std::sqrt(sigma2);
  std::vector<double> v(2 * xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    v[2 * i] = xi[i] + sigma * stream.next_normal();
    v[2 * i + 1] = xi[i] + sigma * stream.next_normal();
  }
  return Dataset::paired(std::move(v));
}

}  // namespace typik::ns

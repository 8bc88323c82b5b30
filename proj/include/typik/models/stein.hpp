#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "typik/dataset.hpp"
#include "typik/dist.hpp"
#include "typik/gof.hpp"
#include "typik/rng.hpp"

namespace typik::stein {

// X ~ N(Theta, I_n); interest parameter is the length phi = |Theta|.  Every
// implemented quantity depends on the data only through |x| and |x|^2, so the
// direction nuisance never enters.

// Profile log-likelihood -(|x| - phi)^2 / 2.
inline double profile_loglik(double r, double phi) {
  if (!(r >= 0.0) || !(phi >= 0.0))
    throw std::domain_error("stein: r and phi must be >= 0");
  const double d = r - phi;
  return -0.5 * d * d;
}

// Marginal log-likelihood log q_{phi^2}(|x|^2) from the non-central
// chi-square law of the squared length.
inline double marginal_loglik(double s, double phi, int n) {
  if (!(s > 0.0)) throw std::domain_error("stein: s must be > 0");
  if (!(phi >= 0.0)) throw std::domain_error("stein: phi must be >= 0");
  return noncentral_chisq_logpdf(n, phi * phi, s);
}

// Method of moments estimator sqrt(max(s - n, 0)).
inline double mom_estimate(double s, int n) {
  return std::sqrt(std::max(s - static_cast<double>(n), 0.0));
}

// Two-tail measure min{Q_{phi^2}(s), 1 - Q_{phi^2}(s)} of the squared length.
inline PValue gof_pvalue(double s, double phi, int n) {
  if (!(phi >= 0.0)) throw std::domain_error("stein: phi must be >= 0");
  return ncx2_two_tail(n, phi * phi, s);
}

// One draw of the n-vector; the mean is taken along the first axis, which is
// without loss of generality for everything downstream of |X|^2.
inline Dataset sample(int n, double phi, RngStream& stream) {
  if (n < 1) throw std::domain_error("stein: n must be >= 1");
  if (!(phi >= 0.0)) throw std::domain_error("stein: phi must be >= 0");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& vi : v) vi = stream.next_normal();
  v[0] += phi;
  return Dataset::vector_obs(std::move(v));
}

inline double squared_length(const Dataset& x) {
  double s = 0.0;
  for (double v : x.values) s += v * v;
  return s;
}

}  // namespace typik::stein

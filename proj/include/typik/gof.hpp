#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "typik/dist.hpp"
#include "typik/special.hpp"

namespace typik {

enum class PValueMethod { ks_exact, ks_asymptotic, chisq_two_tail, ncx2_two_tail };

inline constexpr double kPValueFloor = 1e-300;
inline const double kLogPValueFloor = std::log(kPValueFloor);

// A goodness-of-fit p-value with its log carried alongside, so penalties can
// stay finite-precision safe below the linear underflow threshold.  Values
// are floored at 1e-300, never returned as exact zero.
struct PValue {
  double value = 1.0;
  double log_value = 0.0;
  PValueMethod method = PValueMethod::ks_exact;

  static PValue from_linear(double v, PValueMethod m) {
    const double c = std::clamp(v, kPValueFloor, 1.0);
    return {c, std::log(c), m};
  }
  static PValue from_log(double lv, PValueMethod m) {
    if (!(lv > kLogPValueFloor)) return {kPValueFloor, kLogPValueFloor, m};
    const double c = std::min(lv, 0.0);
    return {std::exp(c), c, m};
  }
};

// --- probability integral transform ------------------------------------------

// Componentwise F_theta(x_i); a typical sample lands near iid Unif(0,1).
template <typename F>
void pit_into(std::span<const double> x, F&& cdf, std::vector<double>& out) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw std::domain_error("pit: non-finite component");
    out[i] = cdf(x[i]);
  }
}

template <typename F>
std::vector<double> pit(std::span<const double> x, F&& cdf) {
  std::vector<double> out;
  pit_into(x, cdf, out);
  return out;
}

// --- Kolmogorov-Smirnov statistic ---------------------------------------------

// D for an already-sorted sample of PIT values.
inline double ks_statistic_sorted(std::span<const double> u) {
  if (u.empty()) throw std::domain_error("ks_statistic: empty sample");
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0))
      throw std::domain_error("ks_statistic: component outside [0,1]");
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

inline double ks_statistic(std::span<const double> u) {
  std::vector<double> s(u.begin(), u.end());
  std::sort(s.begin(), s.end());
  return ks_statistic_sorted(s);
}

// --- Kolmogorov-Smirnov p-value -----------------------------------------------
//
// P(D_n >= d), exact for n <= 140 and the Kolmogorov limiting series above.
// The exact regime follows the region split of Simard & L'Ecuyer, J. Stat.
// Softw. 39(11) (2011):
//   n*d^2 < 0.754693   Durbin matrix power (Marsaglia, Tsang & Wang 2003)
//   n*d^2 < 4          Pomeranz recursion
//   otherwise          Miller's approximation, twice the one-sided exact
//                      Smirnov/Birnbaum-Tingey tail, evaluated in log space
// The three pieces agree to ~1e-12 where they meet except the Miller region,
// whose relative error is O(p) with p < 7e-4 there.

namespace detail {

// cdf P(D_n < d) by the Durbin matrix power method of Marsaglia, Tsang &
// Wang, J. Stat. Softw. 8(18) (2003).
inline double ks_cdf_durbin_matrix(int n, double d) {
  const int k = static_cast<int>(n * d) + 1;
  const int m = 2 * k - 1;
  const double h = k - n * d;
  if (m > 201) throw std::logic_error("ks_cdf_durbin_matrix: matrix too large");

  std::vector<double> H(static_cast<std::size_t>(m) * m, 1.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 < 0) H[static_cast<std::size_t>(i) * m + j] = 0.0;
  for (int i = 0; i < m; ++i) {
    H[static_cast<std::size_t>(i) * m] -= std::pow(h, i + 1);
    H[static_cast<std::size_t>(m - 1) * m + i] -= std::pow(h, m - i);
  }
  H[static_cast<std::size_t>(m - 1) * m] +=
      (2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (int g = 1; g <= i - j + 1; ++g)
          H[static_cast<std::size_t>(i) * m + j] /= g;

  // H^n with power-of-ten rescaling to dodge overflow
  const auto multiply = [m](const std::vector<double>& A,
                            const std::vector<double>& B,
                            std::vector<double>& C) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int g = 0; g < m; ++g)
          s += A[static_cast<std::size_t>(i) * m + g] *
               B[static_cast<std::size_t>(g) * m + j];
        C[static_cast<std::size_t>(i) * m + j] = s;
      }
  };
  struct Pow {
    int m;
    const decltype(multiply)& mul;
    void run(const std::vector<double>& A, int eA, int p, std::vector<double>& V,
             int& eV) const {
      if (p == 1) {
        V = A;
        eV = eA;
        return;
      }
      run(A, eA, p / 2, V, eV);
      std::vector<double> B(V.size());
      mul(V, V, B);
      int eB = 2 * eV;
      if (p % 2 == 0) {
        V.swap(B);
        eV = eB;
      } else {
        mul(A, B, V);
        eV = eA + eB;
      }
      if (V[static_cast<std::size_t>(m / 2) * m + m / 2] > 1e140) {
        for (auto& v : V) v *= 1e-140;
        eV += 140;
      }
    }
  };
  std::vector<double> Q(H.size());
  int eQ = 0;
  Pow{m, multiply}.run(H, 0, n, Q, eQ);

  double s = Q[static_cast<std::size_t>(k - 1) * m + (k - 1)];
  for (int i = 1; i <= n; ++i) {
    s = s * i / n;
    if (s < 1e-140) {
      s *= 1e140;
      eQ -= 140;
    }
  }
  return std::clamp(s * std::pow(10.0, eQ), 0.0, 1.0);
}

// cdf P(D_n < d) by the Pomeranz recursion, after Simard & L'Ecuyer (2011).
inline double ks_cdf_pomeranz(int n, double d) {
  const double t = n * d;
  const int ell = static_cast<int>(t);
  const double z = t - ell;
  const double zc = std::ceil(t) - t;
  constexpr double kEps = 1e-15;
  constexpr int kExp = 350;
  const double kRenorm = std::ldexp(1.0, kExp);

  const int np2 = 2 * n + 2;
  std::vector<double> A(np2 + 1, 0.0);
  std::vector<int> at_floor(np2 + 1, 0), at_ceil(np2 + 1, 0);

  // floor(A_i - t) and ceil(A_i + t), resolved symbolically so integer
  // boundary cases cannot be lost to rounding
  if (z > 0.5) {
    for (int i = 2; i <= np2; i += 2) at_floor[i] = i / 2 - 2 - ell;
    for (int i = 1; i <= np2; i += 2) at_floor[i] = i / 2 - 1 - ell;
    for (int i = 2; i <= np2; i += 2) at_ceil[i] = i / 2 + ell;
    for (int i = 1; i <= np2; i += 2) at_ceil[i] = i / 2 + 1 + ell;
  } else if (z > 0.0) {
    for (int i = 1; i <= np2; ++i) at_floor[i] = i / 2 - 1 - ell;
    for (int i = 2; i <= np2; ++i) at_ceil[i] = i / 2 + ell;
    at_ceil[1] = 1 + ell;
  } else {
    for (int i = 2; i <= np2; i += 2) at_floor[i] = i / 2 - 1 - ell;
    for (int i = 1; i <= np2; i += 2) at_floor[i] = i / 2 - ell;
    for (int i = 2; i <= np2; i += 2) at_ceil[i] = i / 2 - 1 + ell;
    for (int i = 1; i <= np2; i += 2) at_ceil[i] = i / 2 + ell;
  }

  A[0] = A[1] = 0.0;
  A[2] = std::min(z, zc);
  A[3] = 1.0 - A[2];
  for (int i = 4; i <= 2 * n + 1; ++i) A[i] = A[i - 2] + 1.0;
  A[np2] = n;

  // the four possible gap widths and their power tables w^j / j!
  std::vector<std::vector<double>> pw(4, std::vector<double>(n + 1, 0.0));
  const double gaps[4] = {2.0 * A[2] / n, (1.0 - 2.0 * A[2]) / n, A[2] / n, 0.0};
  for (int s = 0; s < 4; ++s) {
    pw[s][0] = 1.0;
    for (int j = 1; j <= n; ++j) pw[s][j] = gaps[s] * pw[s][j - 1] / j;
  }

  std::vector<double> vprev(n + 2, 0.0), vcur(n + 2, 0.0);
  vprev[1] = kRenorm;
  int renorms = 1;

  for (int i = 2; i <= np2; ++i) {
    int jlow = 2 + at_floor[i];
    if (jlow < 1) jlow = 1;
    int jup = at_ceil[i];
    if (jup > n + 1) jup = n + 1;
    int klow = 2 + at_floor[i - 1];
    if (klow < 1) klow = 1;
    const int kup0 = at_ceil[i - 1];

    const double w = (A[i] - A[i - 1]) / n;
    int s = -1;
    for (int g = 0; g < 4; ++g)
      if (std::fabs(w - gaps[g]) <= kEps) {
        s = g;
        break;
      }
    if (s < 0) throw std::logic_error("ks_cdf_pomeranz: gap width mismatch");

    double minsum = kRenorm;
    for (int j = jlow; j <= jup; ++j) {
      const int kup = std::min(kup0, j);
      double sum = 0.0;
      for (int k = kup; k >= klow; --k) sum += vprev[k] * pw[s][j - k];
      vcur[j] = sum;
      minsum = std::min(minsum, sum);
    }
    for (int j = 1; j < jlow; ++j) vcur[j] = 0.0;
    for (int j = jup + 1; j <= n + 1; ++j) vcur[j] = 0.0;
    if (minsum < 1e-280) {
      for (int j = jlow; j <= jup; ++j) vcur[j] *= kRenorm;
      ++renorms;
    }
    vprev.swap(vcur);
  }

  const double sum = vprev[n + 1];
  const double logcdf =
      std::lgamma(n + 1.0) - renorms * kExp * M_LN2 + std::log(sum);
  if (logcdf >= 0.0) return 1.0;
  return std::exp(logcdf);
}

// log of the one-sided exact tail P(D_n^+ >= d), by the Smirnov /
// Birnbaum-Tingey sum, accumulated in log space.
inline double ks_log_sf_one_sided(int n, double d) {
  if (d >= 1.0) return kNegInf;
  const int jmax = static_cast<int>(n * (1.0 - d));
  double max_term = kNegInf;
  std::vector<double> terms;
  terms.reserve(jmax + 1);
  const double lgn = std::lgamma(n + 1.0);
  for (int j = 0; j <= jmax; ++j) {
    const double q = 1.0 - d - static_cast<double>(j) / n;
    if (q <= 0.0) break;
    const double lt = lgn - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                      (j - 1.0) * std::log(d + static_cast<double>(j) / n) +
                      (n - j) * std::log(q);
    terms.push_back(lt);
    max_term = std::max(max_term, lt);
  }
  if (terms.empty() || max_term == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double lt : terms) acc += std::exp(lt - max_term);
  return std::log(d) + max_term + std::log(acc);
}

// log of the limiting two-sided tail 2 * sum_k (-1)^{k-1} exp(-2 k^2 n d^2).
inline double ks_log_sf_asymptotic(double nd2) {
  const double e1 = 2.0 * nd2;  // -log of the leading term
  if (e1 > 350.0) return M_LN2 - e1;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * nd2);
    sum += sign * term;
    if (term < 1e-18 * std::max(sum, 1e-18)) break;
    sign = -sign;
  }
  if (sum <= 0.0) return kNegInf;
  return std::min(0.0, M_LN2 + std::log(sum));
}

}  // namespace detail

// Exact/asymptotic null tail probability P(D_n >= D); exact for n <= 140,
// Kolmogorov's limiting series beyond.
inline PValue ks_pvalue(double D, long n) {
  if (n < 1) throw std::domain_error("ks_pvalue: n must be >= 1");
  if (!(D >= 0.0 && D <= 1.0))
    throw std::domain_error("ks_pvalue: D must be in [0,1]");

  const double nd = static_cast<double>(n) * D;
  if (n == 1) {
    // D_1 = max(u, 1-u) has cdf 2d-1 on [1/2, 1]
    const double p = D <= 0.5 ? 1.0 : 2.0 * (1.0 - D);
    return PValue::from_linear(p, PValueMethod::ks_exact);
  }
  if (2.0 * nd <= 1.0) return PValue::from_linear(1.0, PValueMethod::ks_exact);
  if (D >= 1.0) return PValue::from_linear(0.0, PValueMethod::ks_exact);

  const double w = nd * D;
  if (n <= 140) {
    if (w < 0.754693)
      return PValue::from_linear(1.0 - detail::ks_cdf_durbin_matrix(n, D),
                                 PValueMethod::ks_exact);
    if (w < 4.0)
      return PValue::from_linear(1.0 - detail::ks_cdf_pomeranz(n, D),
                                 PValueMethod::ks_exact);
    return PValue::from_log(
        std::min(0.0, M_LN2 + detail::ks_log_sf_one_sided(n, D)),
        PValueMethod::ks_exact);
  }
  return PValue::from_log(detail::ks_log_sf_asymptotic(w),
                          PValueMethod::ks_asymptotic);
}

// --- chi-square two-tail (Neyman-Scott penalty) --------------------------------

// Equal-tail two-sided p-value min{1, 2 min(F_df(T), 1 - F_df(T))}.
inline PValue chisq_variance_pvalue(double T, int df) {
  if (!(T >= 0.0)) throw std::domain_error("chisq_variance_pvalue: T must be >= 0");
  if (df < 1) throw std::domain_error("chisq_variance_pvalue: df must be >= 1");
  if (T == 0.0) return PValue::from_linear(0.0, PValueMethod::chisq_two_tail);
  const double a = 0.5 * df, y = 0.5 * T;
  double log_small;
  if (y < a + 1.0) {
    const double lp = detail::log_gamma_p_series(a, y);
    log_small = std::min(lp, std::log1p(-std::exp(lp)));
  } else {
    const double lq = detail::log_gamma_q_cf(a, y);
    log_small = std::min(lq, std::log1p(-std::exp(lq)));
  }
  return PValue::from_log(std::min(0.0, M_LN2 + log_small),
                          PValueMethod::chisq_two_tail);
}

// --- non-central chi-square two-tail (Stein penalty) ---------------------------

// min{Q_{phi^2}(s), 1 - Q_{phi^2}(s)}, the un-doubled two-tail measure used by
// the mean-vector-length objective; lives in [0, 1/2].
inline PValue ncx2_two_tail(int df, double nc, double s) {
  if (!(s > 0.0)) throw std::domain_error("ncx2_two_tail: s must be > 0");
  const Tails t = noncentral_chisq_both(df, nc, s);
  return PValue::from_linear(std::min(t.lower, t.upper),
                             PValueMethod::ncx2_two_tail);
}

}  // namespace typik

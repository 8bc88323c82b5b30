#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <vector>

#include "typik/objective.hpp"
#include "typik/parallel.hpp"

namespace typik {

// Typicality values tau over a parameter grid, with the Monte Carlo metadata
// needed to regenerate them exactly.
struct ContourGrid {
  ModelId model_id = ModelId::stein;
  std::vector<ParamPoint> grid;  // estimator appended as the last entry
  std::vector<double> tau;
  std::size_t mc_samples = 0;
  double lambda = 0.0;
  std::uint64_t master_seed = 0;
  std::size_t warnings = 0;        // replicates resolved by the conservative fallback
  std::size_t estimator_index = 0;
};

struct ConfidenceRegion {
  double alpha = 0.05;
  std::vector<std::pair<double, double>> intervals;  // 1-D: disjoint, sorted
  std::vector<ParamPoint> retained;                  // multi-D grids
  bool contains_estimator = false;

  bool contains(double v) const {
    for (const auto& [lo, hi] : intervals)
      if (v >= lo && v <= hi) return true;
    return false;
  }
};

namespace detail {

// Replicate deviance R_lambda(X_m, theta) with its own inner maximization
// over the observed-data grid spec; an optimizer failure counts the
// replicate toward typicality (indicator 1) and bumps the warning counter.
struct ReplicateOutcome {
  bool indicator = true;
  bool warned = false;
};

inline ReplicateOutcome contour_replicate(const ModelSpec& spec,
                                          const ParamPoint& theta,
                                          const ObjectiveConfig& cfg,
                                          double r_obs, RngStream stream,
                                          Workspace& ws) {
  try {
    Dataset xm = sample(spec, theta, stream);
    const SuffStats stm = prepare(spec, xm);
    const FitResult fm = maximize(spec, xm, stm, cfg, ws);
    const double rm = deviance(spec, xm, stm, theta, cfg, fm, ws);
    return {rm >= r_obs, false};
  } catch (const OptimizationError&) {
    return {true, true};
  } catch (const std::domain_error&) {
    // a degenerate replicate (e.g. zero within-pair spread) cannot be fit;
    // counted toward typicality, never toward overconfidence
    return {true, true};
  }
}

}  // namespace detail

struct ContourValue {
  double tau = 1.0;
  std::size_t warnings = 0;
};

// Monte Carlo typicality at one parameter point:
//   tau = (1/M) * #{m : R(X_m, theta) >= R(x, theta)},  X_m ~ P_theta.
// The observed fit may be shared across calls; pass r_obs computed from it.
inline ContourValue contour_at_given_fit(const ModelSpec& spec,
                                         const ParamPoint& theta,
                                         const ObjectiveConfig& cfg,
                                         double r_obs, std::size_t M,
                                         const RngStream& stream, int threads) {
  if (M < 1) throw std::domain_error("contour_at: M must be >= 1");
  validate(spec, theta);
  std::vector<unsigned char> hit(M, 0), warn(M, 0);
  parallel_for(M, threads, [&](std::size_t m) {
    Workspace ws;
    const auto rep = detail::contour_replicate(spec, theta, cfg, r_obs,
                                               stream.derive(m), ws);
    hit[m] = rep.indicator ? 1 : 0;
    warn[m] = rep.warned ? 1 : 0;
  });
  std::size_t hits = 0, warnings = 0;
  for (std::size_t m = 0; m < M; ++m) {
    hits += hit[m];
    warnings += warn[m];
  }
  return {static_cast<double>(hits) / static_cast<double>(M), warnings};
}

inline ContourValue contour_at_detail(const ModelSpec& spec, const Dataset& x,
                                      const ParamPoint& theta,
                                      const ObjectiveConfig& cfg, std::size_t M,
                                      const RngStream& stream, int threads = 1) {
  Workspace ws;
  const SuffStats st = prepare(spec, x);
  const FitResult fit = maximize(spec, x, st, cfg, ws);
  const double r_obs = deviance(spec, x, st, theta, cfg, fit, ws);
  return contour_at_given_fit(spec, theta, cfg, r_obs, M, stream, threads);
}

inline double contour_at(const ModelSpec& spec, const Dataset& x,
                         const ParamPoint& theta, const ObjectiveConfig& cfg,
                         std::size_t M, const RngStream& stream,
                         int threads = 1) {
  return contour_at_detail(spec, x, theta, cfg, M, stream, threads).tau;
}

// Contour over a grid of parameter points, the typicality estimator appended;
// grid point i draws from the stream (master_seed, i), so extending the grid
// never perturbs existing values.
inline ContourGrid contour_grid(const ModelSpec& spec, const Dataset& x,
                                std::vector<ParamPoint> points,
                                const ObjectiveConfig& cfg, std::size_t M,
                                std::uint64_t master_seed, int threads = 1) {
  if (points.empty()) throw std::domain_error("contour_grid: empty grid");
  Workspace ws;
  const SuffStats st = prepare(spec, x);
  const FitResult fit = maximize(spec, x, st, cfg, ws);

  ContourGrid cg;
  cg.model_id = spec.id;
  cg.estimator_index = points.size();
  points.push_back(fit.theta_check);
  cg.grid = std::move(points);
  cg.tau.assign(cg.grid.size(), 0.0);
  cg.mc_samples = M;
  cg.lambda = cfg.lambda;
  cg.master_seed = master_seed;

  std::vector<std::size_t> warnings(cg.grid.size(), 0);
  parallel_for(cg.grid.size(), threads, [&](std::size_t i) {
    Workspace wsi;
    const double r_obs =
        deviance(spec, x, st, cg.grid[i], cfg, fit, wsi);
    const auto v = contour_at_given_fit(spec, cg.grid[i], cfg, r_obs, M,
                                        RngStream(master_seed, i), 1);
    cg.tau[i] = v.tau;
    warnings[i] = v.warnings;
  });
  for (auto w : warnings) cg.warnings += w;
  return cg;
}

// Maxitive extension: typicality of a composite hypothesis is the sup of the
// pointwise values over the evaluated grid.
inline double typicality_of_set(
    const ContourGrid& cg, const std::function<bool(const ParamPoint&)>& H) {
  double sup = -1.0;
  for (std::size_t i = 0; i < cg.grid.size(); ++i)
    if (H(cg.grid[i])) sup = std::max(sup, cg.tau[i]);
  if (sup < 0.0)
    throw std::domain_error("typicality_of_set: hypothesis selects no grid point");
  return sup;
}

// Level set {theta : tau(theta) >= alpha}.  1-D grids get interval endpoints
// located by linear interpolation between straddling neighbours.
inline ConfidenceRegion confidence_region(const ContourGrid& cg, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("confidence_region: alpha must be in (0,1)");
  ConfidenceRegion region;
  region.alpha = alpha;

  const bool one_dim =
      !cg.grid.empty() && cg.grid.front().coords.size() == 1;
  if (!one_dim) {
    for (std::size_t i = 0; i < cg.grid.size(); ++i)
      if (cg.tau[i] >= alpha) region.retained.push_back(cg.grid[i]);
    const double est_tau = cg.tau[cg.estimator_index];
    region.contains_estimator = est_tau >= alpha;
    return region;
  }

  std::vector<std::pair<double, double>> pts(cg.grid.size());
  for (std::size_t i = 0; i < cg.grid.size(); ++i)
    pts[i] = {cg.grid[i].coords[0], cg.tau[i]};
  std::sort(pts.begin(), pts.end());
  // duplicate coordinates (the appended estimator can coincide with a grid
  // point) keep the larger tau
  std::vector<std::pair<double, double>> uniq;
  for (const auto& p : pts) {
    if (!uniq.empty() && uniq.back().first == p.first)
      uniq.back().second = std::max(uniq.back().second, p.second);
    else
      uniq.push_back(p);
  }

  const auto cross = [&](std::size_t a, std::size_t b) {
    const auto [xa, ta] = uniq[a];
    const auto [xb, tb] = uniq[b];
    return xa + (alpha - ta) * (xb - xa) / (tb - ta);
  };
  std::size_t i = 0;
  while (i < uniq.size()) {
    if (uniq[i].second < alpha) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < uniq.size() && uniq[j + 1].second >= alpha) ++j;
    double lo = uniq[i].first;
    double hi = uniq[j].first;
    if (i > 0) lo = cross(i - 1, i);
    if (j + 1 < uniq.size()) hi = cross(j, j + 1);
    region.intervals.emplace_back(lo, hi);
    i = j + 1;
  }
  region.contains_estimator =
      region.contains(cg.grid[cg.estimator_index].coords[0]);
  return region;
}

// --- exact contours for the mean-vector-length reduction ----------------------
//
// Everything depends on the data only through s' = |X|^2 ~ ncx2(n, phi^2), so
// tau(phi) = P{ R(s', phi) >= R(s, phi) } is computable without resampling:
// locate the sub-level interval of s' |-> R(s', phi) by bisection and read the
// two tail masses off the non-central chi-square law.

namespace detail {

// P{R(S) >= r_obs} for a deviance-shaped statistic (nonnegative, single dip).
// Returns -1 when the dip cannot be bracketed.
inline double level_set_tail_probability(
    const std::function<double(double)>& R, int n, double nc, double r_obs) {
  if (r_obs <= 0.0) return 1.0;
  const double mean = static_cast<double>(n) + nc;
  const double sd = std::sqrt(2.0 * n + 4.0 * nc);
  const double lo_end = 1e-8;
  const double hi_end = mean + 60.0 * sd + 10.0;

  // coarse scan for the dip
  const int scan = 96;
  double s_min = mean, r_min = std::numeric_limits<double>::infinity();
  const double scan_lo = std::max(lo_end, mean - 12.0 * sd);
  const double scan_hi = mean + 12.0 * sd;
  for (int i = 0; i <= scan; ++i) {
    const double s = scan_lo + (scan_hi - scan_lo) * i / scan;
    const double r = R(s);
    if (r < r_min) {
      r_min = r;
      s_min = s;
    }
  }
  if (!(r_min < r_obs)) return -1.0;

  // outside: R >= r_obs, inside: R < r_obs; returns the crossing
  const auto bisect = [&](double outside, double inside) {
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (outside + inside);
      if (R(m) >= r_obs)
        outside = m;
      else
        inside = m;
      if (std::fabs(inside - outside) < 1e-10 * (1.0 + std::fabs(inside)))
        break;
    }
    return 0.5 * (outside + inside);
  };

  double s_lo = lo_end;
  if (R(lo_end) >= r_obs) s_lo = bisect(lo_end, s_min);
  if (!(R(hi_end) >= r_obs))
    return -1.0;  // no right crossing: statistic is not deviance-shaped here
  const double s_hi = bisect(hi_end, s_min);

  const Tails t_lo = noncentral_chisq_both(n, nc, s_lo);
  const Tails t_hi = noncentral_chisq_both(n, nc, s_hi);
  return std::clamp(t_lo.lower + t_hi.upper, 0.0, 1.0);
}

}  // namespace detail

// Exact typicality contour for the mean-vector length: no data resampling,
// root-finding of the deviance level set plus CDF differences.  Falls back to
// the Monte Carlo contour when the level set cannot be located.
inline double stein_exact_contour(double s, double phi, int n,
                                  const ObjectiveConfig& cfg,
                                  std::size_t fallback_M = 2000,
                                  std::uint64_t fallback_seed = 1) {
  if (!(s > 0.0)) throw std::domain_error("stein_exact_contour: s must be > 0");
  if (!(phi >= 0.0))
    throw std::domain_error("stein_exact_contour: phi must be >= 0");
  const ModelSpec spec = make_stein(static_cast<std::size_t>(n));

  // carrier observation with the requested squared length; the model's
  // statistics read only the sufficient pair (r, s)
  Dataset carrier = Dataset::vector_obs(
      std::vector<double>(static_cast<std::size_t>(n), 0.0));
  Workspace ws;
  const auto deviance_of = [&](double sq_len) {
    carrier.values[0] = std::sqrt(sq_len);
    SuffStats st;
    st.s = sq_len;
    st.r = std::sqrt(sq_len);
    const FitResult fit = maximize(spec, carrier, st, cfg, ws);
    return std::max(0.0, fit.objective_value - objective(spec, carrier, st,
                                                         stein_point(phi), cfg,
                                                         ws));
  };

  const double r_obs = deviance_of(s);
  const double tau =
      detail::level_set_tail_probability(deviance_of, n, phi * phi, r_obs);
  if (tau >= 0.0) return tau;

  // fallback: Monte Carlo on the |x|-matched observation
  std::fprintf(stderr,
               "stein_exact_contour: level set not bracketed at phi=%g; "
               "falling back to Monte Carlo (M=%zu)\n",
               phi, fallback_M);
  carrier.values[0] = std::sqrt(s);
  return contour_at(spec, carrier, stein_point(phi), cfg, fallback_M,
                    RngStream(fallback_seed, 0), 1);
}

// Marginal-likelihood-based contour for the same reduction: the statistic is
// the drop of log q_{phi^2}(|X|^2) from its maximum over phi.
inline double stein_marginal_contour(double s, double phi, int n,
                                     const GridSpec& phi_grid) {
  if (!(s > 0.0))
    throw std::domain_error("stein_marginal_contour: s must be > 0");
  if (!(phi >= 0.0))
    throw std::domain_error("stein_marginal_contour: phi must be >= 0");

  const auto marginal_deviance = [&](double sq_len) {
    const auto ll = [&](const std::vector<double>& p) {
      return stein::marginal_loglik(sq_len, p[0], n);
    };
    double best = -std::numeric_limits<double>::infinity();
    double best_phi = phi_grid.lo;
    for (int i = 0; i < phi_grid.points; ++i) {
      const double cand = phi_grid.at(i);
      const double v = stein::marginal_loglik(sq_len, cand, n);
      if (v > best) {
        best = v;
        best_phi = cand;
      }
    }
    const std::vector<double> lo{phi_grid.lo}, hi{phi_grid.hi},
        step{phi_grid.step()}, start{best_phi};
    const auto nm = nelder_mead_maximize(ll, start, step, lo, hi);
    best = std::max(best, nm.f);
    return std::max(0.0, best - stein::marginal_loglik(sq_len, phi, n));
  };

  const double r_obs = marginal_deviance(s);
  const double tau = detail::level_set_tail_probability(
      marginal_deviance, n, phi * phi, r_obs);
  return tau >= 0.0 ? tau : 0.0;
}

}  // namespace typik

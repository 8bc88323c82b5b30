#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "typik/models.hpp"
#include "typik/nelder_mead.hpp"

namespace typik {

struct OptimizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One coordinate of the search grid.  log_scale grids are uniform in
// log-space and map to the parameter through exp().
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int points = 2;
  bool log_scale = false;

  void check() const {
    if (points < 2) throw std::domain_error("GridSpec: points must be >= 2");
    if (!(hi > lo)) throw std::domain_error("GridSpec: hi must exceed lo");
  }
  double at(int i) const {
    return lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(points - 1);
  }
  double step() const {
    return (hi - lo) / static_cast<double>(points - 1);
  }
};

enum class OptimizerKind { grid, grid_then_simplex };

// Settings for the penalized objective of the typicality fit.
struct ObjectiveConfig {
  double lambda = 0.0;
  double pvalue_floor = kPValueFloor;
  OptimizerKind optimizer = OptimizerKind::grid_then_simplex;
  std::vector<GridSpec> grid;  // empty: use the model default
  int simplex_max_iter = 400;
  double simplex_tol = 1e-8;
  bool record_trace = false;

  void check() const {
    if (!(lambda >= 0.0))
      throw std::domain_error("ObjectiveConfig: lambda must be >= 0");
    if (!(pvalue_floor > 0.0 && pvalue_floor < 1.0))
      throw std::domain_error("ObjectiveConfig: pvalue_floor must be in (0,1)");
    for (const auto& g : grid) g.check();
  }
};

struct FitResult {
  ParamPoint theta_check;
  double objective_value = 0.0;
  std::size_t evaluations = 0;
  std::vector<std::pair<ParamPoint, double>> trace;
};

// Default search grids (search scale: lecam second coordinate is log sigma2).
inline std::vector<GridSpec> default_grid(const ModelSpec& spec,
                                          const SuffStats& st) {
  switch (spec.id) {
    case ModelId::lecam:
      return {{st.mean - 3.0, st.mean + 3.0, 101, false},
              {-25.0, 5.0, 61, true}};
    case ModelId::neyman_scott:
      if (!(st.sigma2_hat > 0.0))
        throw std::domain_error("default_grid: degenerate paired sample");
      return {{0.1 * st.sigma2_hat, 4.0 * st.sigma2_hat, 400, false}};
    case ModelId::stein:
      if (!(st.r > 0.0))
        throw std::domain_error("default_grid: zero-length observation");
      return {{0.0, 2.0 * st.r, 400, false}};
  }
  throw std::logic_error("default_grid: unreachable");
}

inline ParamPoint search_to_param(const ModelSpec& spec,
                                  std::span<const double> sc,
                                  std::span<const GridSpec> grid) {
  std::vector<double> c(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i)
    c[i] = grid[i].log_scale ? std::exp(sc[i]) : sc[i];
  switch (spec.id) {
    case ModelId::lecam: return lecam_point(c[0], c[1]);
    case ModelId::neyman_scott: return ns_point(c[0]);
    case ModelId::stein: return stein_point(c[0]);
  }
  throw std::logic_error("search_to_param: unreachable");
}

// Penalty of the typicality objective: -log of the model's GOF p-value,
// floored; zero iff the p-value is 1.
inline double penalty(const ModelSpec& spec, const Dataset& x,
                      const SuffStats& st, const ParamPoint& theta,
                      const ObjectiveConfig& cfg, Workspace& ws) {
  const PValue pv = gof_pvalue(spec, x, st, theta, ws);
  return -std::max(pv.log_value, std::log(cfg.pvalue_floor));
}

// rho_lambda(x, theta) = loglik - lambda * penalty.  At lambda = 0 the
// penalty is not evaluated, so the identity with the log-likelihood is exact.
inline double objective(const ModelSpec& spec, const Dataset& x,
                        const SuffStats& st, const ParamPoint& theta,
                        const ObjectiveConfig& cfg, Workspace& ws) {
  const double ll = loglik(spec, x, st, theta);
  if (cfg.lambda == 0.0) return ll;
  return ll - cfg.lambda * penalty(spec, x, st, theta, cfg, ws);
}

// Coarse lexicographic grid scan, then optional simplex refinement from the
// best cell.  Ties on the grid go to the first point in lexicographic order.
inline FitResult maximize(const ModelSpec& spec, const Dataset& x,
                          const SuffStats& st, const ObjectiveConfig& cfg,
                          Workspace& ws) {
  cfg.check();
  const std::vector<GridSpec> grid =
      cfg.grid.empty() ? default_grid(spec, st) : cfg.grid;
  if (static_cast<int>(grid.size()) != spec.param_dim)
    throw std::domain_error("maximize: grid dimension mismatch");

  const std::size_t dim = grid.size();
  std::size_t total = 1;
  for (const auto& g : grid) total *= static_cast<std::size_t>(g.points);

  FitResult out;
  std::size_t evals = 0;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_sc(dim), sc(dim);
  bool found = false;

  const auto eval_search = [&](std::span<const double> s) {
    const ParamPoint theta = search_to_param(spec, s, grid);
    ++evals;
    const double v = objective(spec, x, st, theta, cfg, ws);
    if (cfg.record_trace) out.trace.emplace_back(theta, v);
    return v;
  };

  std::vector<int> idx(dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t c = dim; c-- > 0;) {
      idx[c] = static_cast<int>(rem % grid[c].points);
      rem /= grid[c].points;
    }
    for (std::size_t c = 0; c < dim; ++c) sc[c] = grid[c].at(idx[c]);
    const double v = eval_search(sc);
    if (std::isfinite(v) && v > best) {
      best = v;
      best_sc = sc;
      found = true;
    }
  }
  if (!found)
    throw OptimizationError("maximize: no finite objective value on the grid");

  if (cfg.optimizer == OptimizerKind::grid_then_simplex) {
    std::vector<double> lo(dim), hi(dim), step(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      lo[c] = grid[c].lo;
      hi[c] = grid[c].hi;
      step[c] = grid[c].step();
    }
    NelderMeadOptions opt;
    opt.max_iter = cfg.simplex_max_iter;
    opt.xtol = cfg.simplex_tol;
    const auto nm = nelder_mead_maximize(
        [&](const std::vector<double>& s) {
          const double v = eval_search(s);
          return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        },
        best_sc, step, lo, hi, opt);
    if (std::isfinite(nm.f) && nm.f > best) {
      best = nm.f;
      best_sc = nm.x;
    }
  }

  out.theta_check = search_to_param(spec, best_sc, grid);
  out.objective_value = best;
  out.evaluations = evals;
  return out;
}

// Deviance R_lambda(x, theta) = rho(x, theta_check) - rho(x, theta), clamped
// at zero; the typicality estimator has deviance exactly 0.
inline double deviance(const ModelSpec& spec, const Dataset& x,
                       const SuffStats& st, const ParamPoint& theta,
                       const ObjectiveConfig& cfg, const FitResult& fit,
                       Workspace& ws) {
  const double v = objective(spec, x, st, theta, cfg, ws);
  return std::max(0.0, fit.objective_value - v);
}

// Convenience overloads that prepare their own statistics and scratch.
inline double penalty(const ModelSpec& spec, const Dataset& x,
                      const ParamPoint& theta, const ObjectiveConfig& cfg) {
  Workspace ws;
  const SuffStats st = prepare(spec, x);
  return penalty(spec, x, st, theta, cfg, ws);
}

inline double objective(const ModelSpec& spec, const Dataset& x,
                        const ParamPoint& theta, const ObjectiveConfig& cfg) {
  Workspace ws;
  const SuffStats st = prepare(spec, x);
  return objective(spec, x, st, theta, cfg, ws);
}

inline FitResult maximize(const ModelSpec& spec, const Dataset& x,
                          const ObjectiveConfig& cfg) {
  Workspace ws;
  const SuffStats st = prepare(spec, x);
  return maximize(spec, x, st, cfg, ws);
}

inline double deviance(const ModelSpec& spec, const Dataset& x,
                       const ParamPoint& theta, const ObjectiveConfig& cfg,
                       const FitResult& fit) {
  Workspace ws;
  const SuffStats st = prepare(spec, x);
  return deviance(spec, x, st, theta, cfg, fit, ws);
}

}  // namespace typik

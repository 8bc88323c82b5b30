#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "typik/contour.hpp"
#include "typik/io.hpp"
#include "typik/objective.hpp"
#include "typik/parallel.hpp"

namespace typik {

inline constexpr const char* kVersionTag = "typik 0.1.0";

// Replication experiment configuration.  Every run is exactly reproducible
// from (ExperimentConfig, master_seed).
struct ExperimentConfig {
  std::string experiment_id;
  ModelId model = ModelId::stein;

  std::size_t n = 100;
  double lecam_mu = 1.0;
  double lecam_sigma2 = 2.0;
  double lecam_alpha = 1e-50;
  double ns_sigma2 = 1.0;
  double stein_phi = 4.0 * std::sqrt(10.0);

  std::size_t replications = 200;
  std::vector<double> lambdas;
  std::size_t mc_samples = 500;
  std::vector<GridSpec> grid;  // optional override for the fits
  std::vector<double> alpha_levels = {0.05, 0.10, 0.25};
  std::uint64_t master_seed = 42;
  int threads = 1;
  OptimizerKind optimizer = OptimizerKind::grid_then_simplex;

  void check() const {
    if (replications < 1)
      throw std::domain_error("ExperimentConfig: replications must be >= 1");
    if (lambdas.empty())
      throw std::domain_error("ExperimentConfig: lambda list must be nonempty");
  }
};

inline const std::set<std::string>& experiment_ids() {
  static const std::set<std::string> ids = {
      "lecam_surfaces", "lecam_profiles", "ns_objective",
      "ns_bias",        "stein_objective", "stein_mse",
      "stein_contour",  "validity",        "coverage"};
  return ids;
}

inline const std::set<std::string>& figure_ids() {
  static const std::set<std::string> ids = {
      "lik_surface",  "ks_surface",      "ks_profiles", "obj_profiles",
      "ns_objective", "stein_objective", "stein_contour"};
  return ids;
}

// Per-replication records plus summary statistics; summaries are always
// recomputable from the records.
struct SimulationReport {
  std::string experiment_id;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> summary;
  nlohmann::ordered_json config_echo;

  double summary_value(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    throw std::out_of_range("summary key: " + key);
  }
};

namespace detail {

inline nlohmann::ordered_json echo_config(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment_id"] = cfg.experiment_id;
  j["model"] = model_name(cfg.model);
  j["n"] = cfg.n;
  j["replications"] = cfg.replications;
  j["lambdas"] = cfg.lambdas;
  j["M"] = cfg.mc_samples;
  j["master_seed"] = cfg.master_seed;
  j["alpha_levels"] = cfg.alpha_levels;
  j["optimizer"] =
      cfg.optimizer == OptimizerKind::grid ? "grid" : "grid_then_simplex";
  switch (cfg.model) {
    case ModelId::lecam:
      j["true_theta"] = {cfg.lecam_mu, cfg.lecam_sigma2};
      j["alpha_mix"] = cfg.lecam_alpha;
      break;
    case ModelId::neyman_scott:
      j["true_theta"] = {cfg.ns_sigma2};
      break;
    case ModelId::stein:
      j["true_theta"] = {cfg.stein_phi};
      break;
  }
  j["version"] = kVersionTag;
  return j;
}

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double mse_against(const std::vector<double>& v, double target) {
  double s = 0.0;
  for (double x : v) s += (x - target) * (x - target);
  return s / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline std::string lambda_tag(double l) {
  std::ostringstream ss;
  ss << l;
  std::string s = ss.str();
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

}  // namespace detail

// --- Neyman-Scott bias experiment ----------------------------------------------

// Per-replication sigma2 MLE and typicality estimates across the lambda
// sweep; Xi_i ~ N(0,1) are redrawn every replication.
inline SimulationReport run_ns_bias(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.lambdas.empty()) cfg.lambdas = {0.0, 1.0, 2.0, 4.0, 8.0};
  cfg.check();

  SimulationReport rep;
  rep.experiment_id = "ns_bias";
  rep.columns = {"rep", "sigma2_mle"};
  for (double l : cfg.lambdas)
    rep.columns.push_back("sigma2_check_l" + detail::lambda_tag(l));
  rep.rows.assign(cfg.replications,
                  std::vector<double>(rep.columns.size(), 0.0));

  const ModelSpec spec = make_neyman_scott(cfg.n);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RngStream root(cfg.master_seed, r);
    RngStream xi_stream = root.derive(0);
    RngStream data_stream = root.derive(1);
    std::vector<double> xi(cfg.n);
    for (auto& x : xi) x = xi_stream.next_normal();
    const Dataset x = ns::sample(xi, cfg.ns_sigma2, data_stream);
    const SuffStats st = prepare(spec, x);

    auto& row = rep.rows[r];
    row[0] = static_cast<double>(r);
    row[1] = st.sigma2_hat;
    Workspace ws;
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
      ObjectiveConfig oc;
      oc.lambda = cfg.lambdas[li];
      oc.optimizer = cfg.optimizer;
      oc.grid = cfg.grid;
      const FitResult fit = maximize(spec, x, st, oc, ws);
      row[2 + li] = fit.theta_check.coords[0];
    }
  });

  std::vector<double> mle(cfg.replications);
  for (std::size_t r = 0; r < cfg.replications; ++r) mle[r] = rep.rows[r][1];
  rep.summary.emplace_back("mean_sigma2_mle", detail::mean_of(mle));
  rep.summary.emplace_back("se_sigma2_mle",
                           detail::sd_of(mle) / std::sqrt(double(cfg.replications)));
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    std::vector<double> est(cfg.replications);
    for (std::size_t r = 0; r < cfg.replications; ++r)
      est[r] = rep.rows[r][2 + li];
    const std::string tag = detail::lambda_tag(cfg.lambdas[li]);
    rep.summary.emplace_back("mean_sigma2_check_l" + tag, detail::mean_of(est));
    rep.summary.emplace_back("bias_l" + tag,
                             detail::mean_of(est) - cfg.ns_sigma2);
    rep.summary.emplace_back("mse_l" + tag,
                             detail::mse_against(est, cfg.ns_sigma2));
  }
  rep.config_echo = detail::echo_config(cfg);
  return rep;
}

// --- Stein estimator comparison -------------------------------------------------

// MLE |X|, method of moments, marginal-likelihood maximizer, and the
// typicality estimator at the configured lambda, with their MSE table.
inline SimulationReport run_stein_mse(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.lambdas.empty()) cfg.lambdas = {10.0};
  cfg.check();
  const double lambda = cfg.lambdas.front();

  SimulationReport rep;
  rep.experiment_id = "stein_mse";
  rep.columns = {"rep", "norm_x", "mle", "mom", "marginal", "typicality"};
  rep.rows.assign(cfg.replications,
                  std::vector<double>(rep.columns.size(), 0.0));

  const ModelSpec spec = make_stein(cfg.n);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RngStream root(cfg.master_seed, r);
    RngStream data_stream = root.derive(0);
    const Dataset x =
        stein::sample(static_cast<int>(cfg.n), cfg.stein_phi, data_stream);
    const SuffStats st = prepare(spec, x);
    Workspace ws;

    ObjectiveConfig oc;
    oc.lambda = lambda;
    oc.optimizer = cfg.optimizer;
    oc.grid = cfg.grid;
    const FitResult typ = maximize(spec, x, st, oc, ws);

    // marginal-likelihood maximizer via the same grid-then-simplex machinery
    const std::vector<GridSpec> mg =
        cfg.grid.empty() ? default_grid(spec, st) : cfg.grid;
    double best = -std::numeric_limits<double>::infinity();
    double best_phi = mg[0].lo;
    for (int i = 0; i < mg[0].points; ++i) {
      const double cand = mg[0].at(i);
      const double v =
          stein::marginal_loglik(st.s, cand, static_cast<int>(cfg.n));
      if (v > best) {
        best = v;
        best_phi = cand;
      }
    }
    const std::vector<double> lo{mg[0].lo}, hi{mg[0].hi}, step{mg[0].step()},
        start{best_phi};
    const auto nm = nelder_mead_maximize(
        [&](const std::vector<double>& p) {
          return stein::marginal_loglik(st.s, p[0], static_cast<int>(cfg.n));
        },
        start, step, lo, hi);
    const double marginal = nm.f > best ? nm.x[0] : best_phi;

    auto& row = rep.rows[r];
    row[0] = static_cast<double>(r);
    row[1] = st.r;
    row[2] = st.r;  // profile MLE equals |x|
    row[3] = stein::mom_estimate(st.s, static_cast<int>(cfg.n));
    row[4] = marginal;
    row[5] = typ.theta_check.coords[0];
  });

  const double phi = cfg.stein_phi;
  std::vector<double> norm(cfg.replications), mle(cfg.replications),
      mom(cfg.replications), marg(cfg.replications), typ(cfg.replications);
  for (std::size_t r = 0; r < cfg.replications; ++r) {
    norm[r] = rep.rows[r][1];
    mle[r] = rep.rows[r][2];
    mom[r] = rep.rows[r][3];
    marg[r] = rep.rows[r][4];
    typ[r] = rep.rows[r][5];
  }
  rep.summary.emplace_back("mean_norm_x", detail::mean_of(norm));
  rep.summary.emplace_back("se_norm_x",
                           detail::sd_of(norm) / std::sqrt(double(cfg.replications)));
  rep.summary.emplace_back("mse_mle", detail::mse_against(mle, phi));
  rep.summary.emplace_back("mse_mom", detail::mse_against(mom, phi));
  rep.summary.emplace_back("mse_marginal", detail::mse_against(marg, phi));
  rep.summary.emplace_back("mse_typicality", detail::mse_against(typ, phi));
  rep.summary.emplace_back(
      "mse_ratio_typ_over_marginal",
      detail::mse_against(typ, phi) / detail::mse_against(marg, phi));
  rep.config_echo = detail::echo_config(cfg);
  return rep;
}

namespace detail {

inline ModelSpec spec_for(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ModelId::lecam: return make_lecam(cfg.n, cfg.lecam_alpha);
    case ModelId::neyman_scott: return make_neyman_scott(cfg.n);
    case ModelId::stein: return make_stein(cfg.n);
  }
  throw std::logic_error("spec_for: unreachable");
}

inline ParamPoint true_point(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ModelId::lecam: return lecam_point(cfg.lecam_mu, cfg.lecam_sigma2);
    case ModelId::neyman_scott: return ns_point(cfg.ns_sigma2);
    case ModelId::stein: return stein_point(cfg.stein_phi);
  }
  throw std::logic_error("true_point: unreachable");
}

// Fixed absolute fit grids for the calibration experiments, so the deviance
// statistic does not depend on the observed data through the grid.
inline std::vector<GridSpec> calibration_grid(const ExperimentConfig& cfg) {
  if (!cfg.grid.empty()) return cfg.grid;
  switch (cfg.model) {
    case ModelId::lecam:
      return {{cfg.lecam_mu - 4.0, cfg.lecam_mu + 4.0, 81, false},
              {-25.0, 5.0, 41, true}};
    case ModelId::neyman_scott:
      return {{0.025, 4.0, 400, false}};
    case ModelId::stein:
      return {{0.0, 40.0, 400, false}};
  }
  throw std::logic_error("calibration_grid: unreachable");
}

// Draw one dataset under the configured truth; Neyman-Scott redraws its
// nuisance means every replication.
inline Dataset draw_data(const ExperimentConfig& cfg, RngStream& root) {
  switch (cfg.model) {
    case ModelId::lecam: {
      RngStream s = root.derive(0);
      return lecam::sample(cfg.n, cfg.lecam_mu, cfg.lecam_sigma2,
                           cfg.lecam_alpha, s);
    }
    case ModelId::neyman_scott: {
      RngStream xi_stream = root.derive(0);
      RngStream data_stream = root.derive(1);
      std::vector<double> xi(cfg.n);
      for (auto& x : xi) x = xi_stream.next_normal();
      return ns::sample(xi, cfg.ns_sigma2, data_stream);
    }
    case ModelId::stein: {
      RngStream s = root.derive(0);
      return stein::sample(static_cast<int>(cfg.n), cfg.stein_phi, s);
    }
  }
  throw std::logic_error("draw_data: unreachable");
}

}  // namespace detail

// --- calibration of the typicality contour -------------------------------------

// Empirical law of tau_X(theta_true) over outer replications, with the
// exceedance table at the requested alpha levels.
inline SimulationReport run_validity(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.lambdas.empty()) cfg.lambdas = {0.0};
  cfg.check();
  const double lambda = cfg.lambdas.front();

  SimulationReport rep;
  rep.experiment_id = "validity";
  rep.columns = {"rep", "tau"};
  rep.rows.assign(cfg.replications, std::vector<double>(2, 0.0));

  const ModelSpec spec = detail::spec_for(cfg);
  const ParamPoint truth = detail::true_point(cfg);
  ObjectiveConfig oc;
  oc.lambda = lambda;
  oc.optimizer = cfg.optimizer;
  oc.grid = detail::calibration_grid(cfg);

  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RngStream root(cfg.master_seed, r);
    const Dataset x = detail::draw_data(cfg, root);
    const auto v = contour_at_detail(spec, x, truth, oc, cfg.mc_samples,
                                     root.derive(1000), 1);
    rep.rows[r][0] = static_cast<double>(r);
    rep.rows[r][1] = v.tau;
  });

  for (double a : cfg.alpha_levels) {
    std::size_t exceed = 0;
    for (const auto& row : rep.rows)
      if (row[1] <= a) ++exceed;
    const double rate = double(exceed) / double(cfg.replications);
    const double bound =
        a + 3.0 * std::sqrt(a * (1.0 - a) / double(cfg.replications));
    std::ostringstream key;
    key << "exceed_alpha_" << a;
    rep.summary.emplace_back(key.str(), rate);
    std::ostringstream bkey;
    bkey << "bound_alpha_" << a;
    rep.summary.emplace_back(bkey.str(), bound);
  }
  rep.config_echo = detail::echo_config(cfg);
  return rep;
}

// Coverage of the level-set confidence region: the region contains the truth
// exactly when tau_X(theta_true) >= alpha (Proposition-2 level sets), so one
// contour evaluation per replication yields every requested level at once.
inline SimulationReport run_coverage(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.lambdas.empty()) cfg.lambdas = {10.0};
  cfg.check();
  const double lambda = cfg.lambdas.front();

  SimulationReport rep;
  rep.experiment_id = "coverage";
  rep.columns = {"rep", "tau"};
  for (double a : cfg.alpha_levels) {
    std::ostringstream key;
    key << "contains_alpha_" << a;
    rep.columns.push_back(key.str());
  }
  rep.rows.assign(cfg.replications,
                  std::vector<double>(rep.columns.size(), 0.0));

  const ModelSpec spec = detail::spec_for(cfg);
  const ParamPoint truth = detail::true_point(cfg);
  ObjectiveConfig oc;
  oc.lambda = lambda;
  oc.optimizer = cfg.optimizer;
  oc.grid = detail::calibration_grid(cfg);

  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RngStream root(cfg.master_seed, r);
    const Dataset x = detail::draw_data(cfg, root);
    const auto v = contour_at_detail(spec, x, truth, oc, cfg.mc_samples,
                                     root.derive(1000), 1);
    auto& row = rep.rows[r];
    row[0] = static_cast<double>(r);
    row[1] = v.tau;
    for (std::size_t ai = 0; ai < cfg.alpha_levels.size(); ++ai)
      row[2 + ai] = v.tau >= cfg.alpha_levels[ai] ? 1.0 : 0.0;
  });

  for (std::size_t ai = 0; ai < cfg.alpha_levels.size(); ++ai) {
    std::size_t hits = 0;
    for (const auto& row : rep.rows) hits += row[2 + ai] > 0.5 ? 1 : 0;
    const double cov = double(hits) / double(cfg.replications);
    std::ostringstream key;
    key << "coverage_alpha_" << cfg.alpha_levels[ai];
    rep.summary.emplace_back(key.str(), cov);
    std::ostringstream se;
    se << "coverage_se_alpha_" << cfg.alpha_levels[ai];
    rep.summary.emplace_back(
        se.str(), std::sqrt(cov * (1.0 - cov) / double(cfg.replications)));
  }
  rep.config_echo = detail::echo_config(cfg);
  return rep;
}

// --- figure data regeneration ----------------------------------------------------

namespace detail {

inline std::string figure_meta(const ExperimentConfig& cfg,
                               const std::string& figure_id) {
  nlohmann::ordered_json j = echo_config(cfg);
  j["figure_id"] = figure_id;
  return "# " + j.dump() + "\n";
}

inline void write_figure_sidecar(const ExperimentConfig& cfg,
                                 const std::string& figure_id,
                                 const std::string& base) {
  nlohmann::ordered_json j = echo_config(cfg);
  j["figure_id"] = figure_id;
  write_text_file(base + ".json", j.dump(2) + "\n");
}

}  // namespace detail

// CSV grids of the quantities behind each figure, at the stated paper
// configurations (n=100; Le Cam theta=(1,2); Neyman-Scott Sigma=1; Stein
// Phi=4*sqrt(10)).  Returns the written file paths.
inline std::vector<std::string> reproduce(const std::string& figure_id,
                                          const ExperimentConfig& cfg_in,
                                          const std::string& out_dir) {
  if (!figure_ids().count(figure_id))
    throw std::invalid_argument("unknown figure_id: " + figure_id);
  ExperimentConfig cfg = cfg_in;
  cfg.experiment_id = figure_id;

  const std::string base =
      out_dir + "/" + figure_id + "_" + std::to_string(cfg.master_seed);
  std::ostringstream out;
  out << detail::figure_meta(cfg, figure_id);

  if (figure_id == "lik_surface" || figure_id == "ks_surface" ||
      figure_id == "ks_profiles" || figure_id == "obj_profiles") {
    cfg.model = ModelId::lecam;
    if (cfg.lambdas.empty()) cfg.lambdas = {0.0, 0.5, 1.0, 2.0};
    const ModelSpec spec = make_lecam(cfg.n, cfg.lecam_alpha);
    RngStream root(cfg.master_seed, 0);
    RngStream data_stream = root.derive(0);
    const Dataset x = lecam::sample(cfg.n, cfg.lecam_mu, cfg.lecam_sigma2,
                                    cfg.lecam_alpha, data_stream);
    const SuffStats st = prepare(spec, x);
    const std::vector<GridSpec> grid =
        cfg.grid.empty() ? default_grid(spec, st) : cfg.grid;
    const GridSpec& gm = grid[0];
    const GridSpec& gs = grid[1];
    Workspace ws;

    if (figure_id == "lik_surface" || figure_id == "ks_surface") {
      const bool lik = figure_id == "lik_surface";
      out << "mu,log_sigma2," << (lik ? "loglik" : "log_pvalue") << "\n";
      for (int i = 0; i < gm.points; ++i) {
        const double mu = gm.at(i);
        for (int j = 0; j < gs.points; ++j) {
          const double ls2 = gs.at(j);
          const double v =
              lik ? lecam::loglik(x, mu, std::exp(ls2), cfg.lecam_alpha)
                  : lecam::gof_pvalue(x, mu, std::exp(ls2), cfg.lecam_alpha,
                                      ws.buf)
                        .log_value;
          out << format_double(mu) << "," << format_double(ls2) << ","
              << format_double(v) << "\n";
        }
      }
    } else if (figure_id == "ks_profiles") {
      out << "axis,coord,max_log_pvalue\n";
      std::vector<std::vector<double>> lp(
          gm.points, std::vector<double>(gs.points, 0.0));
      for (int i = 0; i < gm.points; ++i)
        for (int j = 0; j < gs.points; ++j)
          lp[i][j] = lecam::gof_pvalue(x, gm.at(i), std::exp(gs.at(j)),
                                       cfg.lecam_alpha, ws.buf)
                         .log_value;
      for (int i = 0; i < gm.points; ++i) {
        double best = kNegInf;
        for (int j = 0; j < gs.points; ++j) best = std::max(best, lp[i][j]);
        out << "mu," << format_double(gm.at(i)) << "," << format_double(best)
            << "\n";
      }
      for (int j = 0; j < gs.points; ++j) {
        double best = kNegInf;
        for (int i = 0; i < gm.points; ++i) best = std::max(best, lp[i][j]);
        out << "log_sigma2," << format_double(gs.at(j)) << ","
            << format_double(best) << "\n";
      }
    } else {  // obj_profiles
      out << "axis,coord,lambda,objective\n";
      for (double lambda : cfg.lambdas) {
        ObjectiveConfig oc;
        oc.lambda = lambda;
        std::vector<std::vector<double>> surf(
            gm.points, std::vector<double>(gs.points, 0.0));
        for (int i = 0; i < gm.points; ++i)
          for (int j = 0; j < gs.points; ++j)
            surf[i][j] = objective(spec, x, st,
                                   lecam_point(gm.at(i), std::exp(gs.at(j))),
                                   oc, ws);
        for (int i = 0; i < gm.points; ++i) {
          double best = kNegInf;
          for (int j = 0; j < gs.points; ++j) best = std::max(best, surf[i][j]);
          out << "mu," << format_double(gm.at(i)) << ","
              << format_double(lambda) << "," << format_double(best) << "\n";
        }
        for (int j = 0; j < gs.points; ++j) {
          double best = kNegInf;
          for (int i = 0; i < gm.points; ++i) best = std::max(best, surf[i][j]);
          out << "log_sigma2," << format_double(gs.at(j)) << ","
              << format_double(lambda) << "," << format_double(best) << "\n";
        }
      }
    }
  } else if (figure_id == "ns_objective") {
    cfg.model = ModelId::neyman_scott;
    if (cfg.lambdas.empty()) cfg.lambdas = {0.0, 1.0, 2.0, 4.0, 8.0};
    const ModelSpec spec = make_neyman_scott(cfg.n);
    RngStream root(cfg.master_seed, 0);
    RngStream xi_stream = root.derive(0);
    RngStream data_stream = root.derive(1);
    std::vector<double> xi(cfg.n);
    for (auto& v : xi) v = xi_stream.next_normal();
    const Dataset x = ns::sample(xi, cfg.ns_sigma2, data_stream);
    const SuffStats st = prepare(spec, x);
    const std::vector<GridSpec> grid =
        cfg.grid.empty() ? default_grid(spec, st) : cfg.grid;
    Workspace ws;
    out << "sigma2,lambda,objective\n";
    for (double lambda : cfg.lambdas) {
      ObjectiveConfig oc;
      oc.lambda = lambda;
      for (int i = 0; i < grid[0].points; ++i) {
        const double s2 = grid[0].at(i);
        out << format_double(s2) << "," << format_double(lambda) << ","
            << format_double(objective(spec, x, st, ns_point(s2), oc, ws))
            << "\n";
      }
    }
  } else if (figure_id == "stein_objective") {
    cfg.model = ModelId::stein;
    if (cfg.lambdas.empty()) cfg.lambdas = {0.0, 5.0, 10.0};
    const ModelSpec spec = make_stein(cfg.n);
    RngStream root(cfg.master_seed, 0);
    RngStream data_stream = root.derive(0);
    const Dataset x =
        stein::sample(static_cast<int>(cfg.n), cfg.stein_phi, data_stream);
    const SuffStats st = prepare(spec, x);
    const std::vector<GridSpec> grid =
        cfg.grid.empty() ? default_grid(spec, st) : cfg.grid;
    Workspace ws;
    out << "curve,lambda,phi,value\n";
    for (double lambda : cfg.lambdas) {
      ObjectiveConfig oc;
      oc.lambda = lambda;
      for (int i = 0; i < grid[0].points; ++i) {
        const double phi = grid[0].at(i);
        out << "objective," << format_double(lambda) << ","
            << format_double(phi) << ","
            << format_double(objective(spec, x, st, stein_point(phi), oc, ws))
            << "\n";
      }
    }
    for (int i = 0; i < grid[0].points; ++i) {
      const double phi = grid[0].at(i);
      out << "marginal,nan," << format_double(phi) << ","
          << format_double(
                 stein::marginal_loglik(st.s, phi, static_cast<int>(cfg.n)))
          << "\n";
    }
  } else {  // stein_contour
    cfg.model = ModelId::stein;
    if (cfg.lambdas.empty()) cfg.lambdas = {0.0, 5.0, 10.0};
    const ModelSpec spec = make_stein(cfg.n);
    RngStream root(cfg.master_seed, 0);
    RngStream data_stream = root.derive(0);
    const Dataset x =
        stein::sample(static_cast<int>(cfg.n), cfg.stein_phi, data_stream);
    const SuffStats st = prepare(spec, x);
    GridSpec pg{std::max(0.0, st.r - 9.0), st.r + 3.0, 121, false};
    if (!cfg.grid.empty()) pg = cfg.grid[0];
    out << "curve,lambda,phi,tau\n";
    for (double lambda : cfg.lambdas) {
      ObjectiveConfig oc;
      oc.lambda = lambda;
      oc.grid = {{0.0, 2.0 * st.r, 400, false}};
      for (int i = 0; i < pg.points; ++i) {
        const double phi = pg.at(i);
        out << "typicality," << format_double(lambda) << ","
            << format_double(phi) << ","
            << format_double(stein_exact_contour(st.s, phi,
                                                 static_cast<int>(cfg.n), oc))
            << "\n";
      }
    }
    const GridSpec mg{0.0, 2.0 * st.r, 400, false};
    for (int i = 0; i < pg.points; ++i) {
      const double phi = pg.at(i);
      out << "marginal,nan," << format_double(phi) << ","
          << format_double(stein_marginal_contour(st.s, phi,
                                                  static_cast<int>(cfg.n), mg))
          << "\n";
    }
  }

  write_text_file(base + ".csv", out.str());
  detail::write_figure_sidecar(cfg, figure_id, base);
  return {base + ".csv", base + ".json"};
}

// --- report serialization -------------------------------------------------------

inline std::string report_csv(const SimulationReport& rep) {
  std::ostringstream out;
  out << "# " << rep.config_echo.dump() << "\n";
  for (std::size_t c = 0; c < rep.columns.size(); ++c)
    out << rep.columns[c] << (c + 1 < rep.columns.size() ? "," : "\n");
  for (const auto& row : rep.rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
  return out.str();
}

inline nlohmann::ordered_json report_json(const SimulationReport& rep) {
  nlohmann::ordered_json j;
  j["experiment_id"] = rep.experiment_id;
  j["config"] = rep.config_echo;
  nlohmann::ordered_json s;
  for (const auto& [k, v] : rep.summary) s[k] = v;
  j["summary"] = s;
  return j;
}

inline std::vector<std::string> write_report(const SimulationReport& rep,
                                             const std::string& out_dir) {
  const std::string base =
      out_dir + "/" + rep.experiment_id + "_" +
      std::to_string(rep.config_echo["master_seed"].get<std::uint64_t>());
  write_text_file(base + ".csv", report_csv(rep));
  write_text_file(base + ".json", report_json(rep).dump(2) + "\n");
  return {base + ".csv", base + ".json"};
}

// Experiment dispatch used by the CLI `simulate` subcommand.
inline std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                               const std::string& out_dir) {
  if (!experiment_ids().count(cfg.experiment_id))
    throw std::invalid_argument("unknown experiment_id: " + cfg.experiment_id);
  if (cfg.experiment_id == "ns_bias")
    return write_report(run_ns_bias(cfg), out_dir);
  if (cfg.experiment_id == "stein_mse")
    return write_report(run_stein_mse(cfg), out_dir);
  if (cfg.experiment_id == "validity")
    return write_report(run_validity(cfg), out_dir);
  if (cfg.experiment_id == "coverage")
    return write_report(run_coverage(cfg), out_dir);
  if (cfg.experiment_id == "lecam_surfaces") {
    auto a = reproduce("lik_surface", cfg, out_dir);
    auto b = reproduce("ks_surface", cfg, out_dir);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  if (cfg.experiment_id == "lecam_profiles") {
    auto a = reproduce("ks_profiles", cfg, out_dir);
    auto b = reproduce("obj_profiles", cfg, out_dir);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  return reproduce(cfg.experiment_id, cfg, out_dir);
}

}  // namespace typik

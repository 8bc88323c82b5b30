// Command-line front end: data ingestion, configuration, and dispatch to
// fit / contour / confidence / simulate / reproduce.
//
// Exit status: 0 success, 1 usage, 2 file I/O failure, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "typik/harness.hpp"

namespace {

using namespace typik;

struct CliInvocation {
  std::string subcommand;
  std::string model = "stein";
  std::string data_path;
  bool csv_header = false;
  double lambda = 0.0;
  std::size_t mc_samples = 1000;
  std::uint64_t seed = 42;
  std::vector<double> alphas;
  std::vector<std::string> grid_args;      // subject grid of the subcommand
  std::vector<std::string> fit_grid_args;  // optimizer grid override
  std::string output;
  std::string format = "csv";
  int threads = 1;
  std::string gof = "default";
  std::string optimizer = "grid_then_simplex";
  // synthetic-data block
  std::vector<double> true_theta;
  std::size_t n = 100;
  double mix_alpha = 1e-50;
  // simulate / reproduce
  std::string experiment;
  std::string figure;
  std::size_t reps = 0;
  std::vector<double> lambdas;
};

std::uint64_t env_seed_fallback() {
  if (const char* s = std::getenv("TYPIK_SEED")) {
    try {
      return static_cast<std::uint64_t>(std::stoull(s));
    } catch (...) {
      throw CLI::ValidationError("TYPIK_SEED", "not a valid unsigned integer");
    }
  }
  return 42;
}

GridSpec parse_grid_arg(const std::string& s) {
  GridSpec g;
  const auto c1 = s.find(':');
  const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw CLI::ValidationError("--grid", "expected LO:HI:POINTS, got " + s);
  try {
    g.lo = std::stod(s.substr(0, c1));
    g.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    g.points = std::stoi(s.substr(c2 + 1));
  } catch (...) {
    throw CLI::ValidationError("--grid", "expected LO:HI:POINTS, got " + s);
  }
  g.check();
  return g;
}

ModelId parse_model(const std::string& m) {
  if (m == "lecam") return ModelId::lecam;
  if (m == "neyman_scott") return ModelId::neyman_scott;
  if (m == "stein") return ModelId::stein;
  throw CLI::ValidationError("--model", "unknown model: " + m);
}

DataShape shape_for(ModelId id) {
  switch (id) {
    case ModelId::lecam: return DataShape::scalar_sample;
    case ModelId::neyman_scott: return DataShape::paired_sample;
    case ModelId::stein: return DataShape::vector_observation;
  }
  throw std::logic_error("shape_for");
}

ModelSpec spec_from(const CliInvocation& inv, const Dataset& x) {
  const ModelId id = parse_model(inv.model);
  const NsGofKind gof =
      inv.gof == "ks-full" ? NsGofKind::ks_full : NsGofKind::chisq;
  switch (id) {
    case ModelId::lecam: return make_lecam(x.n, inv.mix_alpha);
    case ModelId::neyman_scott: return make_neyman_scott(x.n, gof);
    case ModelId::stein: return make_stein(x.n);
  }
  throw std::logic_error("spec_from");
}

// Data from --data, or synthesized from the (model, true theta, n, seed)
// block when no path is given.
Dataset load_or_synthesize(const CliInvocation& inv) {
  const ModelId id = parse_model(inv.model);
  if (!inv.data_path.empty())
    return read_dataset_csv(inv.data_path, shape_for(id), inv.csv_header);
  if (inv.true_theta.empty())
    throw CLI::ValidationError(
        "--data", "either --data or a synthetic block (--true-theta, --n) is "
                  "required");
  RngStream root(inv.seed, 0);
  switch (id) {
    case ModelId::lecam: {
      if (inv.true_theta.size() != 2)
        throw CLI::ValidationError("--true-theta", "lecam needs mu,sigma2");
      RngStream s = root.derive(0);
      return lecam::sample(inv.n, inv.true_theta[0], inv.true_theta[1],
                           inv.mix_alpha, s);
    }
    case ModelId::neyman_scott: {
      if (inv.true_theta.size() != 1)
        throw CLI::ValidationError("--true-theta", "neyman_scott needs sigma2");
      RngStream xi_stream = root.derive(0);
      RngStream data_stream = root.derive(1);
      std::vector<double> xi(inv.n);
      for (auto& v : xi) v = xi_stream.next_normal();
      return ns::sample(xi, inv.true_theta[0], data_stream);
    }
    case ModelId::stein: {
      if (inv.true_theta.size() != 1)
        throw CLI::ValidationError("--true-theta", "stein needs phi");
      RngStream s = root.derive(0);
      return stein::sample(static_cast<int>(inv.n), inv.true_theta[0], s);
    }
  }
  throw std::logic_error("load_or_synthesize");
}

ObjectiveConfig objective_config(const CliInvocation& inv) {
  ObjectiveConfig oc;
  oc.lambda = inv.lambda;
  oc.optimizer = inv.optimizer == "grid" ? OptimizerKind::grid
                                         : OptimizerKind::grid_then_simplex;
  for (const auto& s : inv.fit_grid_args) oc.grid.push_back(parse_grid_arg(s));
  oc.check();
  return oc;
}

// Default contour evaluation grid per model.
std::vector<ParamPoint> contour_points(const CliInvocation& inv,
                                       const ModelSpec& spec,
                                       const SuffStats& st) {
  std::vector<GridSpec> gs;
  for (const auto& s : inv.grid_args) gs.push_back(parse_grid_arg(s));
  if (gs.empty()) {
    switch (spec.id) {
      case ModelId::lecam:
        gs = {{st.mean - 1.5, st.mean + 1.5, 21, false}, {-25.0, 5.0, 11, true}};
        break;
      case ModelId::neyman_scott:
        gs = {{0.1 * st.sigma2_hat, 4.0 * st.sigma2_hat, 101, false}};
        break;
      case ModelId::stein:
        gs = {{std::max(0.0, st.r - 9.0), st.r + 3.0, 61, false}};
        break;
    }
  }
  std::vector<ParamPoint> pts;
  if (spec.id == ModelId::lecam) {
    if (gs.size() != 2)
      throw CLI::ValidationError("--grid", "lecam needs two --grid arguments");
    for (int i = 0; i < gs[0].points; ++i)
      for (int j = 0; j < gs[1].points; ++j)
        pts.push_back(lecam_point(gs[0].at(i), std::exp(gs[1].at(j))));
  } else {
    if (gs.size() != 1)
      throw CLI::ValidationError("--grid", "one --grid argument expected");
    for (int i = 0; i < gs[0].points; ++i)
      pts.push_back(spec.id == ModelId::neyman_scott
                        ? ns_point(gs[0].at(i))
                        : stein_point(gs[0].at(i)));
  }
  return pts;
}

nlohmann::ordered_json invocation_meta(const CliInvocation& inv) {
  nlohmann::ordered_json j;
  j["model"] = inv.model;
  j["lambda"] = inv.lambda;
  j["M"] = inv.mc_samples;
  j["seed"] = inv.seed;
  j["version"] = kVersionTag;
  if (!inv.data_path.empty()) j["data"] = inv.data_path;
  if (!inv.true_theta.empty()) {
    j["true_theta"] = inv.true_theta;
    j["n"] = inv.n;
  }
  return j;
}

int run_fit(const CliInvocation& inv) {
  const Dataset x = load_or_synthesize(inv);
  const ModelSpec spec = spec_from(inv, x);
  const SuffStats st = prepare(spec, x);
  const ObjectiveConfig oc = objective_config(inv);
  Workspace ws;
  const FitResult fit = maximize(spec, x, st, oc, ws);

  std::cout << "model=" << inv.model << " lambda=" << format_double(inv.lambda)
            << " theta_check:";
  for (std::size_t i = 0; i < fit.theta_check.coords.size(); ++i)
    std::cout << " " << fit.theta_check.names[i] << "="
              << format_double(fit.theta_check.coords[i]);
  std::cout << " objective=" << format_double(fit.objective_value)
            << " evaluations=" << fit.evaluations << "\n";

  if (!inv.output.empty()) {
    nlohmann::ordered_json j = invocation_meta(inv);
    nlohmann::ordered_json tc;
    for (std::size_t i = 0; i < fit.theta_check.coords.size(); ++i)
      tc[fit.theta_check.names[i]] = fit.theta_check.coords[i];
    j["theta_check"] = tc;
    j["objective_value"] = fit.objective_value;
    j["evaluations"] = fit.evaluations;
    if (inv.format == "json") {
      write_text_file(inv.output, j.dump(2) + "\n");
    } else {
      std::ostringstream out;
      out << "# " << j.dump() << "\n";
      for (std::size_t i = 0; i < fit.theta_check.names.size(); ++i)
        out << fit.theta_check.names[i] << ",";
      out << "objective\n";
      for (double c : fit.theta_check.coords) out << format_double(c) << ",";
      out << format_double(fit.objective_value) << "\n";
      write_text_file(inv.output, out.str());
    }
  }
  return 0;
}

ContourGrid compute_contour(const CliInvocation& inv, const Dataset& x) {
  const ModelSpec spec = spec_from(inv, x);
  const SuffStats st = prepare(spec, x);
  const ObjectiveConfig oc = objective_config(inv);
  const auto pts = contour_points(inv, spec, st);
  return contour_grid(spec, x, pts, oc, inv.mc_samples, inv.seed, inv.threads);
}

int run_contour(const CliInvocation& inv) {
  const Dataset x = load_or_synthesize(inv);
  const ContourGrid cg = compute_contour(inv, x);
  const std::string out = inv.output.empty() ? "contour.csv" : inv.output;
  write_contour(cg, out);
  std::cout << "wrote " << out << " (" << cg.grid.size() << " points, M="
            << cg.mc_samples << ", warnings=" << cg.warnings << ")\n";
  return 0;
}

int run_confidence(const CliInvocation& inv) {
  const Dataset x = load_or_synthesize(inv);
  const ContourGrid cg = compute_contour(inv, x);
  const std::vector<double> alphas =
      inv.alphas.empty() ? std::vector<double>{0.05} : inv.alphas;

  nlohmann::ordered_json j = invocation_meta(inv);
  nlohmann::ordered_json regions = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "# " << invocation_meta(inv).dump() << "\n";
  csv << "alpha,interval_lo,interval_hi\n";
  for (double a : alphas) {
    const ConfidenceRegion region = confidence_region(cg, a);
    nlohmann::ordered_json rj;
    rj["alpha"] = a;
    rj["contains_estimator"] = region.contains_estimator;
    nlohmann::ordered_json iv = nlohmann::ordered_json::array();
    for (const auto& [lo, hi] : region.intervals) {
      iv.push_back({lo, hi});
      csv << format_double(a) << "," << format_double(lo) << ","
          << format_double(hi) << "\n";
      std::cout << "alpha=" << format_double(a) << " interval=["
                << format_double(lo) << ", " << format_double(hi) << "]\n";
    }
    rj["intervals"] = iv;
    regions.push_back(rj);
  }
  j["regions"] = regions;

  if (!inv.output.empty()) {
    if (inv.format == "json")
      write_text_file(inv.output, j.dump(2) + "\n");
    else
      write_text_file(inv.output, csv.str());
  }
  return 0;
}

ExperimentConfig experiment_config(const CliInvocation& inv) {
  ExperimentConfig cfg;
  cfg.experiment_id = inv.experiment.empty() ? inv.figure : inv.experiment;
  cfg.model = parse_model(inv.model);
  cfg.n = inv.n;
  cfg.master_seed = inv.seed;
  cfg.mc_samples = inv.mc_samples;
  cfg.threads = inv.threads;
  if (inv.reps > 0) cfg.replications = inv.reps;
  if (!inv.lambdas.empty()) cfg.lambdas = inv.lambdas;
  for (const auto& s : inv.fit_grid_args) cfg.grid.push_back(parse_grid_arg(s));
  if (!inv.true_theta.empty()) {
    switch (cfg.model) {
      case ModelId::lecam:
        if (inv.true_theta.size() != 2)
          throw CLI::ValidationError("--true-theta", "lecam needs mu,sigma2");
        cfg.lecam_mu = inv.true_theta[0];
        cfg.lecam_sigma2 = inv.true_theta[1];
        break;
      case ModelId::neyman_scott: cfg.ns_sigma2 = inv.true_theta[0]; break;
      case ModelId::stein: cfg.stein_phi = inv.true_theta[0]; break;
    }
  }
  cfg.lecam_alpha = inv.mix_alpha;
  if (!inv.alphas.empty()) cfg.alpha_levels = inv.alphas;
  return cfg;
}

int run_simulate(const CliInvocation& inv) {
  ExperimentConfig cfg = experiment_config(inv);
  const std::string out_dir = inv.output.empty() ? "." : inv.output;
  const auto files = run_experiment(cfg, out_dir);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return 0;
}

int run_reproduce(const CliInvocation& inv) {
  ExperimentConfig cfg = experiment_config(inv);
  const std::string out_dir = inv.output.empty() ? "." : inv.output;
  const auto files = reproduce(inv.figure, cfg, out_dir);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return 0;
}

void add_common(CLI::App* cmd, CliInvocation& inv, bool with_lambda = true) {
  cmd->add_option("--model", inv.model, "Model: lecam|neyman_scott|stein")
      ->check(CLI::IsMember({"lecam", "neyman_scott", "stein"}));
  cmd->add_option("--seed", inv.seed, "Master seed (fallback: TYPIK_SEED)");
  cmd->add_option("--threads", inv.threads, "Worker thread cap");
  cmd->add_option("--output", inv.output, "Output path");
  cmd->add_option("--format", inv.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_lambda)
    cmd->add_option("--lambda", inv.lambda, "Penalty weight (>= 0)")
        ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gof", inv.gof,
                  "Neyman-Scott GOF route: default|ks-full")
      ->check(CLI::IsMember({"default", "ks-full"}));
  cmd->add_option("--mix-alpha", inv.mix_alpha, "Le Cam mixture weight");
}

void add_data_block(CLI::App* cmd, CliInvocation& inv) {
  cmd->add_option("--data", inv.data_path, "Input CSV path");
  cmd->add_flag("--csv-header", inv.csv_header, "First CSV row is a header");
  cmd->add_option("--true-theta", inv.true_theta,
                  "Synthetic truth (lecam: mu,sigma2; neyman_scott: sigma2; "
                  "stein: phi)")
      ->delimiter(',');
  cmd->add_option("--n", inv.n, "Synthetic sample size / dimension");
}

}  // namespace

int main(int argc, char** argv) {
  CliInvocation inv;
  CLI::App app{"Typicality-regularized estimation and contour UQ"};
  app.require_subcommand(1);

  try {
    inv.seed = env_seed_fallback();
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  auto* fit = app.add_subcommand("fit", "Maximum typicality fit");
  add_common(fit, inv);
  add_data_block(fit, inv);
  fit->add_option("--grid", inv.fit_grid_args,
                  "Optimizer grid LO:HI:POINTS (repeat per coordinate; lecam "
                  "second coordinate is log sigma2)");
  fit->add_option("--optimizer", inv.optimizer, "grid|grid_then_simplex")
      ->check(CLI::IsMember({"grid", "grid_then_simplex"}));

  auto* contour = app.add_subcommand("contour", "Typicality contour grid");
  add_common(contour, inv);
  add_data_block(contour, inv);
  contour->add_option("--mc-samples", inv.mc_samples,
                      "Monte Carlo replicates per grid point");
  contour->add_option("--grid", inv.grid_args,
                      "Contour grid LO:HI:POINTS (repeat per coordinate)");
  contour->add_option("--fit-grid", inv.fit_grid_args,
                      "Optimizer grid override LO:HI:POINTS");
  contour->add_option("--optimizer", inv.optimizer, "grid|grid_then_simplex")
      ->check(CLI::IsMember({"grid", "grid_then_simplex"}));

  auto* confidence =
      app.add_subcommand("confidence", "Level-set confidence region");
  add_common(confidence, inv);
  add_data_block(confidence, inv);
  confidence->add_option("--mc-samples", inv.mc_samples,
                         "Monte Carlo replicates per grid point");
  confidence->add_option("--alpha", inv.alphas, "Level(s) in (0,1)")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  confidence->add_option("--grid", inv.grid_args,
                         "Contour grid LO:HI:POINTS (repeat per coordinate)");
  confidence->add_option("--fit-grid", inv.fit_grid_args,
                         "Optimizer grid override LO:HI:POINTS");
  confidence->add_option("--optimizer", inv.optimizer,
                         "grid|grid_then_simplex")
      ->check(CLI::IsMember({"grid", "grid_then_simplex"}));

  auto* simulate = app.add_subcommand("simulate", "Replication experiment");
  add_common(simulate, inv);
  simulate
      ->add_option("--experiment", inv.experiment,
                   "Experiment id (ns_bias, stein_mse, validity, coverage, "
                   "lecam_surfaces, lecam_profiles, ns_objective, "
                   "stein_objective, stein_contour)")
      ->required();
  simulate->add_option("--reps", inv.reps, "Replication count override");
  simulate->add_option("--lambdas", inv.lambdas, "Lambda sweep")
      ->delimiter(',');
  simulate->add_option("--mc-samples", inv.mc_samples,
                       "Monte Carlo replicates (validity/coverage)");
  simulate->add_option("--alpha", inv.alphas, "Alpha levels")->delimiter(',');
  simulate->add_option("--true-theta", inv.true_theta, "True parameter")
      ->delimiter(',');
  simulate->add_option("--n", inv.n, "Sample size / dimension");
  simulate->add_option("--fit-grid", inv.fit_grid_args,
                       "Optimizer grid override LO:HI:POINTS");
  simulate->add_option("--optimizer", inv.optimizer, "grid|grid_then_simplex")
      ->check(CLI::IsMember({"grid", "grid_then_simplex"}));

  auto* repro = app.add_subcommand("reproduce", "Figure data regeneration");
  add_common(repro, inv);
  repro
      ->add_option("figure", inv.figure,
                   "Figure id (lik_surface, ks_surface, ks_profiles, "
                   "obj_profiles, ns_objective, stein_objective, "
                   "stein_contour)")
      ->required();
  repro->add_option("--lambdas", inv.lambdas, "Lambda list")->delimiter(',');
  repro->add_option("--true-theta", inv.true_theta, "True parameter")
      ->delimiter(',');
  repro->add_option("--n", inv.n, "Sample size / dimension");
  repro->add_option("--grid", inv.grid_args, "Figure grid LO:HI:POINTS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (fit->parsed()) return run_fit(inv);
    if (contour->parsed()) return run_contour(inv);
    if (confidence->parsed()) return run_confidence(inv);
    if (simulate->parsed()) {
      inv.figure = inv.experiment;  // shared dispatch for figure experiments
      return run_simulate(inv);
    }
    if (repro->parsed()) {
      if (!figure_ids().count(inv.figure))
        throw CLI::ValidationError("figure", "unknown figure id: " + inv.figure);
      return run_reproduce(inv);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const OptimizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

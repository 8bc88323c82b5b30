#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "typik/harness.hpp"

using namespace typik;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("typik_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

// parse a figure CSV (skips '#' lines and the header)
std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("ns_bias report: bias shrinks along the lambda sweep", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment_id = "ns_bias";
  cfg.model = ModelId::neyman_scott;
  cfg.replications = 100;
  cfg.lambdas = {0.0, 2.0, 8.0};
  cfg.master_seed = 314;
  const SimulationReport rep = run_ns_bias(cfg);

  REQUIRE(rep.rows.size() == 100);
  const double mean_mle = rep.summary_value("mean_sigma2_mle");
  const double se = rep.summary_value("se_sigma2_mle");
  CHECK(std::fabs(mean_mle - 0.5) <= 3.0 * se);

  const double b0 = std::fabs(rep.summary_value("bias_l0"));
  const double b2 = std::fabs(rep.summary_value("bias_l2"));
  const double b8 = std::fabs(rep.summary_value("bias_l8"));
  CHECK(b2 < b0);
  CHECK(b8 < b2);
}

TEST_CASE("ns_bias summaries recompute from the records", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment_id = "ns_bias";
  cfg.model = ModelId::neyman_scott;
  cfg.replications = 40;
  cfg.lambdas = {0.0, 4.0};
  cfg.master_seed = 7;
  const SimulationReport rep = run_ns_bias(cfg);

  double mean = 0.0;
  for (const auto& row : rep.rows) mean += row[1];
  mean /= double(rep.rows.size());
  CHECK(std::fabs(mean - rep.summary_value("mean_sigma2_mle")) <= 1e-12);

  double mean4 = 0.0;
  for (const auto& row : rep.rows) mean4 += row[3];
  mean4 /= double(rep.rows.size());
  CHECK(std::fabs(mean4 - rep.summary_value("mean_sigma2_check_l4")) <= 1e-12);
  CHECK(std::fabs((mean4 - 1.0) - rep.summary_value("bias_l4")) <= 1e-12);
}

TEST_CASE("reports are bit-reproducible", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment_id = "ns_bias";
  cfg.model = ModelId::neyman_scott;
  cfg.replications = 25;
  cfg.lambdas = {0.0, 1.0};
  cfg.master_seed = 99;
  const std::string a = report_csv(run_ns_bias(cfg));
  cfg.threads = 3;  // worker count must not matter
  const std::string b = report_csv(run_ns_bias(cfg));
  CHECK(a == b);
}

TEST_CASE("stein_mse report orders the estimators", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment_id = "stein_mse";
  cfg.model = ModelId::stein;
  cfg.replications = 60;
  cfg.lambdas = {10.0};
  cfg.master_seed = 2718;
  const SimulationReport rep = run_stein_mse(cfg);

  CHECK(rep.summary_value("mse_typicality") < rep.summary_value("mse_mle"));
  const double ratio = rep.summary_value("mse_ratio_typ_over_marginal");
  CHECK(ratio > 0.5);
  CHECK(ratio < 2.0);
  const double mean_norm = rep.summary_value("mean_norm_x");
  CHECK(std::fabs(mean_norm - std::sqrt(260.0)) <=
        4.0 * rep.summary_value("se_norm_x"));
}

TEST_CASE("validity exceedance respects the binomial bound", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment_id = "validity";
  cfg.model = ModelId::stein;
  cfg.replications = 100;
  cfg.lambdas = {0.0};
  cfg.mc_samples = 100;
  cfg.master_seed = 555;
  const SimulationReport rep = run_validity(cfg);
  for (double a : {0.05, 0.10, 0.25}) {
    std::ostringstream k1, k2;
    k1 << "exceed_alpha_" << a;
    k2 << "bound_alpha_" << a;
    CHECK(rep.summary_value(k1.str()) <= rep.summary_value(k2.str()));
  }
}

TEST_CASE("coverage report contains the truth at roughly nominal rate",
          "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment_id = "coverage";
  cfg.model = ModelId::stein;
  cfg.replications = 50;
  cfg.lambdas = {10.0};
  cfg.mc_samples = 100;
  cfg.master_seed = 808;
  const SimulationReport rep = run_coverage(cfg);
  const double c10 = rep.summary_value("coverage_alpha_0.1");
  CHECK(c10 >= 0.9 - 3.0 * std::sqrt(0.09 / 50.0));
  // nested indicators per replication
  for (const auto& row : rep.rows) {
    REQUIRE(row[2] >= row[3]);  // alpha 0.05 contains whenever 0.10 does
    REQUIRE(row[3] >= row[4]);
  }
}

TEST_CASE("reproduce ns_objective: lambda-0 argmax near half the truth",
          "[harness]") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.master_seed = 11;
  const auto files = reproduce("ns_objective", cfg, tmp.path.string());
  REQUIRE(files.size() == 2);
  const auto rows = read_rows(files[0]);
  REQUIRE(!rows.empty());
  double best_s2 = 0.0, best_obj = -1e300;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 3);
    if (std::stod(row[1]) != 0.0) continue;
    const double obj = std::stod(row[2]);
    if (obj > best_obj) {
      best_obj = obj;
      best_s2 = std::stod(row[0]);
    }
  }
  CHECK(std::fabs(best_s2 - 0.5) <= 0.15);
}

TEST_CASE("reproduce stein_objective: lambda-0 peak is the profile maximum",
          "[harness]") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.master_seed = 12;
  const auto files = reproduce("stein_objective", cfg, tmp.path.string());
  const auto rows = read_rows(files[0]);
  double best_phi = 0.0, best_obj = -1e300;
  bool has_marginal = false;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 4);
    has_marginal |= row[0] == "marginal";
    if (row[0] != "objective" || std::stod(row[1]) != 0.0) continue;
    const double obj = std::stod(row[3]);
    if (obj > best_obj) {
      best_obj = obj;
      best_phi = std::stod(row[2]);
    }
  }
  // the profile -(|x|-phi)^2/2 peaks at |x|, which lies mid-grid; the best
  // grid value must be within half a grid step of zero
  CHECK(best_obj > -0.01);
  CHECK(best_phi > 10.0);
  CHECK(has_marginal);
}

TEST_CASE("reproduce stein_contour: penalized peaks coincide", "[harness]") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.master_seed = 13;
  cfg.lambdas = {5.0, 10.0};
  cfg.grid = {{10.0, 17.0, 15, false}};
  const auto files = reproduce("stein_contour", cfg, tmp.path.string());
  const auto rows = read_rows(files[0]);
  double peak5 = 0.0, best5 = -1.0, peak10 = 0.0, best10 = -1.0;
  bool has_marginal = false;
  for (const auto& row : rows) {
    if (row[0] == "marginal") {
      has_marginal = true;
      continue;
    }
    const double lambda = std::stod(row[1]);
    const double phi = std::stod(row[2]);
    const double tau = std::stod(row[3]);
    if (lambda == 5.0 && tau > best5) {
      best5 = tau;
      peak5 = phi;
    }
    if (lambda == 10.0 && tau > best10) {
      best10 = tau;
      peak10 = phi;
    }
  }
  const double step = 7.0 / 14.0;
  CHECK(std::fabs(peak5 - peak10) <= step + 1e-9);
  CHECK(has_marginal);
}

TEST_CASE("lecam surface experiments write both figure files", "[harness]") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.experiment_id = "lecam_surfaces";
  cfg.model = ModelId::lecam;
  cfg.master_seed = 21;
  cfg.lambdas = {0.0};
  cfg.n = 40;
  cfg.grid = {{-1.0, 3.0, 17, false}, {-25.0, 5.0, 9, true}};
  const auto files = run_experiment(cfg, tmp.path.string());
  REQUIRE(files.size() == 4);
  CHECK(files[0].find("lik_surface_21.csv") != std::string::npos);
  CHECK(files[2].find("ks_surface_21.csv") != std::string::npos);
  const auto lik = read_rows(files[0]);
  CHECK(lik.size() == 17 * 9);
  // the KS surface carries log p-values, all <= 0
  for (const auto& row : read_rows(files[2]))
    CHECK(std::stod(row[2]) <= 1e-12);
}

TEST_CASE("run_experiment validates ids and writes named files", "[harness]") {
  TempDir tmp;
  ExperimentConfig bad;
  bad.experiment_id = "nope";
  bad.lambdas = {0.0};
  CHECK_THROWS_AS(run_experiment(bad, tmp.path.string()),
                  std::invalid_argument);

  ExperimentConfig cfg;
  cfg.experiment_id = "ns_bias";
  cfg.model = ModelId::neyman_scott;
  cfg.replications = 5;
  cfg.lambdas = {0.0};
  cfg.master_seed = 4;
  const auto files = run_experiment(cfg, tmp.path.string());
  REQUIRE(files.size() == 2);
  CHECK(files[0].find("ns_bias_4.csv") != std::string::npos);
  CHECK(files[1].find("ns_bias_4.json") != std::string::npos);
  CHECK(std::filesystem::exists(files[0]));
  CHECK(std::filesystem::exists(files[1]));

  // JSON summary carries the regeneration metadata
  const auto j = nlohmann::ordered_json::parse(read_text_file(files[1]));
  CHECK(j["config"]["master_seed"].get<std::uint64_t>() == 4);
  CHECK(j["config"]["model"] == "neyman_scott");
}

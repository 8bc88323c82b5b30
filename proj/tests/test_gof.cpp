#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "typik/dist.hpp"
#include "typik/gof.hpp"
#include "typik/rng.hpp"

using namespace typik;

TEST_CASE("pit basics", "[gof]") {
  const std::vector<double> x = {0.0};
  const auto u = pit(x, [](double t) { return std_normal_cdf(t); });
  REQUIRE(u.size() == 1);
  CHECK(u[0] == 0.5);

  const std::vector<double> xs = {-2.0, -1.0, 0.5, 3.0};
  const auto us = pit(xs, [](double t) { return std_normal_cdf(t); });
  CHECK(std::is_sorted(us.begin(), us.end()));

  const std::vector<double> bad = {1.0, std::nan("")};
  CHECK_THROWS_AS(pit(bad, [](double t) { return std_normal_cdf(t); }),
                  std::domain_error);
}

TEST_CASE("pit of a model sample has uniform mean", "[gof]") {
  RngStream s(100, 0);
  const auto x = sample_normal(s, 2.0, 3.0, 10000);
  const auto u =
      pit(x, [](double t) { return std_normal_cdf((t - 2.0) / 3.0); });
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= double(u.size());
  CHECK(std::fabs(mean - 0.5) < 0.01);
}

TEST_CASE("ks_statistic closed forms", "[gof]") {
  CHECK(ks_statistic(std::vector<double>{0.5}) == 0.5);
  CHECK(ks_statistic(std::vector<double>{0.25, 0.75}) ==
        Catch::Approx(0.25).margin(1e-15));
  const int n = 100;
  std::vector<double> u(n);
  for (int i = 1; i <= n; ++i) u[i - 1] = double(i) / (n + 1);
  CHECK(ks_statistic(u) == Catch::Approx(1.0 / (n + 1)).margin(1e-12));

  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}), std::domain_error);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{1.5}), std::domain_error);
}

TEST_CASE("ks_pvalue closed forms at n=1", "[gof]") {
  CHECK(ks_pvalue(0.75, 1).value == Catch::Approx(0.5).margin(1e-12));
  CHECK(ks_pvalue(0.5, 1).value == 1.0);
  CHECK(ks_pvalue(1.0, 1).value <= 1e-299);
}

TEST_CASE("ks_pvalue asymptotic series at the 5% critical value", "[gof]") {
  const long n = 10000;
  const double D = 1.3581 / std::sqrt(double(n));
  const PValue p = ks_pvalue(D, n);
  CHECK(p.method == PValueMethod::ks_asymptotic);
  CHECK(p.value == Catch::Approx(0.0500).margin(5e-4));
}

TEST_CASE("exact methods agree across their regions", "[gof]") {
  // Durbin matrix vs Pomeranz wherever the matrix stays small
  for (int n : {5, 10, 20, 40}) {
    for (double w = 0.05; w < 3.95; w += 0.1) {
      const double d = std::sqrt(w / n);
      if (n * d <= 0.5 || d >= 1.0) continue;
      const double a = detail::ks_cdf_durbin_matrix(n, d);
      const double b = detail::ks_cdf_pomeranz(n, d);
      INFO("n=" << n << " d=" << d);
      REQUIRE(std::fabs(a - b) <= 1e-10);
    }
  }
  // integer n*d boundary cases
  for (int n : {10, 50}) {
    for (int k = 1; k <= 3; ++k) {
      const double d = double(k) / n;
      const double a = detail::ks_cdf_durbin_matrix(n, d);
      const double b = detail::ks_cdf_pomeranz(n, d);
      REQUIRE(std::fabs(a - b) <= 1e-10);
    }
  }
}

TEST_CASE("Miller tail approximation meets the Pomeranz region", "[gof]") {
  for (int n : {30, 100, 140}) {
    const double d = std::sqrt(3.999 / n);
    const double exact = 1.0 - detail::ks_cdf_pomeranz(n, d);
    const double miller =
        2.0 * std::exp(detail::ks_log_sf_one_sided(n, d));
    INFO("n=" << n);
    REQUIRE(std::fabs(miller - exact) <= 2e-3 * exact);
  }
}

TEST_CASE("exact ks_pvalue against brute-force simulation", "[gof]") {
  const int n = 5;
  RngStream s(7, 0);
  const int reps = 200000;
  std::vector<double> u(n);
  for (double d : {0.3, 0.45, 0.6}) {
    int exceed = 0;
    RngStream sim = s.derive(static_cast<std::uint64_t>(d * 100));
    for (int r = 0; r < reps; ++r) {
      for (auto& v : u) v = sim.next_unit();
      std::sort(u.begin(), u.end());
      if (ks_statistic_sorted(u) >= d) ++exceed;
    }
    const double mc = double(exceed) / reps;
    const double p = ks_pvalue(d, n).value;
    const double se = std::sqrt(std::max(p * (1 - p), 1e-6) / reps);
    INFO("d=" << d << " mc=" << mc << " p=" << p);
    REQUIRE(std::fabs(mc - p) <= 4.0 * se + 1e-4);
  }
}

TEST_CASE("ks_pvalue is nonincreasing in D", "[gof]") {
  for (long n : {20L, 100L, 140L, 10000L}) {
    double prev = 1.1;
    for (double d = 0.005; d < 0.98; d += 0.004) {
      const double p = ks_pvalue(d, n).value;
      INFO("n=" << n << " d=" << d);
      REQUIRE(p <= prev + 1e-12);
      prev = p;
    }
  }
}

TEST_CASE("ks_pvalue null calibration is super-uniform", "[gof]") {
  const int reps = 2000;
  for (int n : {5, 20, 50}) {
    std::vector<double> pvals(reps);
    RngStream s(1234, static_cast<std::uint64_t>(n));
    std::vector<double> u(n);
    for (int r = 0; r < reps; ++r) {
      for (auto& v : u) v = s.next_unit();
      std::sort(u.begin(), u.end());
      pvals[r] = ks_pvalue(ks_statistic_sorted(u), n).value;
    }
    for (double alpha : {0.05, 0.10, 0.25}) {
      int count = 0;
      for (double p : pvals) count += p <= alpha ? 1 : 0;
      const double rate = double(count) / reps;
      const double bound =
          alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / reps);
      INFO("n=" << n << " alpha=" << alpha << " rate=" << rate);
      REQUIRE(rate <= bound);
    }
  }
}

TEST_CASE("chisq_variance_pvalue closed forms", "[gof]") {
  const double median2 = chisq_quantile(2, 0.5);
  CHECK(chisq_variance_pvalue(median2, 2).value ==
        Catch::Approx(1.0).margin(1e-9));
  CHECK(chisq_variance_pvalue(4.0, 2).value ==
        Catch::Approx(2.0 * std::exp(-2.0)).epsilon(1e-10));
  CHECK(chisq_variance_pvalue(0.0, 2).value <= 1e-299);
  CHECK_THROWS_AS(chisq_variance_pvalue(-1.0, 2), std::domain_error);
}

TEST_CASE("chisq_variance_pvalue decreases away from the median", "[gof]") {
  const int df = 100;
  const double med = chisq_quantile(df, 0.5);
  double prev = 1.1;
  for (double t = med; t < 4.0 * df; t += 5.0) {
    const double p = chisq_variance_pvalue(t, df).value;
    REQUIRE(p <= prev + 1e-12);
    prev = p;
  }
  prev = 1.1;
  for (double t = med; t > 1.0; t -= 2.0) {
    const double p = chisq_variance_pvalue(t, df).value;
    REQUIRE(p <= prev + 1e-12);
    prev = p;
  }
  // deep tails stay finite and ordered in log space until the floor
  const double lg1 = chisq_variance_pvalue(1000.0, df).log_value;
  const double lg2 = chisq_variance_pvalue(1200.0, df).log_value;
  CHECK(std::isfinite(lg1));
  CHECK(lg1 < -300.0);
  CHECK(lg2 < lg1);
  CHECK(chisq_variance_pvalue(4000.0, df).log_value ==
        kLogPValueFloor);  // floored
}

TEST_CASE("ncx2_two_tail examples and bound", "[gof]") {
  // median case: Q = 1/2 exactly at the median of the law
  const int df = 100;
  const double nc = 160.0;
  double lo = 1.0, hi = 2000.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    if (noncentral_chisq_cdf(df, nc, m) < 0.5)
      lo = m;
    else
      hi = m;
  }
  const double med = 0.5 * (lo + hi);
  CHECK(ncx2_two_tail(df, nc, med).value == Catch::Approx(0.5).margin(1e-6));

  // upper-tail case via the central quantile
  const double s975 = chisq_quantile(2, 0.975);
  CHECK(ncx2_two_tail(2, 0.0, s975).value == Catch::Approx(0.025).margin(1e-9));

  CHECK(ncx2_two_tail(2, 0.0, 2.0).value ==
        Catch::Approx(std::exp(-1.0)).epsilon(1e-10));

  RngStream s(5, 0);
  for (int i = 0; i < 50; ++i) {
    const double phi2 = 400.0 * s.next_unit();
    const double x = 1.0 + 600.0 * s.next_unit();
    REQUIRE(ncx2_two_tail(100, phi2, x).value <= 0.5 + 1e-12);
  }
  CHECK_THROWS_AS(ncx2_two_tail(2, 1.0, 0.0), std::domain_error);
}

TEST_CASE("PValue flooring policy", "[gof]") {
  const PValue p = PValue::from_log(-1e6, PValueMethod::ks_exact);
  CHECK(p.value == 1e-300);
  CHECK(p.log_value == Catch::Approx(std::log(1e-300)));
  const PValue q = PValue::from_linear(2.0, PValueMethod::chisq_two_tail);
  CHECK(q.value == 1.0);
  CHECK(q.log_value == 0.0);
}

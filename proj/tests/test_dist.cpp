#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "typik/dist.hpp"
#include "typik/rng.hpp"

using namespace typik;

TEST_CASE("std_normal_cdf basics", "[dist]") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  // quadrature oracle for the 97.5% point
  const double q = 0.5 + oracle::integrate(
                             [](double t) { return std_normal_pdf(t); }, 0.0,
                             1.959964, 1e-12);
  CHECK(std_normal_cdf(1.959964) == Catch::Approx(q).margin(1e-9));
  CHECK(std_normal_cdf(1.959964) == Catch::Approx(0.975).margin(1e-6));
  CHECK(std_normal_cdf(-1.959964) ==
        Catch::Approx(1.0 - std_normal_cdf(1.959964)).margin(1e-12));
  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
}

TEST_CASE("std_normal_cdf against the error-function series oracle", "[dist]") {
  for (double z = -2.8; z <= 2.8001; z += 0.1) {
    const double want = oracle::normal_cdf_series(z);
    REQUIRE(std::fabs(std_normal_cdf(z) - want) <= 1e-12);
  }
}

TEST_CASE("std_normal_cdf is monotone", "[dist]") {
  double prev = 0.0;
  for (double z = -8.0; z <= 8.0; z += 0.05) {
    const double p = std_normal_cdf(z);
    REQUIRE(p >= prev);
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("chisq_cdf closed forms and support boundary", "[dist]") {
  CHECK(chisq_cdf(2, 2.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(chisq_cdf(2, 0.0) == 0.0);
  CHECK(chisq_cdf(2, -1.0) == 0.0);
  CHECK_THROWS_AS(chisq_cdf(0, 1.0), std::domain_error);
}

TEST_CASE("chisq_cdf at df=100 against the quadrature oracle", "[dist]") {
  const double want = oracle::integrate(
      [](double t) { return oracle::chisq_density(100, t); }, 1e-12, 100.0,
      1e-10);
  CHECK(chisq_cdf(100, 100.0) == Catch::Approx(want).margin(1e-8));
  CHECK(chisq_cdf(100, 100.0) == Catch::Approx(0.5188).margin(5e-4));
}

TEST_CASE("chisq tails are complements and logs agree", "[dist]") {
  for (int df : {1, 2, 5, 100}) {
    for (double x : {0.5, 2.0, 50.0, 120.0, 350.0}) {
      CHECK(chisq_cdf(df, x) + chisq_sf(df, x) ==
            Catch::Approx(1.0).margin(1e-12));
      CHECK(std::exp(chisq_log_cdf(df, x)) ==
            Catch::Approx(chisq_cdf(df, x)).epsilon(1e-12));
      CHECK(std::exp(chisq_log_sf(df, x)) ==
            Catch::Approx(chisq_sf(df, x)).epsilon(1e-12));
    }
  }
  // deep tails stay finite in log space
  CHECK(chisq_log_sf(100, 4000.0) < -690.0);
  CHECK(std::isfinite(chisq_log_sf(100, 4000.0)));
  CHECK(std::isfinite(chisq_log_cdf(100, 1e-3)));
}

TEST_CASE("chisq_quantile inverts the cdf", "[dist]") {
  CHECK(chisq_quantile(2, 0.5) == Catch::Approx(2.0 * M_LN2).epsilon(1e-10));
  CHECK(chisq_quantile(1, 0.95) == Catch::Approx(3.8414588206941245).epsilon(1e-9));
  for (int df : {1, 2, 10, 100}) {
    for (double p : {0.01, 0.25, 0.5, 0.9, 0.999}) {
      const double x = chisq_quantile(df, p);
      REQUIRE(chisq_cdf(df, x) == Catch::Approx(p).margin(1e-10));
    }
  }
}

TEST_CASE("noncentral chisq pdf reduces to the central density", "[dist]") {
  CHECK(noncentral_chisq_pdf(2, 0.0, 2.0) ==
        Catch::Approx(std::exp(-1.0) / 2.0).epsilon(1e-12));
  RngStream s(77, 0);
  for (int i = 0; i < 20; ++i) {
    const double x = 0.1 + 30.0 * s.next_unit();
    const int df = 1 + int(s.next_unit() * 12);
    REQUIRE(std::fabs(noncentral_chisq_pdf(df, 0.0, x) -
                      oracle::chisq_density(df, x)) <= 1e-10);
  }
  CHECK_THROWS_AS(noncentral_chisq_pdf(2, -0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(noncentral_chisq_pdf(2, 1.0, 0.0), std::domain_error);
}

TEST_CASE("noncentral chisq mean identity by quadrature", "[dist]") {
  for (auto [df, nc] : {std::pair<int, double>{2, 0.0}, {100, 160.0}}) {
    const double upper = df + nc + 40.0 * std::sqrt(2.0 * df + 4.0 * nc);
    const double mean = oracle::integrate(
        [df = df, nc = nc](double x) {
          return x * noncentral_chisq_pdf(df, nc, x);
        },
        1e-10, upper, 1e-9);
    REQUIRE(mean == Catch::Approx(df + nc).margin(1e-6));
  }
}

TEST_CASE("noncentral chisq pdf integrates to one", "[dist]") {
  for (auto [df, nc] : {std::pair<int, double>{2, 0.0},
                        {10, 25.0},
                        {100, 160.0},
                        {100, 1000.0}}) {
    const double upper = df + nc + 40.0 * std::sqrt(2.0 * df + 4.0 * nc);
    const double mass = oracle::integrate(
        [df = df, nc = nc](double x) {
          return noncentral_chisq_pdf(df, nc, x);
        },
        1e-10, upper, 1e-10);
    REQUIRE(mass >= 1.0 - 1e-8);
    REQUIRE(mass <= 1.0 + 1e-8);
  }
}

TEST_CASE("noncentral chisq cdf examples", "[dist]") {
  // central chi-square(1) cdf oracle via erf
  const double want = std::erf(std::sqrt(3.8415 / 2.0));
  CHECK(noncentral_chisq_cdf(1, 0.0, 3.8415) ==
        Catch::Approx(want).margin(1e-12));
  CHECK(noncentral_chisq_cdf(1, 0.0, 3.8415) == Catch::Approx(0.95).margin(1e-4));
  CHECK(noncentral_chisq_cdf(2, 0.0, 2.0) ==
        Catch::Approx(chisq_cdf(2, 2.0)).margin(1e-12));
}

TEST_CASE("noncentral chisq cdf agrees with central at nc=0 on a grid",
          "[dist]") {
  for (int i = 1; i <= 20; ++i) {
    const double x = 0.5 * i * 10.0;  // up to 100
    REQUIRE(std::fabs(noncentral_chisq_cdf(100, 0.0, x) - chisq_cdf(100, x)) <=
            1e-10);
  }
}

TEST_CASE("noncentral chisq cdf is monotone in x and in nc", "[dist]") {
  double prev = -1.0;
  for (int i = 0; i <= 60; ++i) {
    const double x = 5.0 + i * 10.0;
    const double p = noncentral_chisq_cdf(100, 160.0, x);
    REQUIRE(p >= prev - 1e-12);
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    prev = p;
  }
  // nonincreasing in the non-centrality at fixed x
  double prev_nc = 2.0;
  for (double nc = 0.0; nc <= 400.0; nc += 20.0) {
    const double p = noncentral_chisq_cdf(100, nc, 260.0);
    REQUIRE(p <= prev_nc + 1e-12);
    prev_nc = p;
  }
}

TEST_CASE("noncentral chisq cdf against quadrature of its own density",
          "[dist]") {
  for (auto [df, nc, x] : {std::tuple<int, double, double>{100, 160.0, 260.0},
                           {10, 25.0, 30.0},
                           {100, 1024.0, 900.0}}) {
    const double want = oracle::integrate(
        [df = df, nc = nc](double t) { return noncentral_chisq_pdf(df, nc, t); },
        1e-10, x, 1e-11);
    REQUIRE(noncentral_chisq_cdf(df, nc, x) ==
            Catch::Approx(want).margin(1e-9));
  }
}

TEST_CASE("noncentral chisq tails sum to one", "[dist]") {
  for (double nc : {0.0, 1.0, 160.0, 1024.0}) {
    for (double x : {50.0, 260.0, 1200.0}) {
      const Tails t = noncentral_chisq_both(100, nc, x);
      REQUIRE(t.lower + t.upper == Catch::Approx(1.0).margin(1e-10));
    }
  }
}

TEST_CASE("DistParams validation", "[dist]") {
  DistParams ok{100, 160.0, 0.0, 1.0};
  CHECK_NOTHROW(ok.check());
  CHECK_THROWS_AS((DistParams{0, 0.0, 0.0, 1.0}.check()), std::domain_error);
  CHECK_THROWS_AS((DistParams{1, -1.0, 0.0, 1.0}.check()), std::domain_error);
  CHECK_THROWS_AS((DistParams{1, 0.0, 0.0, 0.0}.check()), std::domain_error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpoly/stats.hpp"

using namespace cpoly;
using namespace cpoly::stats;

namespace {

// test-local normal quantile via bisection on the CDF
double normal_quantile(double p) {
  double lo = -10, hi = 10;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("KS against a constructed quantile sample") {
  const int N = 999;
  std::vector<double> sample(N);
  for (int i = 1; i <= N; ++i) sample[i - 1] = normal_quantile(i / static_cast<double>(N + 1));
  CHECK(ks_statistic(sample, normal_cdf) <= 2.0 / (N + 1) + 1e-9);
}

TEST_CASE("KS of a constant sample") {
  CHECK(ks_statistic({0.0, 0.0, 0.0}, normal_cdf) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(ks_statistic({}, normal_cdf), ConfigError);
}

TEST_CASE("KS self-calibration: critical value holds at the 1% level") {
  const int N = 10000;
  int below = 0;
  for (uint64_t rep = 0; rep < 100; ++rep) {
    RngState rng(1000 + rep, 0);
    std::vector<double> sample(N);
    for (double& x : sample) x = rng.next_normal();
    if (ks_statistic(sample, normal_cdf) < 1.63 / std::sqrt(N)) ++below;
  }
  CHECK(below >= 95);
}

TEST_CASE("KS is invariant under increasing transformations") {
  RngState rng(8, 0);
  std::vector<double> sample(2000);
  for (double& x : sample) x = rng.next_normal();
  const double d0 = ks_statistic(sample, normal_cdf);
  std::vector<double> mapped = sample;
  for (double& x : mapped) x = std::exp(x);  // strictly increasing
  const double d1 =
      ks_statistic(mapped, [](double y) { return normal_cdf(std::log(y)); });
  CHECK(d0 == doctest::Approx(d1).epsilon(1e-12));
}

TEST_CASE("two-sample KS extremes") {
  std::vector<double> a = {1, 2, 3, 4};
  CHECK(ks_two_sample(a, a) == doctest::Approx(0.0));
  std::vector<double> b = {10, 11, 12};
  CHECK(ks_two_sample(a, b) == doctest::Approx(1.0));
}

TEST_CASE("variance fit recovers exact synthetic scaling") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {1000.0, 4000.0, 16000.0, 64000.0, 256000.0})
    pts.emplace_back(n, 2.0 * n * std::log(n));
  const FitResult f = variance_scaling_fit(pts, Regressor::NLogN);
  CHECK(std::fabs(f.slope - 2.0) < 1e-12);
  CHECK(std::fabs(f.intercept) < 1e-6);
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  // an order-n correction lands in the intercept, leaving the slope exact
  for (auto& [n, v] : pts) v -= 3.5 * n;
  const FitResult g = variance_scaling_fit(pts, Regressor::NLogN);
  CHECK(std::fabs(g.slope - 2.0) < 1e-10);
  CHECK(g.intercept == doctest::Approx(-3.5).epsilon(1e-9));

  // pure-power regime regresses the raw variance
  std::vector<std::pair<double, double>> lin;
  for (double n : {1000.0, 2000.0, 4000.0, 8000.0}) lin.emplace_back(n, 7.0 * n + 11.0);
  const FitResult h = variance_scaling_fit(lin, Regressor::N);
  CHECK(std::fabs(h.slope - 7.0) < 1e-10);
  CHECK(h.intercept == doctest::Approx(11.0).epsilon(1e-8));

  CHECK_THROWS_AS(variance_scaling_fit({{1, 1}, {2, 2}, {3, 3}}, Regressor::N), ConfigError);
  CHECK_THROWS_AS(variance_scaling_fit({{1, 0}, {2, 0}, {3, 0}, {4, 0}}, Regressor::N),
                  ConfigError);
}

TEST_CASE("report serialization carries every check") {
  VerificationReport rep;
  rep.suite = "demo";
  CheckRecord a;
  a.name = "alpha";
  a.observed = 1.0;
  a.target = 1.0;
  a.pass = true;
  rep.add(a);
  CheckRecord b;
  b.name = "beta";
  b.pass = false;
  b.mandatory = false;
  rep.add(b);
  CHECK(rep.pass());  // beta is advisory
  const auto j = rep.to_json();
  CHECK(j.at("suite") == "demo");
  CHECK(j.at("pass") == true);
  CHECK(j.at("checks").size() == 2);
  CHECK(j.at("checks")[1].at("mandatory") == false);

  // serialization round-trips
  const VerificationReport back = VerificationReport::from_json(j);
  CHECK(back.to_json() == j);

  rep.checks[0].pass = false;
  CHECK(!rep.pass());
}

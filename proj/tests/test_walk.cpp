#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpoly/walk.hpp"

using namespace cpoly;

namespace {

StepEntry step1(int64_t x, int64_t num, int64_t den) {
  StepEntry e;
  e.v[0] = x;
  e.num = num;
  e.den = den;
  return e;
}

}  // namespace

TEST_CASE("simple walk second-order data") {
  const WalkModel w1 = WalkModel::simple(1);
  CHECK(w1.sigma2() == doctest::Approx(1.0).epsilon(1e-15));

  const WalkModel w3 = WalkModel::simple(3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(w3.covariance()[a * 3 + b] == doctest::Approx(a == b ? 1.0 / 3.0 : 0.0));
  CHECK(w3.det_covariance() == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
  CHECK(w3.axis_symmetric());
  CHECK(w3.permutation_symmetric());
}

TEST_CASE("lazy walk holds and stays symmetric") {
  const WalkModel w = WalkModel::lazy(3, 0.3);
  CHECK(w.steps().size() == 7);
  CHECK(w.covariance()[0] == doctest::Approx(0.7 / 3.0).epsilon(1e-12));
  CHECK(w.axis_symmetric());
  CHECK_THROWS_AS(WalkModel::lazy(3, 0.0), ConfigError);
  CHECK_THROWS_AS(WalkModel::lazy(3, 1.0), ConfigError);
}

TEST_CASE("custom table validation") {
  // asymmetric support is rejected
  CHECK_THROWS_AS(
      WalkModel::custom(1, {step1(1, 1, 2), step1(-1, 1, 4), step1(2, 1, 4)}), ConfigError);
  // probabilities must sum to one
  CHECK_THROWS_AS(WalkModel::custom(1, {step1(1, 1, 3), step1(-1, 1, 3)}), ConfigError);
  // support must generate the whole lattice
  CHECK_THROWS_AS(WalkModel::custom(1, {step1(2, 1, 2), step1(-2, 1, 2)}), ConfigError);
  // duplicate vectors are rejected
  CHECK_THROWS_AS(
      WalkModel::custom(1, {step1(1, 1, 4), step1(1, 1, 4), step1(-1, 1, 2)}), ConfigError);

  const WalkModel ok = WalkModel::custom(
      1, {step1(1, 3, 8), step1(-1, 3, 8), step1(2, 1, 8), step1(-2, 1, 8)});
  CHECK(ok.sigma2() == doctest::Approx(3.0 / 4.0 + 4.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("characteristic function basics") {
  const WalkModel w1 = WalkModel::simple(1);
  const double pi = 3.14159265358979323846;
  double theta = pi / 2;
  CHECK(w1.char_function(&theta) == doctest::Approx(0.0).epsilon(1e-15));
  for (double t : {0.1, 0.7, 2.9}) {
    CHECK(w1.char_function(&t) == doctest::Approx(std::cos(t)).epsilon(1e-15));
    double neg = -t;
    CHECK(w1.char_function(&neg) == doctest::Approx(w1.char_function(&t)));
  }
  theta = 0.0;
  CHECK(w1.char_function(&theta) == 1.0);

  // simple walk: (1/d) sum cos at machine precision
  const WalkModel w3 = WalkModel::simple(3);
  double th[3] = {0.3, -1.2, 2.2};
  const double expect = (std::cos(th[0]) + std::cos(th[1]) + std::cos(th[2])) / 3.0;
  CHECK(w3.char_function(th) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("sampling: support, determinism, empirical moments") {
  const WalkModel w3 = WalkModel::simple(3);
  RngState rng(123, 0);
  for (int i = 0; i < 1000; ++i) {
    const Coord v = w3.sample_step(rng);
    int nonzero = 0;
    for (int a = 0; a < 3; ++a)
      if (v[a] != 0) {
        ++nonzero;
        CHECK(std::llabs(v[a]) == 1);
      }
    CHECK(nonzero == 1);
  }

  RngState r1(99, 7), r2(99, 7);
  for (int i = 0; i < 100; ++i) {
    const Coord a = w3.sample_step(r1);
    const Coord b = w3.sample_step(r2);
    CHECK(a == b);
  }

  // empirical mean and covariance within 4 standard errors
  const int N = 1000000;
  RngState rng2(2024, 1);
  double mean[3] = {0, 0, 0};
  double cov[9] = {0};
  for (int i = 0; i < N; ++i) {
    const Coord v = w3.sample_step(rng2);
    for (int a = 0; a < 3; ++a) {
      mean[a] += static_cast<double>(v[a]);
      for (int b = 0; b < 3; ++b) cov[a * 3 + b] += static_cast<double>(v[a] * v[b]);
    }
  }
  for (int a = 0; a < 3; ++a) {
    mean[a] /= N;
    const double se = std::sqrt(1.0 / 3.0 / N);
    CHECK(std::fabs(mean[a]) < 4 * se);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double emp = cov[a * 3 + b] / N;
      const double expect = a == b ? 1.0 / 3.0 : 0.0;
      // Var of v_a v_b: diagonal entries are Bernoulli(1/3)
      const double se = std::sqrt((a == b ? (1.0 / 3.0) * (2.0 / 3.0) : 1.0 / 3.0) / N);
      CHECK(std::fabs(emp - expect) < 4 * se);
    }
}

TEST_CASE("counter rng: addressable draws") {
  RngState a(5, 3);
  for (int i = 0; i < 10; ++i) a.next_u64();
  const uint64_t tenth = a.next_u64();
  RngState b(5, 3);
  uint64_t v = 0;
  for (int i = 0; i < 11; ++i) v = b.next_u64();
  CHECK(v == tenth);
  CHECK(RngState(5, 3).next_u64() != RngState(5, 4).next_u64());
  CHECK(RngState(5, 3).next_u64() != RngState(6, 3).next_u64());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cpoly/exact.hpp"

using namespace cpoly;
using namespace cpoly::exact;

namespace {

// closed-form E Q_n for the d=1 simple walk:
// sum_{m < n} (n - m) P{S_m = 0}, P{S_{2k} = 0} = C(2k, k) 2^{-2k}
Rational mean_self_closed_form(int n) {
  Rational s = 0;
  for (int m = 2; m < n; m += 2)
    s += Rational(n - m) * Rational(binomial_big(m, m / 2), pow_big(2, m));
  return s;
}

}  // namespace

TEST_CASE("frozen small-n moments, d=1 simple walk") {
  const WalkModel w = WalkModel::simple(1);
  CHECK(exact_moment(w, Quantity::Energy, 3, 1) == 0);
  CHECK(exact_moment(w, Quantity::Energy, 3, 2) == Rational(1, 2));
  CHECK(exact_moment(w, Quantity::Self, 3, 1) == Rational(1, 2));
  CHECK(exact_moment(w, Quantity::Self, 4, 1) == 1);
  CHECK(exact_distinct_site_sum(w, 2, 1, kNoTruncation) == 0);
  CHECK(exact_distinct_site_sum(w, 3, 1, kNoTruncation) == Rational(1, 2));
}

TEST_CASE("mean self-intersections match the closed form") {
  const WalkModel w = WalkModel::simple(1);
  for (int n = 2; n <= 10; ++n)
    CHECK(exact_moment(w, Quantity::Self, n, 1) == mean_self_closed_form(n));
}

TEST_CASE("ensemble invariants") {
  const WalkModel w1 = WalkModel::simple(1);
  for (int n : {3, 6, 9}) {
    const ExactSummary s = enumerate_summary(w1, n, 4);
    CHECK(s.total_probability == 1);
    CHECK(s.path_count == (1ull << n));
    // the mean vanishes; higher odd moments are nonnegative (and strictly
    // positive once triple visits are possible: per-site odd charge
    // averages do not cancel)
    CHECK(s.energy[1] == 0);
    CHECK(s.energy[3] >= 0);
    // conditional-variance identity
    CHECK(s.energy[2] == s.self[1]);
    // distinct-site sum at m = 1 equals the mean intersection count
    CHECK(s.distinct_site_sum[1] == s.self[1]);
  }
  // frozen from an independent full (path x charge) enumeration
  CHECK(enumerate_summary(w1, 6, 3).energy[3] == 3);
  const WalkModel w3 = WalkModel::simple(3);
  const ExactSummary s3 = enumerate_summary(w3, 4, 2);
  CHECK(s3.total_probability == 1);
  CHECK(s3.path_count == 1296);
  CHECK(s3.energy[2] == s3.self[1]);
}

TEST_CASE("truncated summaries: indicator semantics and ordering") {
  const WalkModel w = WalkModel::simple(1);
  for (int n : {4, 6}) {
    for (double K : {1.0, 2.0, 3.0}) {
      const ExactSummary s = enumerate_summary(w, n, 4, K);
      CHECK(s.energy_trunc[1] == 0);
      CHECK(s.energy_trunc[3] >= 0);
      // truncation can only reduce even moments of Q
      CHECK(s.self_trunc[2] <= s.self[2]);
      // distinct-site sums never exceed the matching truncated moment
      for (int m = 1; m <= 4; ++m) CHECK(s.distinct_site_sum[m] <= s.self_trunc[m]);
      // K = 1 keeps only intersection-free paths
      if (K == 1.0) CHECK(s.self_trunc[1] == 0);
    }
    // A_1 equals E Qt exactly (both inequalities are equalities at m = 1)
    const ExactSummary s2 = enumerate_summary(w, n, 2, 2.0);
    CHECK(s2.distinct_site_sum[1] == s2.self_trunc[1]);
  }
}

TEST_CASE("series product matches full charge enumeration on fixed counts") {
  // independent oracle: enumerate all 2^n Rademacher assignments directly
  auto brute = [](const std::vector<int>& counts, int m) {
    int n = 0;
    for (int c : counts) n += c;
    std::vector<int> site_of;
    for (size_t s = 0; s < counts.size(); ++s)
      for (int k = 0; k < counts[s]; ++k) site_of.push_back(static_cast<int>(s));
    BigInt total = 0;
    for (uint64_t mask = 0; mask < (1ull << n); ++mask) {
      std::vector<int64_t> cs(counts.size(), 0);
      int64_t h = 0;
      for (int k = 0; k < n; ++k) {
        const int64_t w = (mask >> k) & 1 ? 1 : -1;
        h += w * cs[site_of[k]];
        cs[site_of[k]] += w;
      }
      total += pow_big(BigInt(h), m);
    }
    return Rational(total, pow_big(2, n));
  };
  for (const auto& counts :
       {std::vector<int>{3, 2, 1}, std::vector<int>{4, 4}, std::vector<int>{2, 2, 2, 1}}) {
    for (int m = 0; m <= 6; ++m)
      CHECK(energy_moment_for_counts(counts, m) == brute(counts, m));
  }
}

TEST_CASE("pair-sum moment identities") {
  CHECK(check_pair_sum_moments(2, 2).second_moment == 4);
  CHECK(check_pair_sum_moments(3, 2).second_moment == 12);
  for (int n = 2; n <= 10; ++n) {
    const auto chk = check_pair_sum_moments(n, 2);
    CHECK(chk.identity_ok);
    CHECK(chk.c_min == doctest::Approx(1.0));  // m = 2 saturates the bound
  }
  // per-site charge averages are nonnegative at every order
  for (int l = 0; l <= 8; ++l)
    for (int i = 1; i <= 6; ++i) CHECK(site_moment(l, i) >= 0);
}

TEST_CASE("moment comparison checks pass on the spec grid") {
  const WalkModel w = WalkModel::simple(1);
  for (int n : {4, 5, 6})
    for (int m : {1, 2, 3, 4})
      for (double K : {2.0, 3.0, kNoTruncation}) {
        const auto chk = check_moment_comparison(w, n, m, K);
        CHECK(chk.pass());
        if (!std::isfinite(K) && m > 1) CHECK(chk.upper_vacuous);
      }
}

TEST_CASE("maximal inequality by full enumeration") {
  const WalkModel w = WalkModel::simple(1);
  {
    const auto chk = check_maximal_inequality(w, 4, 1, 1);
    CHECK(chk.ok);
    CHECK(chk.lhs <= chk.rhs);
    CHECK(denominator(chk.lhs) > 0);
  }
  {  // t beyond the attainable range degenerates to 0 <= 0
    const auto chk = check_maximal_inequality(w, 4, 1, 1000);
    CHECK(chk.tail == 0);
    CHECK(chk.max_exceed == 0);
    CHECK(chk.ok);
  }
  {  // s = 0 means H_k = 0 exactly; still well-defined
    const auto chk = check_maximal_inequality(w, 4, 0, 1);
    CHECK(chk.ok);
    CHECK(chk.min_small > 0);
  }
}

TEST_CASE("deterministic and parallel-agnostic") {
  const WalkModel w = WalkModel::simple(1);
  const ExactSummary a = enumerate_summary(w, 9, 4, 2.0, true);
  const ExactSummary b = enumerate_summary(w, 9, 4, 2.0, false);
  for (int m = 0; m <= 4; ++m) {
    CHECK(a.energy[m] == b.energy[m]);
    CHECK(a.energy_trunc[m] == b.energy_trunc[m]);
    CHECK(a.self[m] == b.self[m]);
    CHECK(a.self_trunc[m] == b.self_trunc[m]);
    CHECK(a.distinct_site_sum[m] == b.distinct_site_sum[m]);
  }
}

TEST_CASE("size guard") {
  const WalkModel w3 = WalkModel::simple(3);
  CHECK_THROWS_AS(enumerate_summary(w3, 12, 2), SizeLimitError);
  CHECK_THROWS_AS(check_maximal_inequality(w3, 10, 1, 1), SizeLimitError);
  CHECK_THROWS_AS(exact_moment(WalkModel::simple(1), Quantity::EnergyTruncated, 4, 2),
                  ConfigError);  // truncated quantity needs finite K
}

TEST_CASE("moment report serialization") {
  const WalkModel w = WalkModel::simple(1);
  const MomentReport r = moment_report(w, Quantity::Self, 4, 1);
  const auto j = r.to_json();
  CHECK(j.at("quantity") == "Q");
  CHECK(j.at("n") == 4);
  CHECK(j.at("m") == 1);
  CHECK(j.at("K") == "inf");
  CHECK(j.at("num") == "1");
  CHECK(j.at("den") == "1");
  const MomentReport rt = moment_report(w, Quantity::SelfTruncated, 4, 1, 2.0);
  CHECK(rt.to_json().at("K") == 2.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpoly/observables.hpp"

using namespace cpoly;

namespace {

// O(n^2) reference: evaluates the defining double sums directly from the
// stored path and charges, independent of the streaming accumulator.
template <class ChargeT>
struct BruteForce {
  std::vector<Coord> pos;
  std::vector<ChargeT> charge;

  void record(const Coord& p, ChargeT q) {
    pos.push_back(p);
    charge.push_back(q);
  }
  ChargeT energy(int d) const {
    ChargeT h{};
    for (size_t k = 1; k < pos.size(); ++k)
      for (size_t j = 0; j < k; ++j)
        if (std::equal(pos[j].begin(), pos[j].begin() + d, pos[k].begin()))
          h += charge[j] * charge[k];
    return h;
  }
  uint64_t self(int d) const {
    uint64_t q = 0;
    for (size_t k = 1; k < pos.size(); ++k)
      for (size_t j = 0; j < k; ++j)
        if (std::equal(pos[j].begin(), pos[j].begin() + d, pos[k].begin())) ++q;
    return q;
  }
};

Coord unit(int axis, int sign) {
  Coord c{};
  c[axis] = sign;
  return c;
}

}  // namespace

TEST_CASE("hand-checked increments on the three-step line path") {
  PathAccumulator<int64_t> acc(1);

  auto r1 = acc.advance(unit(0, +1), +1);  // first visit of a fresh site
  CHECK(r1.d_energy == 0);
  CHECK(r1.d_self == 0);
  CHECK(r1.d_range == 1);

  acc.advance(unit(0, -1), +1);
  auto r3 = acc.advance(unit(0, +1), +1);  // back to site 1
  CHECK(r3.d_energy == 1);
  CHECK(r3.d_self == 1);
  CHECK(r3.d_range == 0);

  CHECK(acc.energy() == 1);
  CHECK(acc.self_intersections() == 1);
  CHECK(acc.range() == 2);
  CHECK(acc.sup_visits() == 2);

  const auto [l2, c2] = acc.sum_of_squares();
  CHECK(l2 == 5);  // visits 2 at site 1, 1 at site 0
  CHECK(c2 == 5);  // charge sums 2 and 1
  CHECK(2 * acc.energy() + 3 == c2);
  CHECK(l2 - 3 == 2 * acc.self_intersections());
}

TEST_CASE("flipped third charge flips the energy") {
  PathAccumulator<int64_t> acc(1);
  acc.advance(unit(0, +1), +1);
  acc.advance(unit(0, -1), +1);
  acc.advance(unit(0, +1), -1);
  CHECK(acc.energy() == -1);
}

TEST_CASE("truncation indicator boundary") {
  PathAccumulator<int64_t> acc(1);
  acc.advance(unit(0, +1), +1);
  acc.advance(unit(0, -1), +1);
  acc.advance(unit(0, +1), +1);
  REQUIRE(acc.sup_visits() == 2);
  CHECK(acc.truncated(3.0) == std::pair<int64_t, uint64_t>{1, 1});
  CHECK(acc.truncated(1.0) == std::pair<int64_t, uint64_t>{0, 0});
  // the ceiling is inclusive
  CHECK(acc.truncated(2.0) == std::pair<int64_t, uint64_t>{1, 1});
}

TEST_CASE("truncation rule schedules") {
  TruncationRule r1{1, 2.0, TruncationRule::Bn::LogLog};
  const double n = 100000.0;
  CHECK(r1.threshold(n) ==
        doctest::Approx(2.0 * std::sqrt(n * std::log(std::log(n)))).epsilon(1e-12));
  TruncationRule r2{2, 1.5, TruncationRule::Bn::LogLog};
  CHECK(r2.threshold(n) == doctest::Approx(1.5 * std::log(n) * std::log(n)).epsilon(1e-12));
  TruncationRule r3{3, 1.0, TruncationRule::Bn::LogLog};
  CHECK(r3.threshold(n) == doctest::Approx(std::pow(n / std::log(n), 0.25)).epsilon(1e-12));
}

TEST_CASE("pair accumulator hand examples") {
  {  // walks (1, 0) and (1, 2): only the round-1 sites coincide
    PairAccumulator p(1);
    uint64_t dj = p.advance_pair(unit(0, +1), unit(0, +1));
    CHECK(dj == 1);  // (1,1) diagonal pair
    dj = p.advance_pair(unit(0, -1), unit(0, +1));
    CHECK(dj == 0);
    CHECK(p.cross_intersections() == 1);
  }
  {  // identical walks without self-intersections: diagonal pairs only
    PairAccumulator p(2);
    for (int k = 0; k < 50; ++k) p.advance_pair(unit(0, +1), unit(0, +1));
    CHECK(p.cross_intersections() == 50);
  }
}

TEST_CASE("pair accumulator equals the brute-force double sum") {
  const WalkModel w = WalkModel::simple(3);
  RngState rng(777, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 50 + static_cast<int>(rng.next_u64() % 251);  // up to 300
    PairAccumulator p(3);
    std::vector<Coord> a, b;
    Coord pa{}, pb{};
    for (int k = 0; k < n; ++k) {
      const Coord s1 = w.sample_step(rng), s2 = w.sample_step(rng);
      add_in_place(pa, s1, 3);
      add_in_place(pb, s2, 3);
      a.push_back(pa);
      b.push_back(pb);
      p.advance_pair(s1, s2);
    }
    uint64_t j = 0;
    for (const auto& x : a)
      for (const auto& y : b)
        if (x == y) ++j;
    REQUIRE(p.cross_intersections() == j);
  }
}

TEST_CASE("streamed energy and intersections equal the defining double sums") {
  for (int d : {1, 2, 3}) {
    const WalkModel w = WalkModel::simple(d);
    RngState rng(42 + d, 0);
    const int n = 500;
    // exact comparison with integer charges
    for (int rep = 0; rep < 1000; ++rep) {
      PathAccumulator<int64_t> acc(d);
      BruteForce<int64_t> bf;
      for (int k = 0; k < n; ++k) {
        const Coord s = w.sample_step(rng);
        const int64_t q = rng.rademacher();
        acc.advance(s, q);
        bf.record(acc.position(), q);
      }
      REQUIRE(acc.energy() == bf.energy(d));
      REQUIRE(acc.self_intersections() == bf.self(d));
    }
    // and within 1e-9 relative with Gaussian charges
    for (int rep = 0; rep < 20; ++rep) {
      PathAccumulator<double> acc(d);
      BruteForce<double> bf;
      for (int k = 0; k < n; ++k) {
        const Coord s = w.sample_step(rng);
        const double q = rng.next_normal();
        acc.advance(s, q);
        bf.record(acc.position(), q);
      }
      const double ref = bf.energy(d);
      REQUIRE(acc.energy() ==
              doctest::Approx(ref).epsilon(1e-9));
      REQUIRE(acc.self_intersections() == bf.self(d));
    }
  }
}

TEST_CASE("identities hold after every step") {
  const WalkModel w = WalkModel::simple(2);
  RngState rng(9, 0);
  PathAccumulator<int64_t> acc(2);
  for (int k = 1; k <= 400; ++k) {
    acc.advance(w.sample_step(rng), rng.rademacher());
    const auto [l2, c2] = acc.sum_of_squares();
    REQUIRE(2 * acc.self_intersections() == l2 - static_cast<uint64_t>(k));
    REQUIRE(2 * acc.energy() + k == c2);
    REQUIRE(2 * acc.self_intersections() <=
            static_cast<uint64_t>(k) * acc.sup_visits());
    REQUIRE(acc.range() <= static_cast<uint64_t>(k));
  }
}

TEST_CASE("charge-averaged squared energy equals the intersection count") {
  // fixed path, every Rademacher assignment enumerated
  const WalkModel w = WalkModel::simple(1);
  for (uint64_t seed : {11u, 12u, 13u}) {
    RngState rng(seed, 0);
    const int n = 12;
    std::vector<Coord> steps;
    for (int k = 0; k < n; ++k) steps.push_back(w.sample_step(rng));

    // site index of every vertex along the fixed path
    std::vector<Coord> pos;
    Coord p{};
    for (const auto& s : steps) {
      add_in_place(p, s, 1);
      pos.push_back(p);
    }
    uint64_t q_path = 0;
    for (int k = 1; k < n; ++k)
      for (int j = 0; j < k; ++j)
        if (pos[j] == pos[k]) ++q_path;

    int64_t sum_h2 = 0;
    for (uint64_t mask = 0; mask < (1ull << n); ++mask) {
      int64_t h = 0;
      for (int k = 1; k < n; ++k)
        for (int j = 0; j < k; ++j)
          if (pos[j] == pos[k]) {
            const int64_t wj = (mask >> j) & 1 ? 1 : -1;
            const int64_t wk = (mask >> k) & 1 ? 1 : -1;
            h += wj * wk;
          }
      sum_h2 += h * h;
    }
    // E[H^2 | path] = Q exactly, so the integer sum is Q * 2^n
    REQUIRE(sum_h2 == static_cast<int64_t>(q_path) * (1ll << n));
  }
}

TEST_CASE("far sites fall back to the generic table") {
  PathAccumulator<int64_t> acc(1);
  Coord big{};
  big[0] = 40000;  // beyond the packable range in one hop
  acc.advance(big, +1);
  acc.advance(negate(big, 1), +1);  // back to the origin
  acc.advance(big, +1);             // revisit the far site
  CHECK(acc.energy() == 1);
  CHECK(acc.self_intersections() == 1);
  CHECK(acc.range() == 2);
  const auto [l2, c2] = acc.sum_of_squares();
  CHECK(l2 == 5);
  CHECK(c2 == 5);
}

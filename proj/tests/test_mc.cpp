#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "cpoly/exact.hpp"
#include "cpoly/mc.hpp"

using namespace cpoly;

namespace {

// two-pass reference for the streaming moments
struct TwoPass {
  double mean = 0;
  double m[7] = {0, 0, 0, 0, 0, 0, 0};
  explicit TwoPass(const std::vector<double>& v) {
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double x : v)
      for (int p = 2; p <= 6; ++p) m[p] += std::pow(x - mean, p);
    for (int p = 2; p <= 6; ++p) m[p] /= static_cast<double>(v.size());
  }
};

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(3);
  c.n_grid = {64, 256, 1024};
  c.replicates = 600;
  c.master_seed = 99;
  c.observables.energy = true;
  c.observables.self = true;
  c.observables.energy_trunc = true;
  c.observables.self_trunc = true;
  c.observables.range = true;
  c.observables.sup_visits = true;
  c.observables.cross = true;
  c.truncation.d = 3;
  c.block_size = 64;
  return c;
}

}  // namespace

TEST_CASE("streaming moments: merge laws and two-pass agreement") {
  RngState rng(7, 0);
  std::vector<double> values(160000);
  for (double& v : values) v = rng.next_normal() * 2.0 + 0.5;

  SummaryStats whole;
  for (double v : values) whole.add(v);

  // 16 shards merged pairwise
  std::vector<SummaryStats> shards(16);
  for (size_t i = 0; i < values.size(); ++i) shards[i / 10000].add(values[i]);
  SummaryStats m16;
  for (const auto& s : shards) m16.merge(s);

  const TwoPass ref(values);
  for (int p = 2; p <= 6; ++p) {
    const double scale = std::fabs(ref.m[p]);
    CHECK(std::fabs(whole.central_moment(p) - ref.m[p]) / scale < 1e-10);
    CHECK(std::fabs(m16.central_moment(p) - ref.m[p]) / scale < 1e-10);
  }
  CHECK(whole.variance() >= 0.0);
  CHECK(m16.count() == whole.count());
  CHECK(m16.min() == whole.min());
  CHECK(m16.max() == whole.max());

  // identity and commutativity
  SummaryStats empty;
  SummaryStats x = shards[0];
  x.merge(empty);
  CHECK(x.count() == shards[0].count());
  CHECK(x.mean() == shards[0].mean());
  SummaryStats ab = shards[0], ba = shards[1];
  ab.merge(shards[1]);
  ba.merge(shards[0]);
  CHECK(ab.mean() == doctest::Approx(ba.mean()).epsilon(1e-13));
  for (int p = 2; p <= 6; ++p)
    CHECK(ab.central_moment(p) == doctest::Approx(ba.central_moment(p)).epsilon(1e-10));
}

TEST_CASE("reservoir: bottom-k selection is order- and split-independent") {
  std::vector<Reservoir::Item> items;
  RngState rng(5, 0);
  for (uint64_t i = 0; i < 5000; ++i)
    items.push_back({rng.next_u64(), i, static_cast<double>(i)});

  Reservoir fwd(100), rev(100), split_a(100), split_b(100);
  for (const auto& it : items) fwd.add(it.priority, it.id, it.value);
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    rev.add(it->priority, it->id, it->value);
  for (size_t i = 0; i < items.size(); ++i)
    (i % 2 ? split_a : split_b).add(items[i].priority, items[i].id, items[i].value);
  split_a.merge(split_b);

  CHECK(fwd.values() == rev.values());
  CHECK(fwd.values() == split_a.values());
  CHECK(fwd.size() == 100);
}

TEST_CASE("single replicate audit against a hand-rolled loop") {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(1);
  c.n_grid = {3};
  c.replicates = 1;
  c.master_seed = 12345;
  c.observables.energy = true;
  c.observables.self = true;
  const ResultSet rs = run(c, 1);
  const double h3 = rs.stats(Obs::H, 0).mean();
  CHECK((h3 == -1.0 || h3 == 0.0 || h3 == 1.0));

  // replay the documented draw order: step index then charge
  const WalkModel w = c.walk.build();
  RngState rng(c.master_seed, 0);
  PathAccumulator<int64_t> acc(1);
  for (int k = 0; k < 3; ++k) {
    const int i = w.sample_index(rng);
    const int64_t q = rng.rademacher();
    acc.advance(w.steps()[i].v, q);
  }
  CHECK(static_cast<double>(acc.energy()) == h3);
  CHECK(static_cast<double>(acc.self_intersections()) == rs.stats(Obs::Q, 0).mean());
}

TEST_CASE("engine output is a pure function of the config") {
  const ExperimentConfig c = small_config();
  std::string dump1, dump8, dump_serial;
  const ResultSet r1 = run(c, 1, &dump1);
  const ResultSet r8 = run(c, 8, &dump8);
  const ResultSet rs = run_serial(c, &dump_serial);
  const std::string j1 = r1.summary_json(true).dump();
  CHECK(j1 == r8.summary_json(true).dump());
  CHECK(j1 == rs.summary_json(true).dump());
  CHECK(dump1 == dump8);
  CHECK(dump1 == dump_serial);
  // repeated run, same bytes
  CHECK(j1 == run(c, 3).summary_json(true).dump());
}

TEST_CASE("pair observable equals a direct double loop at one checkpoint") {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(3);
  c.n_grid = {100};
  c.replicates = 4;
  c.master_seed = 2222;
  c.observables.energy = false;
  c.observables.self = false;
  c.observables.cross = true;
  const ResultSet rs = run(c, 2);
  const WalkModel w = c.walk.build();
  for (uint64_t r = 0; r < c.replicates; ++r) {
    RngState rng(c.master_seed, r);
    std::vector<Coord> a, b;
    Coord pa{}, pb{};
    for (int k = 0; k < 100; ++k) {
      add_in_place(pa, w.steps()[w.sample_index(rng)].v, 3);
      add_in_place(pb, w.steps()[w.sample_index(rng)].v, 3);
      a.push_back(pa);
      b.push_back(pb);
    }
    uint64_t j = 0;
    for (const auto& x : a)
      for (const auto& y : b)
        if (x == y) ++j;
    const auto vals = rs.sample_values(Obs::J, 0);
    // bottom-k reservoir with cap >= count keeps every replicate
    REQUIRE(vals.size() == c.replicates);
    bool found = false;
    for (double v : vals)
      if (v == static_cast<double>(j)) found = true;
    CHECK(found);
  }
}

TEST_CASE("Monte Carlo means land on the exact oracle at n=6") {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(1);
  c.n_grid = {6};
  c.replicates = 1000000;
  c.master_seed = 31415;
  c.observables.energy = true;
  c.observables.self = true;
  c.reservoir_size = 1024;
  const ResultSet rs = run(c, 0);

  const WalkModel w = c.walk.build();
  const auto oracle = exact::enumerate_summary(w, 6, 4);
  const double eq = to_double(oracle.self[1]);
  const double eq2 = to_double(oracle.self[2]);
  const double eh2 = to_double(oracle.energy[2]);

  const auto& h = rs.stats(Obs::H, 0);
  const auto& q = rs.stats(Obs::Q, 0);
  const double n = static_cast<double>(c.replicates);

  // sample means within 4 standard errors of every exact moment with m <= 2
  CHECK(std::fabs(h.mean() - 0.0) < 4.0 * std::sqrt(eh2 / n));
  const double var_q = eq2 - eq * eq;
  CHECK(std::fabs(q.mean() - eq) < 4.0 * std::sqrt(var_q / n));
  const double var_h2 = to_double(oracle.energy[4]) - eh2 * eh2;
  CHECK(std::fabs((h.variance() + h.mean() * h.mean()) - eh2) <
        4.0 * std::sqrt(var_h2 / n));
  const double var_q2 = to_double(oracle.self[4]) - eq2 * eq2;
  CHECK(std::fabs(q.raw_moment(2) - eq2) < 4.0 * std::sqrt(var_q2 / n));
}

TEST_CASE("trace format") {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(2);
  c.n_grid = {5};
  c.replicates = 1;
  c.master_seed = 77;
  const std::string csv = trace_replicate(c, 0, 5);
  CHECK(csv.substr(0, csv.find('\n')) == "step,x1,x2,charge,H,Q,range,max_local_time");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows
}

TEST_CASE("throughput floor: 1e7 steps per second per core") {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(3);
  c.n_grid = {250000};
  c.replicates = 8;
  c.master_seed = 1;
  c.observables.energy = true;
  c.observables.self = true;
  c.block_size = 8;
  run(c, 1);  // warm up allocations and caches
  const auto t0 = std::chrono::steady_clock::now();
  run(c, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = 8.0 * 250000.0 / secs;
  CHECK(rate > 1e7);
}

TEST_CASE("LIL extrema runner") {
  const LilExtrema e = lil_run(WalkSpec::simple(1), ChargeKind::Rademacher, 50000, 4);
  CHECK(e.sup_pos > 0.0);
  CHECK(e.sup_neg > 0.0);
  CHECK(e.length == 50000);
  CHECK_THROWS_AS(lil_run(WalkSpec::simple(2), ChargeKind::Rademacher, 1000, 1), ConfigError);
}

#include "cpoly/mc.hpp"

#include <cinttypes>
#include <cstdio>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cpoly {

namespace {

constexpr uint64_t kReservoirTag = 0x72657376u;  // reservoir priority stream

template <class ChargeT>
ChargeT draw_charge(ChargeKind kind, RngState& rng);

template <>
int64_t draw_charge<int64_t>(ChargeKind kind, RngState& rng) {
  (void)kind;  // Rademacher is the only integer charge law
  return rng.rademacher();
}

template <>
double draw_charge<double>(ChargeKind kind, RngState& rng) {
  return kind == ChargeKind::Rademacher ? static_cast<double>(rng.rademacher())
                                        : rng.next_normal();
}

template <class ChargeT>
void simulate_replicate(const ExperimentConfig& cfg, const WalkModel& model,
                        uint64_t replicate, PathAccumulator<ChargeT>* acc,
                        PairAccumulator* pair, const std::vector<Obs>& active,
                        std::vector<double>& buf) {
  RngState rng(cfg.master_seed, replicate);
  const bool charges = cfg.observables.needs_charges();
  const uint64_t nmax = cfg.n_grid.back();
  const size_t nobs = active.size();
  size_t cp = 0;
  const auto& steps = model.steps();
  for (uint64_t step = 1; step <= nmax; ++step) {
    // fixed draw order per round: walk-1 step, charge, walk-2 step
    const int i1 = model.sample_index(rng);
    ChargeT q{};
    if (charges) q = draw_charge<ChargeT>(cfg.charge.kind, rng);
    int i2 = 0;
    if (pair) i2 = model.sample_index(rng);
    if (acc) acc->advance(steps[i1].v, q);
    if (pair) pair->advance_pair(steps[i1].v, steps[i2].v);
    if (step == cfg.n_grid[cp]) {
      std::pair<ChargeT, uint64_t> trunc{};
      if (cfg.observables.needs_truncation())
        trunc = acc->truncated(cfg.truncation.threshold(static_cast<double>(step)));
      for (size_t i = 0; i < nobs; ++i) {
        double v = 0.0;
        switch (active[i]) {
          case Obs::H: v = static_cast<double>(acc->energy()); break;
          case Obs::Q: v = static_cast<double>(acc->self_intersections()); break;
          case Obs::Htrunc: v = static_cast<double>(trunc.first); break;
          case Obs::Qtrunc: v = static_cast<double>(trunc.second); break;
          case Obs::Range: v = static_cast<double>(acc->range()); break;
          case Obs::SupVisits: v = static_cast<double>(acc->sup_visits()); break;
          case Obs::J: v = static_cast<double>(pair->cross_intersections()); break;
        }
        buf[cp * nobs + i] = v;
      }
      ++cp;
    }
  }
}

struct BlockOut {
  std::vector<SummaryStats> stats;  // [obs][checkpoint] flattened
  std::vector<Reservoir> res;
  std::string dump;

  void merge(const BlockOut& o) {
    for (size_t i = 0; i < stats.size(); ++i) {
      stats[i].merge(o.stats[i]);
      res[i].merge(o.res[i]);
    }
    dump += o.dump;
  }
};

template <class ChargeT>
void run_block(const ExperimentConfig& cfg, const WalkModel& model, uint64_t block,
               const std::vector<Obs>& active, bool want_dump, BlockOut& out) {
  const size_t ncp = cfg.n_grid.size();
  const size_t nobs = active.size();
  out.stats.assign(nobs * ncp, SummaryStats{});
  out.res.assign(nobs * ncp, Reservoir(cfg.reservoir_size));

  std::optional<PathAccumulator<ChargeT>> acc;
  std::optional<PairAccumulator> pair;
  const int d = cfg.walk.d;
  if (cfg.observables.needs_walk()) acc.emplace(d);
  if (cfg.observables.cross) pair.emplace(d);

  std::vector<double> buf(ncp * nobs);
  const uint64_t lo = block * cfg.block_size;
  const uint64_t hi = std::min<uint64_t>(cfg.replicates, lo + cfg.block_size);
  char line[64];
  for (uint64_t r = lo; r < hi; ++r) {
    if (acc) acc->reset();
    if (pair) pair->reset();
    simulate_replicate<ChargeT>(cfg, model, r, acc ? &*acc : nullptr,
                                pair ? &*pair : nullptr, active, buf);
    const uint64_t pri = hash3(cfg.master_seed, kReservoirTag, r);
    for (size_t i = 0; i < nobs; ++i)
      for (size_t c = 0; c < ncp; ++c) {
        const double v = buf[c * nobs + i];
        out.stats[i * ncp + c].add(v);
        out.res[i * ncp + c].add(pri, r, v);
      }
    if (want_dump) {
      for (size_t c = 0; c < ncp; ++c) {
        std::snprintf(line, sizeof line, "%" PRIu64 ",%" PRIu64, r, cfg.n_grid[c]);
        out.dump += line;
        for (size_t i = 0; i < nobs; ++i) {
          std::snprintf(line, sizeof line, ",%.17g", buf[c * nobs + i]);
          out.dump += line;
        }
        out.dump += '\n';
      }
    }
  }
}

void merge_tree(std::vector<BlockOut>& blocks, size_t lo, size_t hi) {
  if (hi - lo <= 1) return;
  const size_t mid = lo + (hi - lo) / 2;
  merge_tree(blocks, lo, mid);
  merge_tree(blocks, mid, hi);
  blocks[lo].merge(blocks[mid]);
}

ResultSet run_impl(const ExperimentConfig& cfg, int workers, std::string* dump_csv,
                   bool parallel) {
  cfg.validate();
  const WalkModel model = cfg.walk.build();
  const std::vector<Obs> active = cfg.active();
  const uint64_t nblocks = (cfg.replicates + cfg.block_size - 1) / cfg.block_size;
  const bool want_dump = dump_csv != nullptr;
  const bool integer_charges = cfg.charge.kind == ChargeKind::Rademacher;

  std::vector<BlockOut> blocks(nblocks);
  auto work = [&](uint64_t b) {
    if (integer_charges)
      run_block<int64_t>(cfg, model, b, active, want_dump, blocks[b]);
    else
      run_block<double>(cfg, model, b, active, want_dump, blocks[b]);
  };

  if (parallel) {
#ifdef _OPENMP
    int w = workers;
    if (w <= 0) w = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(w)
    for (int64_t b = 0; b < static_cast<int64_t>(nblocks); ++b) work(b);
#else
    (void)workers;
    for (uint64_t b = 0; b < nblocks; ++b) work(b);
#endif
  } else {
    for (uint64_t b = 0; b < nblocks; ++b) work(b);
  }

  merge_tree(blocks, 0, nblocks);

  ResultSet rs;
  rs.config = cfg;
  const size_t ncp = cfg.n_grid.size();
  for (size_t i = 0; i < active.size(); ++i) {
    ObsSeries s;
    s.stats.assign(blocks[0].stats.begin() + i * ncp, blocks[0].stats.begin() + (i + 1) * ncp);
    s.sample.assign(blocks[0].res.begin() + i * ncp, blocks[0].res.begin() + (i + 1) * ncp);
    rs.series.emplace(active[i], std::move(s));
  }
  if (want_dump) {
    std::string header = "replicate,n";
    for (Obs o : active) {
      header += ',';
      header += kObsNames[static_cast<int>(o)];
    }
    header += '\n';
    *dump_csv = header + blocks[0].dump;
  }
  return rs;
}

}  // namespace

ResultSet run(const ExperimentConfig& config, int workers, std::string* dump_csv) {
  return run_impl(config, workers, dump_csv, true);
}

ResultSet run_serial(const ExperimentConfig& config, std::string* dump_csv) {
  return run_impl(config, 1, dump_csv, false);
}

size_t ResultSet::checkpoint_index(uint64_t n) const {
  for (size_t i = 0; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] == n) return i;
  throw ConfigError("checkpoint " + std::to_string(n) + " not in n_grid");
}

nlohmann::json ResultSet::summary_json(bool include_samples) const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = config.to_json();
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, config_hash(config.to_json()));
  j["config_hash"] = hex;
  nlohmann::json obs = nlohmann::json::object();
  nlohmann::json samples = nlohmann::json::object();
  for (const auto& [o, s] : series) {
    nlohmann::json per_n = nlohmann::json::object();
    nlohmann::json per_n_samples = nlohmann::json::object();
    for (size_t c = 0; c < config.n_grid.size(); ++c) {
      const SummaryStats& st = s.stats[c];
      nlohmann::json e;
      e["count"] = st.count();
      e["mean"] = st.mean();
      e["var"] = st.variance();
      e["m3"] = st.central_moment(3);
      e["m4"] = st.central_moment(4);
      e["m5"] = st.central_moment(5);
      e["m6"] = st.central_moment(6);
      e["min"] = st.min();
      e["max"] = st.max();
      per_n[std::to_string(config.n_grid[c])] = e;
      if (include_samples) per_n_samples[std::to_string(config.n_grid[c])] = s.sample[c].values();
    }
    obs[kObsNames[static_cast<int>(o)]] = per_n;
    if (include_samples) samples[kObsNames[static_cast<int>(o)]] = per_n_samples;
  }
  j["observables"] = obs;
  if (include_samples) j["samples"] = samples;
  return j;
}

std::string trace_replicate(const ExperimentConfig& config, uint64_t replicate,
                            uint64_t n_max) {
  config.validate();
  const WalkModel model = config.walk.build();
  const int d = config.walk.d;
  std::string out = "step";
  for (int a = 0; a < d; ++a) out += ",x" + std::to_string(a + 1);
  out += ",charge,H,Q,range,max_local_time\n";

  RngState rng(config.master_seed, replicate);
  PathAccumulator<double> acc(d);
  char buf[96];
  for (uint64_t step = 1; step <= n_max; ++step) {
    const Coord v = model.sample_step(rng);
    const double q = sample_charge_real(ChargeModel{config.charge.kind}, rng);
    acc.advance(v, q);
    std::snprintf(buf, sizeof buf, "%" PRIu64, step);
    out += buf;
    for (int a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, ",%lld", static_cast<long long>(acc.position()[a]));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%" PRIu64 ",%" PRIu64 ",%u", q,
                  acc.energy(), acc.self_intersections(), acc.range(), acc.sup_visits());
    out += buf;
    out += '\n';
  }
  return out;
}

LilExtrema lil_run(const WalkSpec& walk, ChargeKind charge, uint64_t length, uint64_t seed,
                   uint64_t k_min) {
  const WalkModel model = walk.build();
  const int d = walk.d;
  if (d == 2) throw ConfigError("LIL normalization implemented for d = 1 and d >= 3");
  if (charge != ChargeKind::Rademacher) throw ConfigError("LIL runs use Rademacher charges");
  RngState rng(seed, 0);
  PathAccumulator<int64_t> acc(d);
  LilExtrema out;
  out.length = length;
  for (uint64_t k = 1; k <= length; ++k) {
    const Coord v = model.sample_step(rng);
    const int64_t q = rng.rademacher();
    acc.advance(v, q);
    if (k < k_min) continue;
    const double kk = static_cast<double>(k);
    const double ll = std::log(std::log(kk));
    const double norm = d == 1 ? std::pow(kk * ll, 0.75) : std::sqrt(kk * ll);
    const double h = static_cast<double>(acc.energy());
    out.sup_pos = std::max(out.sup_pos, h / norm);
    out.sup_neg = std::max(out.sup_neg, -h / norm);
  }
  return out;
}

}  // namespace cpoly

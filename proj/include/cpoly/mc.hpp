#pragma once

#include <map>
#include <optional>
#include <string>

#include "cpoly/config.hpp"
#include "cpoly/summary.hpp"

namespace cpoly {

// Per-observable, per-checkpoint statistics of one experiment.
struct ObsSeries {
  std::vector<SummaryStats> stats;    // one per checkpoint
  std::vector<Reservoir> sample;      // bounded uniform subsample per checkpoint
};

struct ResultSet {
  ExperimentConfig config;
  std::map<Obs, ObsSeries> series;

  const SummaryStats& stats(Obs o, size_t checkpoint) const {
    return series.at(o).stats.at(checkpoint);
  }
  std::vector<double> sample_values(Obs o, size_t checkpoint) const {
    return series.at(o).sample.at(checkpoint).values();
  }
  size_t checkpoint_index(uint64_t n) const;

  // {"schema_version", config echo, "observables": {name: {n: {count, mean,
  //  var, m3..m6, min, max}}}, optional "samples"}
  nlohmann::json summary_json(bool include_samples) const;
};

// Run the experiment: replicate r is driven by the rng stream
// (master_seed, r), replicates are grouped into fixed blocks, blocks are
// processed in parallel and merged in block order, so results are
// bit-identical for any worker count. `workers` <= 0 means all cores.
ResultSet run(const ExperimentConfig& config, int workers,
              std::string* dump_csv = nullptr);

// Plain sequential reference (no OpenMP in the loop); must produce exactly
// the same bytes as run() for any worker count.
ResultSet run_serial(const ExperimentConfig& config, std::string* dump_csv = nullptr);

// Trajectory of one replicate as CSV: step, x1..xd, charge, H, Q, range,
// max_local_time.
std::string trace_replicate(const ExperimentConfig& config, uint64_t replicate,
                            uint64_t n_max);

// Running LIL-normalized extrema of the energy along one long path:
// sup over checkpoints k >= k_min of +-H_k / norm(k), where norm(k) is
// (k log log k)^{3/4} for d = 1 and sqrt(k log log k) for d >= 3.
struct LilExtrema {
  double sup_pos = 0.0;
  double sup_neg = 0.0;  // sup of -H_k / norm(k)
  uint64_t length = 0;
};
LilExtrema lil_run(const WalkSpec& walk, ChargeKind charge, uint64_t length,
                   uint64_t seed, uint64_t k_min = 1000);

}  // namespace cpoly

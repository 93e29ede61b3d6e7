// Throughput benchmark: serial reference loop vs the OpenMP block engine
// on the d = 3 simple walk with energy and self-intersection tracking.

#include <chrono>
#include <cstdio>

#include "cpoly/mc.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double run_timed(const cpoly::ExperimentConfig& cfg, bool parallel, int workers) {
  const auto t0 = clock_type::now();
  if (parallel)
    cpoly::run(cfg, workers);
  else
    cpoly::run_serial(cfg);
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  const double steps = static_cast<double>(cfg.replicates) * cfg.n_grid.back();
  return steps / secs;
}

}  // namespace

int main(int argc, char** argv) {
  uint64_t replicates = 64;
  uint64_t n = 1u << 20;
  if (argc > 1) replicates = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2) n = std::strtoull(argv[2], nullptr, 10);

  cpoly::ExperimentConfig cfg;
  cfg.walk = cpoly::WalkSpec::simple(3);
  cfg.n_grid = {n};
  cfg.replicates = replicates;
  cfg.master_seed = 42;
  cfg.observables.energy = true;
  cfg.observables.self = true;
  cfg.block_size = 8;

  std::printf("workload: %llu replicates x %llu steps, d=3 simple walk, H+Q\n",
              static_cast<unsigned long long>(replicates), static_cast<unsigned long long>(n));
  const double serial = run_timed(cfg, false, 1);
  std::printf("serial reference: %.3g steps/s\n", serial);
  for (int w : {1, 2, 4, 8}) {
    const double par = run_timed(cfg, true, w);
    std::printf("openmp %d workers: %.3g steps/s (x%.2f)\n", w, par, par / serial);
  }
  return 0;
}

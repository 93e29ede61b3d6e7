#pragma once

#include <set>

#include "cpoly/stats.hpp"

namespace cpoly::verify {

// Sizes and seeds for the verification suites. Defaults are the shipped
// configuration; a config file overrides individual fields.
struct VerifySpec {
  uint64_t master_seed = 20260809;
  int workers = 0;  // <= 0: all cores

  // constants suite
  double constants_tol = 1e-5;
  int series_k = 2000;
  int conv_radius = 5;
  double lazy_hold = 0.3;

  // d = 3 simple-walk experiment (feeds clt / variance / moments)
  uint64_t d3_replicates = 10000;
  std::vector<uint64_t> d3_fit_ns = {4096, 8192, 16384, 32768, 65536, 131072};
  std::vector<uint64_t> d3_moment_ns = {1000, 3162, 10000, 31623, 100000};
  uint64_t d3_n_lo = 1000, d3_n_hi = 10000, d3_n_mean = 100000;

  uint64_t pair_replicates = 2000;  // mutual-intersection experiment, d = 3

  uint64_t d4_replicates = 4000;
  std::vector<uint64_t> d4_fit_ns = {4096, 8192, 16384, 32768, 65536, 131072};

  // the d = 2 variance plateau sits ~13% below its limit at n = 1e5, so the
  // estimator noise must be kept well under the remaining 2% margin
  uint64_t d2_replicates = 20000;
  uint64_t d2_n = 100000;

  uint64_t d1_replicates = 10000;
  uint64_t d1_n_lo = 25000, d1_n_hi = 100000;

  uint64_t lil_length = 10000000;
  std::vector<uint64_t> lil_seeds = {1, 2, 3};

  bool lazy_checks = true;  // aperiodic model advisory runs
  uint64_t lazy_replicates = 4000;
  uint64_t lazy_n = 10000;

  // exact suite
  int exact_identity_n_max = 10;
  int exact_moment_n_max = 8;
  std::vector<int> prop_n = {4, 5, 6};
  std::vector<int> prop_m = {2, 3, 4};
  std::vector<double> prop_K = {2, 3, -1};  // -1 means no truncation
  std::vector<int> maximal_n = {4, 5, 6};
  std::vector<double> maximal_st = {0, 1, 2};
  int path_check_paths = 1000;
  uint64_t path_check_n = 1000;

  static VerifySpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

inline const std::set<std::string> kAllSuites = {"exact", "constants", "clt",
                                                 "variance", "moments", "lil"};

struct VerifyOutcome {
  std::vector<stats::VerificationReport> reports;
  bool pass = false;
  nlohmann::json to_json() const;
  std::string text() const;  // timestamp-free, byte-reproducible
};

// Runs the requested suites ("all" expands). Experiments are shared across
// suites; every output is a pure function of (spec, suites).
VerifyOutcome run_verify(const VerifySpec& spec, std::set<std::string> suites);

}  // namespace cpoly::verify

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cpoly/observables.hpp"
#include "cpoly/walk.hpp"

namespace cpoly {

// {"kind": "simple"|"lazy"|"custom", "d": int, "hold": float?,
//  "steps": [[[v...], num, den], ...]?}
struct WalkSpec {
  std::string kind = "simple";
  int d = 1;
  double hold = 0.5;
  std::vector<StepEntry> steps;  // custom only

  WalkModel build() const;
  static WalkSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static WalkSpec simple(int d) {
    WalkSpec w;
    w.kind = "simple";
    w.d = d;
    return w;
  }
  static WalkSpec lazy(int d, double hold) {
    WalkSpec w;
    w.kind = "lazy";
    w.d = d;
    w.hold = hold;
    return w;
  }
};

struct ChargeSpec {
  ChargeKind kind = ChargeKind::Rademacher;
  static ChargeSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ObservableSet {
  bool energy = true;
  bool self = true;
  bool energy_trunc = false;
  bool self_trunc = false;
  bool range = false;
  bool sup_visits = false;
  bool cross = false;  // mutual intersections of an independent pair

  bool needs_walk() const {
    return energy || self || energy_trunc || self_trunc || range || sup_visits;
  }
  bool needs_charges() const { return energy || energy_trunc; }
  bool needs_truncation() const { return energy_trunc || self_trunc; }
  static ObservableSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Observable names used in summaries and dumps.
inline const char* kObsNames[] = {"H", "Q", "Htrunc", "Qtrunc", "range", "max_local_time", "J"};
enum class Obs { H = 0, Q, Htrunc, Qtrunc, Range, SupVisits, J };

struct ExperimentConfig {
  WalkSpec walk;
  ChargeSpec charge;
  std::vector<uint64_t> n_grid;  // strictly increasing checkpoint lengths
  uint64_t replicates = 1;
  uint64_t master_seed = 1;
  ObservableSet observables;
  TruncationRule truncation;
  size_t reservoir_size = 100000;
  uint64_t block_size = 1024;  // replicates per work block (fixed by config,
                               // not by worker count, for determinism)

  void validate() const;
  std::vector<Obs> active() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// FNV-1a of the canonical JSON dump; stable across runs.
uint64_t config_hash(const nlohmann::json& j);

}  // namespace cpoly

#include "cpoly/config.hpp"

namespace cpoly {

WalkModel WalkSpec::build() const {
  if (kind == "simple") return WalkModel::simple(d);
  if (kind == "lazy") return WalkModel::lazy(d, hold);
  if (kind == "custom") return WalkModel::custom(d, steps);
  throw ConfigError("unknown walk kind '" + kind + "'");
}

WalkSpec WalkSpec::from_json(const nlohmann::json& j) {
  WalkSpec w;
  w.kind = j.value("kind", "simple");
  if (!j.contains("d")) throw ConfigError("walk spec needs \"d\"");
  w.d = j.at("d").get<int>();
  if (w.kind == "lazy") {
    if (!j.contains("hold")) throw ConfigError("lazy walk needs \"hold\"");
    w.hold = j.at("hold").get<double>();
  }
  if (w.kind == "custom") {
    if (!j.contains("steps")) throw ConfigError("custom walk needs \"steps\"");
    for (const auto& row : j.at("steps")) {
      if (!row.is_array() || row.size() != 3)
        throw ConfigError("custom step rows are [[v...], num, den]");
      StepEntry e;
      const auto& vec = row[0];
      if (static_cast<int>(vec.size()) != w.d)
        throw ConfigError("step vector length must equal d");
      for (size_t i = 0; i < vec.size(); ++i) e.v[i] = vec[i].get<int64_t>();
      e.num = row[1].get<int64_t>();
      e.den = row[2].get<int64_t>();
      w.steps.push_back(e);
    }
  }
  return w;
}

nlohmann::json WalkSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["d"] = d;
  if (kind == "lazy") j["hold"] = hold;
  if (kind == "custom") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : steps) {
      nlohmann::json v = nlohmann::json::array();
      for (int i = 0; i < d; ++i) v.push_back(e.v[i]);
      rows.push_back(nlohmann::json::array({v, e.num, e.den}));
    }
    j["steps"] = rows;
  }
  return j;
}

ChargeSpec ChargeSpec::from_json(const nlohmann::json& j) {
  ChargeSpec c;
  const std::string k = j.value("kind", "rademacher");
  if (k == "rademacher")
    c.kind = ChargeKind::Rademacher;
  else if (k == "gaussian")
    c.kind = ChargeKind::Gaussian;
  else
    throw ConfigError("unknown charge kind '" + k + "'");
  return c;
}

nlohmann::json ChargeSpec::to_json() const {
  return {{"kind", kind == ChargeKind::Rademacher ? "rademacher" : "gaussian"}};
}

ObservableSet ObservableSet::from_json(const nlohmann::json& j) {
  ObservableSet o;
  o.energy = j.value("H", true);
  o.self = j.value("Q", true);
  o.energy_trunc = j.value("Htrunc", false);
  o.self_trunc = j.value("Qtrunc", false);
  o.range = j.value("range", false);
  o.sup_visits = j.value("max_local_time", false);
  o.cross = j.value("J", false);
  return o;
}

nlohmann::json ObservableSet::to_json() const {
  nlohmann::json j;
  j["H"] = energy;
  j["Q"] = self;
  j["Htrunc"] = energy_trunc;
  j["Qtrunc"] = self_trunc;
  j["range"] = range;
  j["max_local_time"] = sup_visits;
  j["J"] = cross;
  return j;
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (size_t i = 0; i + 1 < n_grid.size(); ++i)
    if (n_grid[i] >= n_grid[i + 1]) throw ConfigError("n_grid must be strictly increasing");
  if (n_grid.front() == 0) throw ConfigError("n_grid entries must be positive");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  if (!observables.needs_walk() && !observables.cross)
    throw ConfigError("no observables selected");
  walk.build();  // validates the walk spec
}

std::vector<Obs> ExperimentConfig::active() const {
  std::vector<Obs> v;
  if (observables.energy) v.push_back(Obs::H);
  if (observables.self) v.push_back(Obs::Q);
  if (observables.energy_trunc) v.push_back(Obs::Htrunc);
  if (observables.self_trunc) v.push_back(Obs::Qtrunc);
  if (observables.range) v.push_back(Obs::Range);
  if (observables.sup_visits) v.push_back(Obs::SupVisits);
  if (observables.cross) v.push_back(Obs::J);
  return v;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.contains("walk")) throw ConfigError("config needs \"walk\"");
  c.walk = WalkSpec::from_json(j.at("walk"));
  if (j.contains("charge")) c.charge = ChargeSpec::from_json(j.at("charge"));
  if (!j.contains("n_grid")) throw ConfigError("config needs \"n_grid\"");
  c.n_grid = j.at("n_grid").get<std::vector<uint64_t>>();
  c.replicates = j.value("replicates", uint64_t{1});
  c.master_seed = j.value("master_seed", uint64_t{1});
  if (j.contains("observables")) c.observables = ObservableSet::from_json(j.at("observables"));
  if (j.contains("truncation")) {
    const auto& t = j.at("truncation");
    c.truncation.d = c.walk.d;
    c.truncation.scale = t.value("M", 1.0);
    const std::string bn = t.value("bn", "loglog");
    if (bn == "loglog")
      c.truncation.bn = TruncationRule::Bn::LogLog;
    else if (bn == "log")
      c.truncation.bn = TruncationRule::Bn::Log;
    else if (bn == "const")
      c.truncation.bn = TruncationRule::Bn::Const;
    else
      throw ConfigError("truncation bn must be loglog|log|const");
  } else {
    c.truncation.d = c.walk.d;
  }
  c.reservoir_size = j.value("reservoir_size", size_t{100000});
  c.block_size = j.value("block_size", uint64_t{1024});
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["walk"] = walk.to_json();
  j["charge"] = charge.to_json();
  j["n_grid"] = n_grid;
  j["replicates"] = replicates;
  j["master_seed"] = master_seed;
  j["observables"] = observables.to_json();
  nlohmann::json t;
  t["M"] = truncation.scale;
  t["bn"] = truncation.bn == TruncationRule::Bn::LogLog
                ? "loglog"
                : (truncation.bn == TruncationRule::Bn::Log ? "log" : "const");
  j["truncation"] = t;
  j["reservoir_size"] = reservoir_size;
  j["block_size"] = block_size;
  return j;
}

uint64_t config_hash(const nlohmann::json& j) {
  const std::string s = j.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cpoly

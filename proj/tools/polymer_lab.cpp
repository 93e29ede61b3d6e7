// Command-line front end: simulate | exact | constants | verify | report.
// Exit codes: 0 success, 1 check failure, 2 usage or config error.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cpoly/exact.hpp"
#include "cpoly/green.hpp"
#include "cpoly/mc.hpp"
#include "cpoly/report.hpp"
#include "cpoly/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cpoly::ConfigError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

struct OutputDir {
  fs::path dir;
  std::vector<std::string> files;

  explicit OutputDir(const std::string& d) : dir(d) { fs::create_directories(dir); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("failed to write " + (dir / name).string());
    files.push_back(name);
  }

  // Summaries and reports are reproducible byte-for-byte; the manifest
  // carries the only timestamps and is excluded from that contract.
  void manifest(const json& config_echo, uint64_t master_seed) {
    json m;
    m["schema_version"] = 1;
    m["tool_version"] = kVersion;
    m["config_hash"] = [&] {
      char hex[32];
      std::snprintf(hex, sizeof hex, "%016llx",
                    static_cast<unsigned long long>(cpoly::config_hash(config_echo)));
      return std::string(hex);
    }();
    m["master_seed"] = master_seed;
    m["timestamp"] = static_cast<int64_t>(std::time(nullptr));
    m["outputs"] = files;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
  }
};

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int workers,
                 int64_t seed_override, const std::string& dump_dir, uint64_t trace_n) {
  json cfg_json = load_json(config_path);
  if (seed_override >= 0) cfg_json["master_seed"] = static_cast<uint64_t>(seed_override);
  cpoly::ExperimentConfig cfg = cpoly::ExperimentConfig::from_json(cfg_json);

  std::string dump;
  cpoly::ResultSet rs = cpoly::run(cfg, workers, dump_dir.empty() ? nullptr : &dump);

  OutputDir out(out_dir);
  out.write("summary.json", rs.summary_json(true).dump(2) + "\n");
  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    std::ofstream d(fs::path(dump_dir) / "replicates.csv", std::ios::binary);
    d << dump;
    if (!d) throw std::runtime_error("failed to write replicate dump");
  }
  if (trace_n > 0) out.write("trace.csv", cpoly::trace_replicate(cfg, 0, trace_n));
  out.manifest(cfg.to_json(), cfg.master_seed);
  std::cout << (out.dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_exact(const std::string& walk_kind, int d, double hold, int n, int m,
              const std::string& quantity, const std::string& K_str,
              const std::string& out_dir) {
  cpoly::WalkSpec w;
  w.kind = walk_kind;
  w.d = d;
  w.hold = hold;
  const cpoly::WalkModel model = w.build();
  double K = cpoly::exact::kNoTruncation;
  if (!K_str.empty() && K_str != "inf") K = std::stod(K_str);
  const auto q = cpoly::exact::quantity_from_name(quantity);
  const cpoly::exact::MomentReport rep = cpoly::exact::moment_report(model, q, n, m, K);
  const std::string text = rep.to_json().dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) {
    OutputDir out(out_dir);
    out.write("exact.json", text);
    out.manifest(rep.to_json(), 0);
  }
  return 0;
}

int cmd_constants(const std::string& walk_kind, int d, double hold, double tol,
                  const std::string& out_dir) {
  cpoly::WalkSpec w;
  w.kind = walk_kind;
  w.d = d;
  w.hold = hold;
  const cpoly::green::LimitConstants c = cpoly::green::limit_constants(w.build(), tol);
  const std::string text = c.to_json().dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) {
    OutputDir out(out_dir);
    out.write("constants.json", text);
    out.manifest(c.to_json(), 0);
  }
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& suite,
               const std::string& out_dir, int workers, int64_t seed_override) {
  cpoly::verify::VerifySpec spec;
  if (!config_path.empty()) spec = cpoly::verify::VerifySpec::from_json(load_json(config_path));
  if (workers != 0) spec.workers = workers;
  if (seed_override >= 0) spec.master_seed = static_cast<uint64_t>(seed_override);

  std::set<std::string> suites = {suite};
  cpoly::verify::VerifyOutcome outcome = cpoly::verify::run_verify(spec, suites);
  std::cout << outcome.text();
  if (!out_dir.empty()) {
    OutputDir out(out_dir);
    out.write("verify.json", outcome.to_json().dump(2) + "\n");
    out.write("verify.txt", outcome.text());
    out.manifest(spec.to_json(), spec.master_seed);
  }
  return outcome.pass ? 0 : 1;
}

int cmd_report(const std::string& summary_path, const std::string& out_dir, int bins) {
  const json summary = load_json(summary_path);
  OutputDir out(out_dir);
  for (auto it = summary.at("observables").begin(); it != summary.at("observables").end();
       ++it) {
    out.write("variance_" + it.key() + ".csv",
              cpoly::report::variance_curve_csv(summary, it.key()));
    if (summary.contains("samples") && summary.at("samples").contains(it.key())) {
      const auto& per_n = summary.at("samples").at(it.key());
      for (auto nit = per_n.begin(); nit != per_n.end(); ++nit)
        out.write("hist_" + it.key() + "_" + nit.key() + ".csv",
                  cpoly::report::histogram_from_summary(summary, it.key(), nit.key(), bins));
    }
  }
  out.manifest(summary.value("config", json::object()), 0);
  std::cout << out.dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charged-polymer lattice laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", dump_dir, suite = "all";
  std::string walk_kind = "simple", quantity = "Q", K_str = "inf", summary_path;
  int workers = 0, d = 1, n = 4, m = 1, bins = 61;
  double hold = 0.5, tol = 1e-5;
  int64_t seed = -1;
  uint64_t trace_n = 0;

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  sim->add_option("--config", config_path, "experiment config JSON")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--workers", workers, "worker threads (0 = all cores)");
  sim->add_option("--seed", seed, "override master seed");
  sim->add_option("--dump", dump_dir, "write per-replicate CSV here");
  sim->add_option("--trace", trace_n, "dump replicate 0 trajectory up to this length");

  auto* ex = app.add_subcommand("exact", "exact enumeration moments");
  ex->add_option("--walk", walk_kind, "simple|lazy");
  ex->add_option("--d", d, "dimension");
  ex->add_option("--hold", hold, "lazy hold probability");
  ex->add_option("--n", n, "path length")->required();
  ex->add_option("--m", m, "moment order")->required();
  ex->add_option("--quantity", quantity, "H|Q|Htrunc|Qtrunc");
  ex->add_option("--K", K_str, "truncation ceiling or inf");
  ex->add_option("--out", out_dir, "optional output directory")->default_val("");

  auto* co = app.add_subcommand("constants", "limit-law constants");
  co->add_option("--walk", walk_kind, "simple|lazy");
  co->add_option("--d", d, "dimension")->required();
  co->add_option("--hold", hold, "lazy hold probability");
  co->add_option("--tol", tol, "quadrature tolerance");
  co->add_option("--out", out_dir, "optional output directory")->default_val("");

  auto* ve = app.add_subcommand("verify", "verification suites");
  ve->add_option("--suite", suite, "exact|constants|clt|variance|moments|lil|all");
  ve->add_option("--config", config_path, "suite sizing JSON (defaults are shipped sizes)");
  ve->add_option("--out", out_dir, "output directory")->default_val("");
  ve->add_option("--workers", workers, "worker threads (0 = all cores)");
  ve->add_option("--seed", seed, "override master seed");

  auto* re = app.add_subcommand("report", "plot-data CSVs from a summary");
  re->add_option("--summary", summary_path, "summary.json from simulate")->required();
  re->add_option("--out", out_dir, "output directory");
  re->add_option("--bins", bins, "histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help / --version
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, workers, seed, dump_dir, trace_n);
    if (ex->parsed()) return cmd_exact(walk_kind, d, hold, n, m, quantity, K_str, out_dir);
    if (co->parsed()) return cmd_constants(walk_kind, d, hold, tol, out_dir);
    if (ve->parsed()) return cmd_verify(config_path, suite, out_dir, workers, seed);
    if (re->parsed()) return cmd_report(summary_path, out_dir, bins);
  } catch (const cpoly::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cpoly::exact::SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

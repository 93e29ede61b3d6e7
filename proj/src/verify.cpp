#include "cpoly/verify.hpp"

#include <optional>

#include "cpoly/exact.hpp"

namespace cpoly::verify {

namespace {

constexpr uint64_t kExperimentTag = 0x65787074u;
constexpr uint64_t kLilTag = 0x6c696cu;
constexpr uint64_t kPathTag = 0x70617468u;

constexpr double kGammaSimpleD3 = 0.5163860;  // quadrature/series anchor, d=3 simple walk

using stats::CheckRecord;
using stats::VerificationReport;

CheckRecord count_check(std::string name, uint64_t failures, std::string law) {
  CheckRecord c;
  c.name = std::move(name);
  c.observed = static_cast<double>(failures);
  c.target = 0.0;
  c.pass = failures == 0;
  c.law = std::move(law);
  return c;
}

std::vector<uint64_t> sorted_union(std::initializer_list<std::vector<uint64_t>> lists) {
  std::vector<uint64_t> out;
  for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- exact identity / inequality suite -----------------------------------

VerificationReport exact_suite(const VerifySpec& v) {
  VerificationReport rep;
  rep.suite = "exact";
  const WalkModel line = WalkModel::simple(1);

  {  // E[Lambda_n^2] = 2n(n-1) exactly
    uint64_t failures = 0;
    for (int n = 2; n <= v.exact_identity_n_max; ++n)
      if (!exact::check_pair_sum_moments(n, 2).identity_ok) ++failures;
    rep.add(count_check("pair-sum second moment = 2n(n-1), n=2.." +
                            std::to_string(v.exact_identity_n_max),
                        failures, "charge-square-identity"));
  }
  {  // fitted constant bounded over the grid: per moment order the minimal
     // feasible C converges in n (shrinking increments), and the sup stays
     // of order one
    const int n_max = std::max(6, v.exact_identity_n_max);
    bool converging = true;
    double sup = 1.0;
    for (int m = 3; m <= 6; ++m) {
      const double c2 = exact::check_pair_sum_moments(n_max - 2, m).c_min;
      const double c1 = exact::check_pair_sum_moments(n_max - 1, m).c_min;
      const double c0 = exact::check_pair_sum_moments(n_max, m).c_min;
      if (c0 - c1 > (c1 - c2) + 1e-12) converging = false;
      sup = std::max(sup, c0);
    }
    CheckRecord c;
    c.name = "fitted moment constant bounded over grid";
    c.observed = sup;
    c.target = 4.0;
    c.pass = converging && sup < 4.0;
    c.law = "charge-square-moment-bound";
    rep.add(c);
  }

  {  // exact energy moments, d = 1 simple walk
    uint64_t failures = 0;
    for (int n = 2; n <= v.exact_moment_n_max; ++n) {
      const exact::ExactSummary s = exact::enumerate_summary(line, n, 2);
      if (!s.energy[1].is_zero()) ++failures;
      if (s.energy[2] != s.self[1]) ++failures;
      if (s.total_probability != 1) ++failures;
    }
    rep.add(count_check("E H = 0 and E H^2 = E Q, n=2.." +
                            std::to_string(v.exact_moment_n_max),
                        failures, "conditional-variance-identity"));
  }
  {  // truncated energy: zero mean, nonnegative odd moments
    uint64_t failures = 0;
    for (int n = 2; n <= v.exact_moment_n_max; ++n) {
      for (double K : {1.0, 2.0, 3.0, exact::kNoTruncation}) {
        const exact::ExactSummary s = exact::enumerate_summary(line, n, 5, K);
        if (!s.energy_trunc[1].is_zero()) ++failures;
        if (s.energy_trunc[3] < 0) ++failures;
        if (s.energy_trunc[5] < 0) ++failures;
      }
    }
    rep.add(count_check("E Ht = 0 and odd moments >= 0 (K in {1,2,3,inf})", failures,
                        "truncated-energy-moments"));
  }

  {  // moment comparison inequalities
    uint64_t failures = 0;
    uint64_t cases = 0;
    for (int n : v.prop_n)
      for (int m : v.prop_m)
        for (double K : v.prop_K) {
          const double kk = K < 0 ? exact::kNoTruncation : K;
          ++cases;
          if (!exact::check_moment_comparison(line, n, m, kk).pass()) ++failures;
        }
    rep.add(count_check("moment comparison inequalities (" + std::to_string(cases) +
                            " cases)",
                        failures, "energy-silt-moment-comparison"));
  }

  {  // reflection-type maximal inequality
    uint64_t failures = 0;
    uint64_t cases = 0;
    for (int n : v.maximal_n)
      for (double s : v.maximal_st)
        for (double t : v.maximal_st) {
          ++cases;
          if (!exact::check_maximal_inequality(line, n, s, t).ok) ++failures;
        }
    rep.add(count_check("maximal inequality (" + std::to_string(cases) + " cases)",
                        failures, "energy-maximal-inequality"));
  }

  {  // per-path identities on random paths
    uint64_t failures = 0;
    for (int d : {1, 2, 3}) {
      const WalkModel w = WalkModel::simple(d);
      RngState rng(v.master_seed, hash3(v.master_seed, kPathTag, d));
      PathAccumulator<int64_t> acc(d);
      for (int p = 0; p < v.path_check_paths; ++p) {
        acc.reset();
        for (uint64_t k = 0; k < v.path_check_n; ++k)
          acc.advance(w.sample_step(rng), rng.rademacher());
        const auto [l2, c2] = acc.sum_of_squares();
        const int64_t n = static_cast<int64_t>(v.path_check_n);
        if (2 * acc.energy() + n != c2) ++failures;
        if (2 * acc.self_intersections() != l2 - static_cast<uint64_t>(n)) ++failures;
        if (2 * acc.self_intersections() >
            static_cast<uint64_t>(n) * acc.sup_visits())
          ++failures;
      }
    }
    rep.add(count_check("per-path identities, 1000 paths per d in {1,2,3}", failures,
                        "pathwise-identities"));
  }
  return rep;
}

// ---- limit constants suite ------------------------------------------------

VerificationReport constants_suite(const VerifySpec& v,
                                   const green::LimitConstants& c3,
                                   const green::LimitConstants& c3_lazy,
                                   const green::LimitConstants& c4) {
  VerificationReport rep;
  rep.suite = "constants";
  const double tol = v.constants_tol;
  const WalkModel simple3 = WalkModel::simple(3);
  const WalkModel lazy3 = WalkModel::lazy(3, v.lazy_hold);

  {
    CheckRecord c;
    c.name = "gamma(simple, d=3) quadrature";
    c.observed = c3.gamma;
    c.target = kGammaSimpleD3;
    c.tol = 1e-4;
    c.pass = std::fabs(c.observed - c.target) <= c.tol;
    c.law = "green-origin";
    rep.add(c);
  }
  const std::pair<const WalkModel*, const green::LimitConstants*> routes[2] = {
      {&simple3, &c3}, {&lazy3, &c3_lazy}};
  for (const auto& [model, consts] : routes) {
    const green::SeriesGamma sg = green::gamma_series(*model, v.series_k);
    CheckRecord c;
    c.name = "gamma quadrature vs series, " + model->describe();
    c.observed = consts->gamma;
    c.target = sg.value;
    c.tol = 1e-4;
    c.pass = std::fabs(c.observed - c.target) <= c.tol;
    c.law = "green-dual-route";
    rep.add(c);
  }

  {  // one-step convolution identity of G
    green::GreensTable table(simple3, v.conv_radius + 1, tol);
    double worst = 0.0;
    Coord x{};
    for (int a = -v.conv_radius; a <= v.conv_radius; ++a)
      for (int b = -v.conv_radius; b <= v.conv_radius; ++b)
        for (int cdx = -v.conv_radius; cdx <= v.conv_radius; ++cdx) {
          x[0] = a;
          x[1] = b;
          x[2] = cdx;
          double p1 = 0.0, conv = 0.0;
          for (const auto& e : simple3.steps()) {
            Coord y = x;
            for (int i = 0; i < 3; ++i) y[i] -= e.v[i];
            conv += e.p * table.at(y).value;
            bool is_step = true;
            for (int i = 0; i < 3; ++i)
              if (e.v[i] != x[i]) is_step = false;
            if (is_step) p1 = e.p;
          }
          worst = std::max(worst, std::fabs(table.at(x).value - p1 - conv));
        }
    CheckRecord c;
    c.name = "convolution identity residual, |x|inf <= " + std::to_string(v.conv_radius);
    c.observed = worst;
    c.target = 10.0 * tol;
    c.pass = worst <= c.target;
    c.law = "green-convolution";
    rep.add(c);

    // coordinate-relabel invariance of the table values
    double perm_worst = 0.0;
    const int64_t pts[3] = {1, 2, 3};
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Coord base{};
    base[0] = pts[0];
    base[1] = pts[1];
    base[2] = pts[2];
    const double g0 = table.at(base).value;
    for (const auto& p : perms) {
      Coord y{};
      for (int i = 0; i < 3; ++i) y[i] = pts[p[i]];
      perm_worst = std::max(perm_worst, std::fabs(table.at(y).value - g0));
    }
    CheckRecord pc;
    pc.name = "axis-relabel invariance of G";
    pc.observed = perm_worst;
    pc.target = 2.0 * tol;
    pc.pass = perm_worst <= pc.target;
    pc.law = "green-symmetry";
    rep.add(pc);
  }

  {  // large-x decay against the closed-form asymptote
    Coord x{};
    x[0] = 10;
    x[1] = 10;
    x[2] = 10;
    const green::GreenValue g = green::green(simple3, x, tol);
    CheckRecord c = {};
    c.name = "G decay vs asymptote at <x,Gamma^-1 x>^(1/2) = 30";
    c.observed = g.value / green::asymptotic_green(simple3, x);
    c.target = 1.0;
    c.tol = 0.05;
    c.pass = std::fabs(c.observed - 1.0) <= 0.05;
    c.law = "green-asymptotics";
    rep.add(c);
  }

  {  // d = 4: the cubic lattice sum only adds mass
    CheckRecord c;
    c.name = "lambda2^2 >= 3 G(0)^2 + G(0) (d=4)";
    c.observed = c4.var_q_scale;
    c.target = 3.0 * c4.gamma * c4.gamma + c4.gamma;
    c.pass = c.observed >= c.target;
    c.law = "silt-variance-d4plus";
    rep.add(c);
  }

  {  // named Brownian local-time constant re-derived by quadrature
    CheckRecord c;
    c.name = "mean squared-local-time constant re-derivation";
    c.observed = green::mean_squared_local_time_by_quadrature();
    c.target = green::kMeanSquaredLocalTime;
    c.tol = 1e-12;
    c.pass = std::fabs(c.observed - c.target) <= c.tol;
    c.law = "brownian-local-time";
    rep.add(c);
  }

  {  // d = 1 / d = 2 closed forms against independent decimals
    const green::LimitConstants c1 = green::limit_constants(WalkModel::simple(1), tol);
    const green::LimitConstants c2 = green::limit_constants(WalkModel::simple(2), tol);
    CheckRecord a;
    a.name = "d=1 energy variance scale";
    a.observed = c1.clt_var;
    a.target = 0.5319230405352283;
    a.tol = 1e-9;
    a.pass = std::fabs(a.observed - a.target) <= a.tol;
    a.law = "energy-scaling-d1";
    rep.add(a);
    CheckRecord b;
    b.name = "d=2 energy variance scale = 1/pi";
    b.observed = c2.clt_var;
    b.target = 1.0 / 3.14159265358979323846;
    b.tol = 1e-12;
    b.pass = std::fabs(b.observed - b.target) <= b.tol;
    b.law = "energy-clt-d2";
    rep.add(b);

    // deviation-rate plug-in values
    CheckRecord r1;
    r1.name = "deviation rate d=1 at lambda=1/3";
    r1.observed = green::md_rate(c1, 1.0 / 3.0);
    r1.target = -0.5;
    r1.tol = 1e-12;
    r1.pass = std::fabs(r1.observed - r1.target) <= r1.tol;
    r1.law = "md-rate-d1";
    rep.add(r1);
    CheckRecord r2;
    r2.name = "deviation rate d=2 at lambda=1";
    r2.observed = green::md_rate(c2, 1.0);
    r2.target = -0.5 * 3.14159265358979323846;
    r2.tol = 1e-12;
    r2.pass = std::fabs(r2.observed - r2.target) <= r2.tol;
    r2.law = "md-rate-d2";
    rep.add(r2);
    CheckRecord r3;
    r3.name = "deviation rate d=3 at lambda=sqrt(2 gamma)";
    r3.observed = green::md_rate(c3, std::sqrt(2.0 * c3.gamma));
    r3.target = -1.0;
    r3.tol = 1e-9;
    r3.pass = std::fabs(r3.observed - r3.target) <= r3.tol;
    r3.law = "md-rate-d3plus";
    rep.add(r3);
  }
  return rep;
}

VerificationReport lazy_advisory_suite(const VerifySpec& v, const ResultSet& rs,
                                       const green::LimitConstants& c) {
  VerificationReport rep;
  rep.suite = "clt_d3_lazy";
  const uint64_t n = v.lazy_n;
  const size_t ci = rs.checkpoint_index(n);
  CheckRecord a;
  a.name = "lazy walk: mean Q/n vs gamma at n=" + std::to_string(n);
  a.observed = rs.stats(Obs::Q, ci).mean() / static_cast<double>(n);
  a.target = c.gamma;
  a.tol = 0.05 * c.gamma;
  a.pass = std::fabs(a.observed - a.target) <= a.tol;
  a.mandatory = false;
  a.law = "mean-silt-d3";
  a.note = "aperiodicity probe";
  rep.add(a);

  std::vector<double> h = rs.sample_values(Obs::H, ci);
  const double scale = std::sqrt(c.gamma * static_cast<double>(n));
  for (double& x : h) x /= scale;
  CheckRecord b;
  b.name = "lazy walk: KS of H/sqrt(gamma n)";
  b.observed = stats::ks_statistic(h, stats::normal_cdf);
  b.target = 0.07;
  b.pass = b.observed <= b.target;
  b.mandatory = false;
  b.law = "energy-clt-d3";
  rep.add(b);
  return rep;
}

// ---- experiment definitions ------------------------------------------------

ExperimentConfig d3_experiment(const VerifySpec& v) {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(3);
  c.n_grid = sorted_union(
      {v.d3_fit_ns, v.d3_moment_ns, {v.d3_n_lo, v.d3_n_hi, v.d3_n_mean}});
  c.replicates = v.d3_replicates;
  c.master_seed = hash3(v.master_seed, kExperimentTag, 1);
  c.observables.energy = true;
  c.observables.self = true;
  c.observables.range = true;
  return c;
}

ExperimentConfig pair_experiment(const VerifySpec& v) {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(3);
  c.n_grid = v.d3_moment_ns;
  c.replicates = v.pair_replicates;
  c.master_seed = hash3(v.master_seed, kExperimentTag, 2);
  c.observables = {};
  c.observables.energy = false;
  c.observables.self = false;
  c.observables.cross = true;
  return c;
}

ExperimentConfig d4_experiment(const VerifySpec& v) {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(4);
  c.n_grid = v.d4_fit_ns;
  c.replicates = v.d4_replicates;
  c.master_seed = hash3(v.master_seed, kExperimentTag, 3);
  c.observables.energy = false;
  c.observables.self = true;
  return c;
}

ExperimentConfig d2_experiment(const VerifySpec& v) {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(2);
  c.n_grid = {v.d2_n};
  c.replicates = v.d2_replicates;
  c.master_seed = hash3(v.master_seed, kExperimentTag, 4);
  c.observables.energy = true;
  c.observables.self = false;
  return c;
}

ExperimentConfig d1_experiment(const VerifySpec& v) {
  ExperimentConfig c;
  c.walk = WalkSpec::simple(1);
  c.n_grid = {v.d1_n_lo, v.d1_n_hi};
  c.replicates = v.d1_replicates;
  c.master_seed = hash3(v.master_seed, kExperimentTag, 5);
  c.observables.energy = true;
  c.observables.self = false;
  return c;
}

ExperimentConfig lazy_experiment(const VerifySpec& v) {
  ExperimentConfig c;
  c.walk = WalkSpec::lazy(3, v.lazy_hold);
  c.n_grid = {v.lazy_n};
  c.replicates = v.lazy_replicates;
  c.master_seed = hash3(v.master_seed, kExperimentTag, 6);
  c.observables.energy = true;
  c.observables.self = true;
  return c;
}

}  // namespace

VerifySpec VerifySpec::from_json(const nlohmann::json& j) {
  VerifySpec v;
  v.master_seed = j.value("master_seed", v.master_seed);
  v.workers = j.value("workers", v.workers);
  v.constants_tol = j.value("constants_tol", v.constants_tol);
  v.series_k = j.value("series_k", v.series_k);
  v.conv_radius = j.value("conv_radius", v.conv_radius);
  v.lazy_hold = j.value("lazy_hold", v.lazy_hold);
  v.d3_replicates = j.value("d3_replicates", v.d3_replicates);
  if (j.contains("d3_fit_ns")) v.d3_fit_ns = j.at("d3_fit_ns").get<std::vector<uint64_t>>();
  if (j.contains("d3_moment_ns"))
    v.d3_moment_ns = j.at("d3_moment_ns").get<std::vector<uint64_t>>();
  v.d3_n_lo = j.value("d3_n_lo", v.d3_n_lo);
  v.d3_n_hi = j.value("d3_n_hi", v.d3_n_hi);
  v.d3_n_mean = j.value("d3_n_mean", v.d3_n_mean);
  v.pair_replicates = j.value("pair_replicates", v.pair_replicates);
  v.d4_replicates = j.value("d4_replicates", v.d4_replicates);
  if (j.contains("d4_fit_ns")) v.d4_fit_ns = j.at("d4_fit_ns").get<std::vector<uint64_t>>();
  v.d2_replicates = j.value("d2_replicates", v.d2_replicates);
  v.d2_n = j.value("d2_n", v.d2_n);
  v.d1_replicates = j.value("d1_replicates", v.d1_replicates);
  v.d1_n_lo = j.value("d1_n_lo", v.d1_n_lo);
  v.d1_n_hi = j.value("d1_n_hi", v.d1_n_hi);
  v.lil_length = j.value("lil_length", v.lil_length);
  if (j.contains("lil_seeds")) v.lil_seeds = j.at("lil_seeds").get<std::vector<uint64_t>>();
  v.lazy_checks = j.value("lazy_checks", v.lazy_checks);
  v.lazy_replicates = j.value("lazy_replicates", v.lazy_replicates);
  v.lazy_n = j.value("lazy_n", v.lazy_n);
  v.exact_identity_n_max = j.value("exact_identity_n_max", v.exact_identity_n_max);
  v.exact_moment_n_max = j.value("exact_moment_n_max", v.exact_moment_n_max);
  if (j.contains("prop_n")) v.prop_n = j.at("prop_n").get<std::vector<int>>();
  if (j.contains("prop_m")) v.prop_m = j.at("prop_m").get<std::vector<int>>();
  if (j.contains("prop_K")) v.prop_K = j.at("prop_K").get<std::vector<double>>();
  if (j.contains("maximal_n")) v.maximal_n = j.at("maximal_n").get<std::vector<int>>();
  if (j.contains("maximal_st"))
    v.maximal_st = j.at("maximal_st").get<std::vector<double>>();
  v.path_check_paths = j.value("path_check_paths", v.path_check_paths);
  v.path_check_n = j.value("path_check_n", v.path_check_n);
  return v;
}

nlohmann::json VerifySpec::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["master_seed"] = master_seed;
  j["workers"] = workers;
  j["constants_tol"] = constants_tol;
  j["series_k"] = series_k;
  j["conv_radius"] = conv_radius;
  j["lazy_hold"] = lazy_hold;
  j["d3_replicates"] = d3_replicates;
  j["d3_fit_ns"] = d3_fit_ns;
  j["d3_moment_ns"] = d3_moment_ns;
  j["d3_n_lo"] = d3_n_lo;
  j["d3_n_hi"] = d3_n_hi;
  j["d3_n_mean"] = d3_n_mean;
  j["pair_replicates"] = pair_replicates;
  j["d4_replicates"] = d4_replicates;
  j["d4_fit_ns"] = d4_fit_ns;
  j["d2_replicates"] = d2_replicates;
  j["d2_n"] = d2_n;
  j["d1_replicates"] = d1_replicates;
  j["d1_n_lo"] = d1_n_lo;
  j["d1_n_hi"] = d1_n_hi;
  j["lil_length"] = lil_length;
  j["lil_seeds"] = lil_seeds;
  j["lazy_checks"] = lazy_checks;
  j["lazy_replicates"] = lazy_replicates;
  j["lazy_n"] = lazy_n;
  j["exact_identity_n_max"] = exact_identity_n_max;
  j["exact_moment_n_max"] = exact_moment_n_max;
  j["prop_n"] = prop_n;
  j["prop_m"] = prop_m;
  j["prop_K"] = prop_K;
  j["maximal_n"] = maximal_n;
  j["maximal_st"] = maximal_st;
  j["path_check_paths"] = path_check_paths;
  j["path_check_n"] = path_check_n;
  return j;
}

nlohmann::json VerifyOutcome::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["pass"] = pass;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  j["suites"] = arr;
  return j;
}

std::string VerifyOutcome::text() const {
  std::string s;
  for (const auto& r : reports) s += r.table();
  s += pass ? "overall: PASS\n" : "overall: FAIL\n";
  return s;
}

VerifyOutcome run_verify(const VerifySpec& spec, std::set<std::string> suites) {
  if (suites.count("all")) suites = kAllSuites;
  for (const auto& s : suites)
    if (!kAllSuites.count(s)) throw ConfigError("unknown suite '" + s + "'");

  VerifyOutcome out;
  const int workers = spec.workers;

  // limit constants are shared by most suites
  std::optional<green::LimitConstants> c1, c2, c3, c4, c3_lazy;
  auto need_c1 = [&]() -> const green::LimitConstants& {
    if (!c1) c1 = green::limit_constants(WalkModel::simple(1), spec.constants_tol);
    return *c1;
  };
  auto need_c2 = [&]() -> const green::LimitConstants& {
    if (!c2) c2 = green::limit_constants(WalkModel::simple(2), spec.constants_tol);
    return *c2;
  };
  auto need_c3 = [&]() -> const green::LimitConstants& {
    if (!c3) c3 = green::limit_constants(WalkModel::simple(3), spec.constants_tol);
    return *c3;
  };
  auto need_c4 = [&]() -> const green::LimitConstants& {
    if (!c4) c4 = green::limit_constants(WalkModel::simple(4), std::max(spec.constants_tol, 1e-5));
    return *c4;
  };
  auto need_c3_lazy = [&]() -> const green::LimitConstants& {
    if (!c3_lazy)
      c3_lazy = green::limit_constants(WalkModel::lazy(3, spec.lazy_hold), spec.constants_tol);
    return *c3_lazy;
  };

  std::optional<ResultSet> rs_d3, rs_pair, rs_d4, rs_d2, rs_d1, rs_lazy;
  auto need_d3 = [&]() -> const ResultSet& {
    if (!rs_d3) rs_d3 = run(d3_experiment(spec), workers);
    return *rs_d3;
  };

  if (suites.count("exact")) out.reports.push_back(exact_suite(spec));

  if (suites.count("constants"))
    out.reports.push_back(constants_suite(spec, need_c3(), need_c3_lazy(), need_c4()));

  if (suites.count("clt")) {
    out.reports.push_back(
        stats::clt_suite_d3(need_d3(), need_c3(), spec.d3_n_lo, spec.d3_n_hi, spec.d3_n_mean));
    if (spec.lazy_checks) {
      if (!rs_lazy) rs_lazy = run(lazy_experiment(spec), workers);
      out.reports.push_back(lazy_advisory_suite(spec, *rs_lazy, need_c3_lazy()));
    }
    if (!rs_d2) rs_d2 = run(d2_experiment(spec), workers);
    out.reports.push_back(stats::clt_suite_d2(*rs_d2, need_c2(), spec.d2_n));
    if (!rs_d1) rs_d1 = run(d1_experiment(spec), workers);
    out.reports.push_back(stats::clt_suite_d1(*rs_d1, need_c1(), spec.d1_n_lo, spec.d1_n_hi));
  }

  if (suites.count("variance")) {
    out.reports.push_back(stats::silt_variance_suite(need_d3(), need_c3(), spec.d3_fit_ns));
    if (!rs_d4) rs_d4 = run(d4_experiment(spec), workers);
    out.reports.push_back(stats::silt_variance_suite(*rs_d4, need_c4(), spec.d4_fit_ns));
  }

  if (suites.count("moments")) {
    if (!rs_pair) rs_pair = run(pair_experiment(spec), workers);
    out.reports.push_back(
        stats::moment_growth_suite(need_d3(), &*rs_pair, need_c3(), spec.d3_moment_ns));
  }

  if (suites.count("lil")) {
    std::vector<uint64_t> seeds1, seeds3;
    for (uint64_t s : spec.lil_seeds) {
      seeds1.push_back(hash3(spec.master_seed, kLilTag, 2 * s));
      seeds3.push_back(hash3(spec.master_seed, kLilTag, 2 * s + 1));
    }
    out.reports.push_back(
        stats::lil_smoke(WalkSpec::simple(1), need_c1(), spec.lil_length, seeds1));
    out.reports.push_back(
        stats::lil_smoke(WalkSpec::simple(3), need_c3(), spec.lil_length, seeds3));
  }

  out.pass = true;
  for (const auto& r : out.reports)
    if (!r.pass()) out.pass = false;
  return out;
}

}  // namespace cpoly::verify

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cpoly/green.hpp"
#include "cpoly/mc.hpp"

namespace cpoly::stats {

double normal_cdf(double x);

// Two-sided sup distance between the empirical CDF of the sample and a
// reference CDF, by the sorted-sample formula.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

enum class Regressor { N, NLogN, N32 };
double regressor_value(Regressor reg, double n);

struct FitResult {
  double slope = 0.0;      // the variance-scale estimate
  double intercept = 0.0;  // per-step offset (n log n regime) or constant offset
  double r2 = 0.0;
};
// Least squares of the variance against the regressor; the slope estimates
// the variance-scale constant. The n log n regime is fitted per step
// (variance/n on log n) so that order-n corrections land in the intercept.
// Needs >= 4 points and non-degenerate input.
FitResult variance_scaling_fit(const std::vector<std::pair<double, double>>& points,
                               Regressor reg);

struct CheckRecord {
  std::string name;
  double observed = 0.0;
  double target = 0.0;
  double tol = 0.0;  // absolute tolerance on |observed - target| where applicable
  bool pass = false;
  bool mandatory = true;
  std::string law;  // which limit statement or identity the check exercises
  std::string note;
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckRecord> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (c.mandatory && !c.pass) return false;
    return true;
  }
  void add(CheckRecord c) { checks.push_back(std::move(c)); }
  nlohmann::json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);
  std::string table() const;
};

// --- Monte Carlo suites (pure functions of immutable results) ------------

// d >= 3 energy CLT + mean law + studentized self-intersection CLT.
VerificationReport clt_suite_d3(const ResultSet& rs, const green::LimitConstants& c,
                                uint64_t n_lo, uint64_t n_hi, uint64_t n_mean);
// d = 2 energy CLT: variance plateau and normality at one checkpoint.
VerificationReport clt_suite_d2(const ResultSet& rs, const green::LimitConstants& c,
                                uint64_t n);
// d = 1: variance scale, positive excess kurtosis (mixture signature),
// distributional self-consistency across two checkpoints.
VerificationReport clt_suite_d1(const ResultSet& rs, const green::LimitConstants& c,
                                uint64_t n_lo, uint64_t n_hi);

// Var(Q_n) against lambda^2 * regressor (n log n for d = 3, n for d >= 4).
VerificationReport silt_variance_suite(const ResultSet& rs, const green::LimitConstants& c,
                                       const std::vector<uint64_t>& fit_ns);

// Boundedness of normalized central moments of Q and the range, and raw
// moments of the pair intersections, across an n-grid.
VerificationReport moment_growth_suite(const ResultSet& walk_rs, const ResultSet* pair_rs,
                                       const green::LimitConstants& c,
                                       const std::vector<uint64_t>& ns);

// Order-of-magnitude check of the normalized running extrema of the energy
// along single long paths.
VerificationReport lil_smoke(const WalkSpec& walk, const green::LimitConstants& c,
                             uint64_t length, const std::vector<uint64_t>& seeds);

}  // namespace cpoly::stats

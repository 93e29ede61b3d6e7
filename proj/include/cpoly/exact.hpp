#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpoly/rational.hpp"
#include "cpoly/walk.hpp"

namespace cpoly::exact {

struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

enum class Quantity { Energy, Self, EnergyTruncated, SelfTruncated };
const char* quantity_name(Quantity q);
Quantity quantity_from_name(const std::string& s);

// Exact rational moment report, reproducible bit-for-bit across runs.
struct MomentReport {
  std::string quantity;
  int n = 0;
  int m = 0;
  double K = kNoTruncation;
  Rational value;
  nlohmann::json to_json() const;  // {"quantity","n","m","K","num","den"}
};

// Everything one enumeration pass over (all paths) x (Rademacher charge law)
// can produce for a given truncation ceiling K:
//   energy[m]        E[H^m]           self[m]        E[Q^m]
//   energy_trunc[m]  E[Ht^m]          self_trunc[m]  E[Qt^m]
//   distinct_site_sum[m]   2^-m sum over distinct site m-tuples of
//                          E[ indicator * prod l(l-1) ]
// Charges are never enumerated here: conditioned on the path, the per-site
// energy blocks are independent, so charge averages reduce to closed-form
// per-site moments combined through a truncated series product.
struct ExactSummary {
  int n = 0;
  int max_m = 0;
  double K = kNoTruncation;
  uint64_t path_count = 0;
  Rational total_probability;
  std::vector<Rational> energy, self, energy_trunc, self_trunc, distinct_site_sum;
};

ExactSummary enumerate_summary(const WalkModel& model, int n, int max_m,
                               double K = kNoTruncation, bool parallel = true);

Rational exact_moment(const WalkModel& model, Quantity q, int n, int m,
                      double K = kNoTruncation);
Rational exact_distinct_site_sum(const WalkModel& model, int n, int m, double K);
MomentReport moment_report(const WalkModel& model, Quantity q, int n, int m,
                           double K = kNoTruncation);

// Moments of the centered square of a Rademacher charge sum,
// Lambda_n = (w_1 + ... + w_n)^2 - n:  E[Lambda^i] and E[|Lambda|^i].
Rational pair_sum_moment(int n, int i);
Rational pair_sum_abs_moment(int n, int i);

// Per-site charge average used by the series product: E over Rademacher
// charges of ((sum of l charges)^2 - l)^i.  Nonnegative for every i.
Rational site_moment(int l, int i);

// Energy moment for one fixed path given its site visit counts.
Rational energy_moment_for_counts(const std::vector<int>& counts, int m);

// E[Lambda_n^2] = 2n(n-1) exactly, and the minimal constant C making
// E|Lambda_n|^m <= m! (C n(n-1))^{m/2} hold for this (n, m).
struct PairSumMomentCheck {
  int n = 0;
  int m = 0;
  Rational second_moment;
  Rational identity_value;
  bool identity_ok = false;
  double c_min = 0.0;
};
PairSumMomentCheck check_pair_sum_moments(int n, int m);
// max of c_min over 2 <= n' <= n_max, 2 <= m' <= m_max (at least 1)
double fitted_pair_sum_constant(int n_max, int m_max);

// Moment comparison between truncated energy and truncated
// self-intersections, all sides exact rationals except where the fitted
// constant's square root enters.
struct MomentComparisonCheck {
  int n = 0;
  int m = 0;
  double K = 0;
  double fitted_c = 1.0;
  Rational a_m;
  Rational a_le_self_lhs, a_le_self_rhs;
  Rational lower_lhs, lower_rhs;
  Rational self_upper_lhs, self_upper_rhs;
  double upper_lhs = 0, upper_rhs = 0;
  bool a_le_self_ok = false;
  bool lower_ok = false;
  bool self_upper_ok = false;
  bool self_upper_vacuous = false;
  bool upper_ok = false;
  bool upper_vacuous = false;
  bool pass() const { return a_le_self_ok && lower_ok && self_upper_ok && upper_ok; }
  nlohmann::json to_json() const;
};
MomentComparisonCheck check_moment_comparison(const WalkModel& model, int n, int m, double K);

// Both sides of the reflection-type maximal inequality
//   min_k P{|H_k| <= s} * P{max_l |H_l| >= s+t} <= 2 P{|H_n| >= t}
// by full (path, charge) enumeration.
struct MaximalInequalityCheck {
  int n = 0;
  double s = 0, t = 0;
  Rational min_small;    // min_k P{|H_k| <= s}
  Rational max_exceed;   // P{max_l |H_l| >= s + t}
  Rational tail;         // P{|H_n| >= t}
  Rational lhs, rhs;
  bool ok = false;
  nlohmann::json to_json() const;
};
MaximalInequalityCheck check_maximal_inequality(const WalkModel& model, int n, double s,
                                                double t);

// Practical enumeration budget: with charge enumeration the full product
// space must satisfy s^n * 2^n <= 1e8; without it, s^n <= 3e7.
void ensure_enumerable(const WalkModel& model, int n, bool with_charge_enumeration);

}  // namespace cpoly::exact

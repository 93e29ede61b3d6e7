#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cpoly/coord.hpp"
#include "cpoly/rational.hpp"
#include "cpoly/rng.hpp"

namespace cpoly {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ChargeKind { Rademacher, Gaussian };

// i.i.d. symmetric vertex charges with unit variance.
struct ChargeModel {
  ChargeKind kind = ChargeKind::Rademacher;
  double variance() const { return 1.0; }
};

struct StepEntry {
  Coord v{};
  int64_t num = 0;  // exact probability num/den
  int64_t den = 1;
  double p = 0.0;
};

enum class WalkKind { Simple, Lazy, Custom };

// Symmetric finite-support step law on Z^d. Validation is exact
// (rational arithmetic); sampling uses a Walker alias table built once.
// Immutable after construction, safe to share across threads.
class WalkModel {
 public:
  static WalkModel simple(int d);
  // Holds in place with probability `hold`, else takes a simple step.
  // Included as the aperiodic counterpart of the (period-2) simple walk.
  static WalkModel lazy(int d, double hold);
  static WalkModel custom(int d, std::vector<StepEntry> table);

  int dim() const { return d_; }
  WalkKind kind() const { return kind_; }
  double hold() const { return hold_; }
  const std::vector<StepEntry>& steps() const { return steps_; }

  // Second-order data: covariance (row-major d x d), sigma^2 = Gamma for d=1.
  const std::vector<double>& covariance() const { return cov_; }
  double sigma2() const { return cov_[0]; }
  double det_covariance() const;
  std::vector<double> covariance_inverse() const;
  double quad_form(const double* theta) const;  // <theta, Gamma theta>

  // True if the law is invariant under flipping the sign of any single axis,
  // and under permuting axes. Used to cut symmetric lattice sums.
  bool axis_symmetric() const { return axis_symmetric_; }
  bool permutation_symmetric() const { return perm_symmetric_; }

  // index into steps() (hot path: avoids copying the displacement)
  int sample_index(RngState& rng) const {
    const int k = static_cast<int>(alias_prob_.size());
    const double u = rng.next_double() * k;
    int i = static_cast<int>(u);
    if (i >= k) i = k - 1;
    return (u - i) < alias_prob_[i] ? i : alias_idx_[i];
  }
  Coord sample_step(RngState& rng) const { return steps_[sample_index(rng)].v; }

  // Characteristic function sum_v p_v cos(v . theta); real by symmetry,
  // equals 1 at theta = 0.
  double char_function(const double* theta) const;
  double char_function(const std::vector<double>& theta) const;

  std::string describe() const;

 private:
  WalkModel() = default;
  void validate_and_finalize();
  void build_alias_table();

  int d_ = 1;
  WalkKind kind_ = WalkKind::Custom;
  double hold_ = 0.0;
  std::vector<StepEntry> steps_;
  std::vector<double> cov_;  // d x d row-major
  bool axis_symmetric_ = false;
  bool perm_symmetric_ = false;
  std::vector<double> alias_prob_;
  std::vector<int> alias_idx_;
};

inline double sample_charge_real(const ChargeModel& cm, RngState& rng) {
  return cm.kind == ChargeKind::Rademacher ? static_cast<double>(rng.rademacher())
                                           : rng.next_normal();
}

}  // namespace cpoly

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "cpoly/site_table.hpp"
#include "cpoly/walk.hpp"

namespace cpoly {

// ChargeT is int64_t for Rademacher charges (all invariants then hold in
// exact integer arithmetic) and double for Gaussian charges.

template <class ChargeT>
struct IncrementRecord {
  ChargeT d_energy{};
  uint64_t d_self = 0;
  uint32_t d_range = 0;
};

// Streams a charged walk one step at a time, maintaining in O(1) amortized
// work per step:
//   energy           sum over coincident index pairs of the charge products
//   self_intersections   number of index pairs j < k with S_j = S_k
//   range, sup_visits    distinct sites, largest per-site visit count
// The walk starts at the origin, which carries no charge; the site table
// covers positions S_1..S_n only.
template <class ChargeT>
class PathAccumulator {
 public:
  explicit PathAccumulator(int d, size_t capacity_hint = 1u << 12)
      : d_(d), sites_(d, capacity_hint) {}

  // A new vertex at site x pairs with every earlier visit of x:
  // the energy gains charge * (charge sum at x so far), the intersection
  // count gains the pre-update visit count.
  IncrementRecord<ChargeT> advance(const Coord& step, ChargeT charge) {
    add_in_place(pos_, step, d_);
    ++n_;
    auto& e = sites_.at(pos_);
    IncrementRecord<ChargeT> inc;
    inc.d_energy = charge * e.charge_sum;
    inc.d_self = e.visits;
    inc.d_range = (e.visits == 0);
    e.visits += 1;
    e.charge_sum += charge;
    energy_ += inc.d_energy;
    self_ += inc.d_self;
    range_ += inc.d_range;
    sup_visits_ = std::max(sup_visits_, e.visits);
    return inc;
  }

  int dim() const { return d_; }
  uint64_t steps_taken() const { return n_; }
  const Coord& position() const { return pos_; }
  ChargeT energy() const { return energy_; }
  uint64_t self_intersections() const { return self_; }
  uint64_t range() const { return range_; }
  uint32_t sup_visits() const { return sup_visits_; }

  uint32_t visits_at(const Coord& c) const {
    const auto* e = sites_.find(c);
    return e ? e->visits : 0;
  }

  // (energy, self_intersections) if sup visits <= threshold, else (0, 0).
  // The indicator is evaluated at read time; the boundary case
  // sup_visits == threshold is kept.
  std::pair<ChargeT, uint64_t> truncated(double threshold) const {
    if (static_cast<double>(sup_visits_) <= threshold) return {energy_, self_};
    return {ChargeT{}, uint64_t{0}};
  }

  // Exact sums over the site table: (sum of squared visit counts,
  // sum of squared per-site charge sums).
  std::pair<uint64_t, ChargeT> sum_of_squares() const {
    uint64_t l2 = 0;
    ChargeT c2{};
    sites_.for_each([&](const auto& e) {
      l2 += static_cast<uint64_t>(e.visits) * e.visits;
      c2 += e.charge_sum * e.charge_sum;
    });
    return {l2, c2};
  }

  template <class F>
  void for_each_site(F&& f) const {
    sites_.for_each(std::forward<F>(f));
  }

  void reset() {
    pos_ = Coord{};
    n_ = 0;
    energy_ = ChargeT{};
    self_ = 0;
    range_ = 0;
    sup_visits_ = 0;
    sites_.clear();
  }

 private:
  int d_;
  Coord pos_{};
  uint64_t n_ = 0;
  ChargeT energy_{};
  uint64_t self_ = 0;
  uint64_t range_ = 0;
  uint32_t sup_visits_ = 0;
  SiteTable<ChargeT> sites_;
};

// Mutual intersections of two walks sharing one step law. Both walks are
// streamed symmetrically; each new point of either walk scans only the
// other walk's visit count at that site, so after n rounds the count
// equals the full double sum over both prefixes.
class PairAccumulator {
 public:
  explicit PairAccumulator(int d, size_t capacity_hint = 1u << 12)
      : d_(d), sites1_(d, capacity_hint), sites2_(d, capacity_hint) {}

  uint64_t advance_pair(const Coord& step1, const Coord& step2) {
    uint64_t dj = 0;
    add_in_place(pos1_, step1, d_);
    if (const auto* e = sites2_.find(pos1_)) dj += e->visits;  // pairs (t, k<t)
    sites1_.at(pos1_).visits += 1;
    add_in_place(pos2_, step2, d_);
    sites2_.at(pos2_).visits += 1;
    if (const auto* e = sites1_.find(pos2_)) dj += e->visits;  // pairs (j<=t, t)
    ++n_;
    cross_ += dj;
    return dj;
  }

  int dim() const { return d_; }
  uint64_t rounds() const { return n_; }
  uint64_t cross_intersections() const { return cross_; }

  void reset() {
    pos1_ = Coord{};
    pos2_ = Coord{};
    n_ = 0;
    cross_ = 0;
    sites1_.clear();
    sites2_.clear();
  }

 private:
  int d_;
  Coord pos1_{}, pos2_{};
  uint64_t n_ = 0;
  uint64_t cross_ = 0;
  SiteTable<int64_t> sites1_, sites2_;
};

// Visit-count ceiling K_n used by the truncated observables.
//   d = 1:  M * sqrt(n * b_n)
//   d = 2:  M * (log n)^2
//   d >= 3: (n / log n)^(1/4)
struct TruncationRule {
  enum class Bn { LogLog, Log, Const };

  int d = 3;
  double scale = 1.0;  // M; unused for d >= 3
  Bn bn = Bn::LogLog;  // d = 1 only

  double bn_value(double n) const {
    const double ln = std::log(std::max(n, 3.0));
    switch (bn) {
      case Bn::LogLog: return std::log(std::max(ln, 1.001e0));
      case Bn::Log: return ln;
      case Bn::Const: return 1.0;
    }
    return 1.0;
  }

  double threshold(double n) const {
    const double ln = std::log(std::max(n, 3.0));
    if (d == 1) return scale * std::sqrt(n * bn_value(n));
    if (d == 2) return scale * ln * ln;
    return std::pow(n / ln, 0.25);
  }
};

}  // namespace cpoly

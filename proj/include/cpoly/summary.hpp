#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace cpoly {

// Streaming count / mean / central power sums up to order 6, with an exact
// pairwise merge (Pebay update). Merging is associative and commutative in
// exact arithmetic; callers that need bit-identical floating point results
// must fix the merge order, which the engine does by merging fixed-size
// replicate blocks in block order.
class SummaryStats {
 public:
  void add(double x) {
    SummaryStats one;
    one.count_ = 1;
    one.mean_ = x;
    one.min_ = x;
    one.max_ = x;
    merge(one);
  }

  void merge(const SummaryStats& b) {
    if (b.count_ == 0) return;
    if (count_ == 0) {
      *this = b;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(b.count_);
    const double n = na + nb;
    const double delta = b.mean_ - mean_;
    double m[7] = {0, 0, 0, 0, 0, 0, 0};
    for (int p = 2; p <= 6; ++p) {
      double s = sum_[p] + b.sum_[p];
      for (int k = 1; k <= p - 2; ++k)
        s += binom(p, k) * (std::pow(-nb / n * delta, k) * sum_[p - k] +
                            std::pow(na / n * delta, k) * b.sum_[p - k]);
      s += std::pow(delta * na * nb / n, p) *
           (1.0 / std::pow(nb, p - 1) - std::pow(-1.0 / na, p - 1));
      m[p] = s;
    }
    for (int p = 2; p <= 6; ++p) sum_[p] = m[p];
    mean_ += delta * nb / n;
    count_ += b.count_;
    min_ = std::min(min_, b.min_);
    max_ = std::max(max_, b.max_);
  }

  uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double min() const { return min_; }
  double max() const { return max_; }

  // population central moment E (X - mean)^p, p in 2..6
  double central_moment(int p) const { return count_ ? sum_[p] / count_ : 0.0; }
  // unbiased sample variance
  double variance() const { return count_ > 1 ? sum_[2] / (count_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(std::max(variance(), 0.0)); }
  double excess_kurtosis() const {
    const double m2 = central_moment(2);
    return m2 > 0 ? central_moment(4) / (m2 * m2) - 3.0 : 0.0;
  }
  // raw moment E X^p from the central sums, p <= 6
  double raw_moment(int p) const {
    if (p == 0) return 1.0;
    if (p == 1) return mean_;
    double r = 0.0;
    for (int k = 0; k <= p; ++k) {
      const double central = k == 0 ? 1.0 : (k == 1 ? 0.0 : central_moment(k));
      r += binom(p, k) * central * std::pow(mean_, p - k);
    }
    return r;
  }

 private:
  static double binom(int n, int k) {
    static const double table[7][7] = {{1, 0, 0, 0, 0, 0, 0},      {1, 1, 0, 0, 0, 0, 0},
                                       {1, 2, 1, 0, 0, 0, 0},      {1, 3, 3, 1, 0, 0, 0},
                                       {1, 4, 6, 4, 1, 0, 0},      {1, 5, 10, 10, 5, 1, 0},
                                       {1, 6, 15, 20, 15, 6, 1}};
    return table[n][k];
  }

  uint64_t count_ = 0;
  double mean_ = 0.0;
  double sum_[7] = {0, 0, 0, 0, 0, 0, 0};  // indices 2..6 used
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

// Bounded uniform subsample selected as the k items of smallest hashed
// priority ("bottom-k"). Selection is a function of the item set alone,
// so merging reservoirs is associative, commutative and deterministic.
class Reservoir {
 public:
  explicit Reservoir(size_t capacity = 0) : cap_(capacity) {}

  struct Item {
    uint64_t priority;
    uint64_t id;
    double value;
    bool operator<(const Item& o) const {
      return priority != o.priority ? priority < o.priority : id < o.id;
    }
  };

  void add(uint64_t priority, uint64_t id, double value) {
    if (cap_ == 0) return;
    Item it{priority, id, value};
    if (items_.size() < cap_) {
      items_.push_back(it);
      std::push_heap(items_.begin(), items_.end());
      return;
    }
    if (it < items_.front()) {
      std::pop_heap(items_.begin(), items_.end());
      items_.back() = it;
      std::push_heap(items_.begin(), items_.end());
    }
  }

  void merge(const Reservoir& o) {
    for (const Item& it : o.items_) add(it.priority, it.id, it.value);
  }

  size_t capacity() const { return cap_; }
  size_t size() const { return items_.size(); }

  // values in canonical (priority) order
  std::vector<double> values() const {
    std::vector<Item> sorted = items_;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> v(sorted.size());
    for (size_t i = 0; i < sorted.size(); ++i) v[i] = sorted[i].value;
    return v;
  }

 private:
  size_t cap_;
  std::vector<Item> items_;  // max-heap on (priority, id)
};

}  // namespace cpoly

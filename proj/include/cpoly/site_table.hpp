#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "cpoly/coord.hpp"

namespace cpoly {

// Sparse site -> (visit count, charge sum) map. The hot loop is one probe
// per step, so packable sites use an open-addressing table with 64-bit
// packed keys; sites outside the packable range land in a generic map.
template <class ChargeT>
class SiteTable {
 public:
  struct Entry {
    uint32_t visits = 0;
    ChargeT charge_sum{};
  };

  explicit SiteTable(int d, size_t initial_capacity = 1u << 12) : d_(d) {
    size_t cap = 16;
    while (cap < initial_capacity) cap <<= 1;
    slots_.assign(cap, Slot{});
    mask_ = cap - 1;
  }

  int dim() const { return d_; }
  size_t size() const { return fast_count_ + overflow_.size(); }

  Entry& at(const Coord& c) {
    if (packable(c, d_)) [[likely]] {
      const uint64_t key = pack_site(c, d_);
      size_t i = mix64(key) & mask_;
      while (true) {
        Slot& s = slots_[i];
        if (s.key == key) return s.e;
        if (s.key == 0) {
          if ((fast_count_ + 1) * 8 > slots_.size() * 5) {
            grow();
            return at(c);
          }
          s.key = key;
          ++fast_count_;
          return s.e;
        }
        i = (i + 1) & mask_;
      }
    }
    return overflow_[c];
  }

  const Entry* find(const Coord& c) const {
    if (packable(c, d_)) [[likely]] {
      const uint64_t key = pack_site(c, d_);
      size_t i = mix64(key) & mask_;
      while (true) {
        const Slot& s = slots_[i];
        if (s.key == key) return &s.e;
        if (s.key == 0) return nullptr;
        i = (i + 1) & mask_;
      }
    }
    auto it = overflow_.find(c);
    return it == overflow_.end() ? nullptr : &it->second;
  }

  template <class F>
  void for_each(F&& f) const {
    for (const Slot& s : slots_)
      if (s.key != 0) f(s.e);
    for (const auto& [c, e] : overflow_) f(e);
  }

  // Drop contents but keep capacity (replicates reuse the allocation).
  void clear() {
    std::fill(slots_.begin(), slots_.end(), Slot{});
    fast_count_ = 0;
    overflow_.clear();
  }

 private:
  struct Slot {
    uint64_t key = 0;
    Entry e;
  };

  void grow() {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(old.size() * 2, Slot{});
    mask_ = slots_.size() - 1;
    for (const Slot& s : old) {
      if (s.key == 0) continue;
      size_t i = mix64(s.key) & mask_;
      while (slots_[i].key != 0) i = (i + 1) & mask_;
      slots_[i] = s;
    }
  }

  int d_;
  std::vector<Slot> slots_;
  size_t mask_ = 0;
  size_t fast_count_ = 0;
  std::unordered_map<Coord, Entry, CoordHash> overflow_;
};

}  // namespace cpoly

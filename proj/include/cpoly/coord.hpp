#pragma once

#include <array>
#include <cstdint>

#include "cpoly/rng.hpp"

namespace cpoly {

inline constexpr int kMaxDim = 8;

// Lattice point; components beyond the model dimension stay zero.
// 64-bit per axis: at desk scale (n <= 1e7) coordinate overflow is
// unreachable, so it is asserted, not handled.
using Coord = std::array<int64_t, kMaxDim>;

inline void add_in_place(Coord& a, const Coord& b, int d) {
  for (int i = 0; i < d; ++i) a[i] += b[i];
}

inline Coord negate(const Coord& c, int d) {
  Coord r{};
  for (int i = 0; i < d; ++i) r[i] = -c[i];
  return r;
}

// Sites with d <= 4 and coordinates in [-32767, 32767] pack into one
// 64-bit key (16 bits per axis, offset-encoded); everything else goes
// through a generic side table. The offset keeps lane 0 nonzero, so key
// 0 can serve as the empty-slot sentinel.
inline bool packable(const Coord& c, int d) {
  if (d > 4) return false;
  for (int i = 0; i < d; ++i)
    if (c[i] < -32767 || c[i] > 32767) return false;
  return true;
}

inline uint64_t pack_site(const Coord& c, int d) {
  uint64_t k = 0;
  for (int i = 0; i < d; ++i)
    k |= static_cast<uint64_t>(static_cast<uint16_t>(c[i] + 32768)) << (16 * i);
  return k;
}

struct CoordHash {
  size_t operator()(const Coord& c) const {
    uint64_t h = kGolden;
    for (int64_t x : c) h = mix64(h ^ static_cast<uint64_t>(x));
    return static_cast<size_t>(h);
  }
};

}  // namespace cpoly

#pragma once

#include <cmath>
#include <cstdint>

namespace cpoly {

// SplitMix64 finalizer.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stable 64-bit hash of (seed, tag, index), used for reservoir priorities
// and stream keying.
inline uint64_t hash3(uint64_t seed, uint64_t tag, uint64_t index) {
  return mix64(mix64(seed + kGolden) ^ mix64(tag * 0xd6e8feb86659fd93ULL + index * kGolden + 1));
}

// Counter-based stream: draw i of stream (seed, stream) is
// mix64(key + i*kGolden), so any position of any stream is addressable
// without replaying generator state. A state is owned by one worker at
// a time; the models it feeds are immutable and freely shared.
class RngState {
 public:
  RngState() : RngState(0, 0) {}
  RngState(uint64_t seed, uint64_t stream) : key_(hash3(seed, 0x77a1c5b6u, stream)) {}

  uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double next_double_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller, second value cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = next_double_pos();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.28318530717958647692528676656 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  int64_t rademacher() { return (next_u64() >> 63) ? int64_t{1} : int64_t{-1}; }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cpoly

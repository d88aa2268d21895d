#pragma once

#include <cstdint>

namespace fluxanneal {

/// SplitMix64 generator (Steele, Lea, Flood 2014).
///
/// The whole toolkit draws randomness through this one generator so that
/// instances, momenta and solver runs are bit-reproducible across platforms:
/// the mapping from seed to stream involves only 64-bit integer arithmetic
/// and an exact power-of-two scaling for doubles, never std::* distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [a, b). The half-open convention is deliberate; the
  /// boundary has measure zero and determinism matters more.
  double next_in(double a, double b) { return a + (b - a) * next_unit(); }

  /// +1 or -1, equiprobable.
  int next_sign() { return (next_u64() >> 63) ? -1 : +1; }

  /// Uniform integer in [0, bound) via rejection-free multiply-shift.
  std::uint64_t next_below(std::uint64_t bound) {
    // 128-bit multiply keeps the bias below 2^-64, irrelevant at our sizes.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Deterministically derives an independent stream seed from a base seed and
/// a stream index (instance number, init number, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 mix(base ^ (stream * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
  return mix.next_u64();
}

}  // namespace fluxanneal

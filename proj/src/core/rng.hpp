#pragma once

#include <cstdint>

namespace termstrip {

// 64-bit avalanche mix (SplitMix64 finalizer, Stafford variant used by the
// reference SplitMix64 implementation).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream key from (seed, index). Both the generator
// and this derivation are fixed so that streams can be reproduced by any
// implementation: derive(seed, index) = mix64(mix64(seed + GAMMA) ^ mix64(index + GAMMA)).
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed + kGolden) ^ mix64(index + kGolden));
}

// Counter-based generator: output i is SplitMix64 applied to a fixed key,
//   next() = mix64(key + (counter + 1) * GAMMA)
// Equivalent to the canonical SplitMix64 stream seeded with `key`. State is
// just (key, counter), so a stream position can be stored, replayed, or
// recomputed in another language from the two integers.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kGolden);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Fixed-point multiply (Lemire, no rejection);
  // bias is O(n / 2^64), negligible for the catalog-sized n used here.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal(double mean = 0.0, double sigma = 1.0);

  // Uniform double in [lo, hi).
  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace termstrip

#pragma once

#include <cstdint>
#include <random>

namespace eprc {

// Deterministic random stream.
//
// The engine is std::mt19937_64, whose output sequence for a given seed is
// fixed by the C++ standard, so identical seeds reproduce identical draws on
// every platform. Uniform doubles are built directly from the top 53 bits of
// the raw output instead of std::uniform_real_distribution, whose sequence is
// implementation-defined.
//
// substream(i) derives a child stream from this stream's *seed* (not its
// engine state) by mixing the ordinal through a SplitMix64 finalizer: child
// streams do not depend on how much the parent has already drawn, which is
// what makes per-ordinal parallel execution deterministic.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  RngStream substream(std::uint64_t ordinal) const {
    return RngStream(mix(seed_, ordinal));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t ordinal) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (ordinal + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace eprc

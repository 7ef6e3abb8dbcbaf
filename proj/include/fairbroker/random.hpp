#pragma once

#include <cstdint>
#include <random>

namespace fairbroker {

// Seeded random source. Draws are computed here rather than through the
// standard distributions, whose output differs between library vendors, so
// that a manifest replays bit-exactly everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit span
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return lo + static_cast<std::int64_t>(r % range);
    }
  }

  // Uniform double in [0, 1).
  double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; derives independent per-cell seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fairbroker

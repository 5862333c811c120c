#pragma once

#include <cstdint>
#include <random>

namespace meshrag {

// Deterministic RNG used everywhere randomness appears. All draws go through
// these helpers rather than std::uniform_*_distribution, whose output is
// implementation-defined; this keeps results reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1): top 53 bits of the engine output.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Rejection-free modulo is fine here: n is tiny
  // relative to 2^64, so the bias is far below anything observable.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

// Seed for one part's worth of work, derived from the run's root seed.
inline std::uint64_t part_seed(std::uint64_t root_seed, int part_id) {
  return root_seed ^ static_cast<std::uint64_t>(part_id);
}

}  // namespace meshrag

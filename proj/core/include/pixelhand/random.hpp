#pragma once

#include <cstdint>
#include <random>

namespace pixelhand {

/// Seeded generator whose draws are identical on every platform: the engine is
/// std::mt19937_64 and the conversions to doubles and ranges are done here
/// rather than by the implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pixelhand

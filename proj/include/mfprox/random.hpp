#pragma once

#include <cstdint>
#include <random>

namespace mfprox {

/// Seeded generator with a fixed, implementation-independent output mapping:
/// raw std::mt19937_64 words, doubles as (w >> 11) * 2^-53, integers by rejection.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/u53";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t w = engine_();
    while (w >= limit) w = engine_();
    return w % bound;
  }

  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mfprox

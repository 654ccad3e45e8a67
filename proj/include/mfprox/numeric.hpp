#pragma once

#include <cmath>
#include <limits>

namespace mfprox {

/// Smallest and largest doubles treated as strictly inside (0, 1).
inline constexpr double kInteriorLow = std::numeric_limits<double>::min();
inline constexpr double kInteriorHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

/// 1 / (1 + exp(z)) without overflow for either sign of z.
inline double logistic_of_neg(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

/// log((1 - p) / p)
inline double neg_logit(double p) { return std::log1p(-p) - std::log(p); }

inline double clamp_interior(double q) {
  if (q < kInteriorLow) return kInteriorLow;
  if (q > kInteriorHigh) return kInteriorHigh;
  return q;
}

inline bool is_interior(double q) { return q > 0.0 && q < 1.0; }

}  // namespace mfprox

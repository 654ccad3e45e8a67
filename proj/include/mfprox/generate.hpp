#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "mfprox/model.hpp"
#include "mfprox/objective.hpp"
#include "mfprox/random.hpp"

namespace mfprox {

/// side x side grid, 4-neighbour couplings coupling * (+-1), uniform 0.5 priors.
EnergyModel generate_ising_grid(std::size_t side, std::uint64_t seed, double coupling = 1.0);

struct RandomPolyOptions {
  /// Coefficients are uniform in [-scale, scale].
  double scale = 1.0;
  /// Largest varset size.
  std::size_t max_order = 3;
  /// Draw priors uniformly from [0.1, 0.9] instead of 0.5.
  bool random_priors = false;
  /// Add a constant offset term.
  bool constant_term = false;
};

/// 2n candidate varsets of size 1..max_order (duplicates dropped), uniform coefficients.
EnergyModel generate_random_poly(std::size_t n, std::uint64_t seed,
                                 const RandomPolyOptions& options = {});

/// Each coordinate uniform in [lo, hi].
MeanFieldState random_state(std::size_t n, Rng& rng, double lo = 0.01, double hi = 0.99);

/// The two-variable Ising instance Psi = coupling * x0 x1 with uniform priors.
EnergyModel ising_pair(double coupling = 1.0);

}  // namespace mfprox

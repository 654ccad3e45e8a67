#include "mfprox/generate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mfprox {

EnergyModel generate_ising_grid(std::size_t side, std::uint64_t seed, double coupling) {
  if (side == 0) throw ModelError("grid side must be positive");
  Rng rng(seed);
  const std::size_t n = side * side;
  std::vector<Term> terms;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t v = r * side + c;
      if (c + 1 < side) terms.push_back({{v, v + 1}, coupling * rng.sign()});
      if (r + 1 < side) terms.push_back({{v, v + side}, coupling * rng.sign()});
    }
  }
  return EnergyModel(n, std::move(terms), std::vector<double>(n, 0.5));
}

EnergyModel generate_random_poly(std::size_t n, std::uint64_t seed,
                                 const RandomPolyOptions& options) {
  if (n == 0) throw ModelError("model must have at least one variable");
  if (options.max_order == 0) throw ModelError("max_order must be positive");
  Rng rng(seed);
  const std::size_t max_order = std::min(options.max_order, n);

  std::vector<Term> terms;
  std::set<std::vector<std::size_t>> seen;
  if (options.constant_term) {
    terms.push_back({{}, rng.uniform(-options.scale, options.scale)});
    seen.insert({});
  }
  std::vector<std::size_t> pool(n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const std::size_t size = 1 + static_cast<std::size_t>(rng.below(max_order));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < size; ++j) {
      const std::size_t pick = j + static_cast<std::size_t>(rng.below(n - j));
      std::swap(pool[j], pool[pick]);
    }
    std::vector<std::size_t> vars(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(vars.begin(), vars.end());
    const double coeff = rng.uniform(-options.scale, options.scale);
    if (seen.insert(vars).second) terms.push_back({std::move(vars), coeff});
  }

  std::vector<double> priors(n, 0.5);
  if (options.random_priors) {
    for (double& p : priors) p = rng.uniform(0.1, 0.9);
  }
  return EnergyModel(n, std::move(terms), std::move(priors));
}

MeanFieldState random_state(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> q(n);
  for (double& v : q) v = rng.uniform(lo, hi);
  return MeanFieldState(std::move(q));
}

EnergyModel ising_pair(double coupling) { return EnergyModel(2, {{{0, 1}, coupling}}, {0.5, 0.5}); }

}  // namespace mfprox

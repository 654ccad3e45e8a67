#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfprox {

/// Raised when a model, state or configuration violates its invariants.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One monomial of the energy: coeff * prod_{i in vars} x_i. Empty vars is a constant offset.
struct Term {
  std::vector<std::size_t> vars;
  double coeff = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Checks every EnergyModel invariant and throws ModelError naming the first violation.
void validate(std::size_t n, std::span<const Term> terms, std::span<const double> priors);

/// N binary variables with a sparse multilinear energy Psi and Bernoulli priors.
///
/// The posterior is P(x) = exp(-Psi(x)) prod_i p0_i(x_i) / Z. Instances are
/// validated on construction and immutable afterwards.
class EnergyModel {
 public:
  EnergyModel(std::size_t n, std::vector<Term> terms, std::vector<double> priors);

  std::size_t size() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<double>& priors() const { return priors_; }
  double prior(std::size_t i) const { return priors_[i]; }

  /// Indices into terms() of the terms that contain variable i.
  const std::vector<std::size_t>& incident_terms(std::size_t i) const { return incidence_[i]; }

  friend bool operator==(const EnergyModel& a, const EnergyModel& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_ && a.priors_ == b.priors_;
  }

 private:
  std::size_t n_;
  std::vector<Term> terms_;
  std::vector<double> priors_;
  std::vector<std::vector<std::size_t>> incidence_;
};

enum class BoundsMode { exact, interval };

struct PsiBounds {
  double psi_min = 0.0;
  double psi_max = 0.0;
  BoundsMode mode = BoundsMode::exact;
};

/// Per-coordinate compact box that confines prior-initialised iterates.
struct BoxBounds {
  std::vector<double> q_min;
  std::vector<double> q_max;
};

inline constexpr std::size_t kDefaultMaxExactN = 20;

/// Psi(x) for a binary configuration x (entries 0 or 1).
double psi_eval(const EnergyModel& model, std::span<const std::uint8_t> x);

/// Psi evaluated on the configuration whose bit i is variable i. Requires N <= 63.
double psi_eval_mask(const EnergyModel& model, std::uint64_t mask);

/// Exact min/max of Psi by enumeration when N <= max_exact_n, else term-wise interval bounds.
PsiBounds psi_bounds(const EnergyModel& model, std::size_t max_exact_n = kDefaultMaxExactN);

/// Interval bounds sum(min(0,c)) .. sum(max(0,c)); always enclose the exact range.
PsiBounds interval_psi_bounds(const EnergyModel& model);

BoxBounds box_bounds(const EnergyModel& model, const PsiBounds& bounds);

}  // namespace mfprox

#include "mfprox/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "mfprox/numeric.hpp"

namespace mfprox {

void validate(std::size_t n, std::span<const Term> terms, std::span<const double> priors) {
  if (n == 0) throw ModelError("model must have at least one variable");
  if (priors.size() != n) {
    throw ModelError(fmt::format("expected {} priors, got {}", n, priors.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(priors[i] > 0.0 && priors[i] < 1.0)) {
      throw ModelError(fmt::format("prior not interior: priors[{}] = {}", i, priors[i]));
    }
  }
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Term& term = terms[t];
    if (!std::isfinite(term.coeff)) {
      throw ModelError(fmt::format("non-finite coefficient in term {}", t));
    }
    for (std::size_t k = 0; k < term.vars.size(); ++k) {
      if (term.vars[k] >= n) {
        throw ModelError(
            fmt::format("variable index {} out of range [0, {}) in term {}", term.vars[k], n, t));
      }
      if (k > 0 && term.vars[k] <= term.vars[k - 1]) {
        throw ModelError(fmt::format("varset not strictly increasing in term {}", t));
      }
    }
    if (!seen.insert(term.vars).second) {
      throw ModelError(fmt::format("duplicate varset in term {}", t));
    }
  }
}

EnergyModel::EnergyModel(std::size_t n, std::vector<Term> terms, std::vector<double> priors)
    : n_(n), terms_(std::move(terms)), priors_(std::move(priors)) {
  validate(n_, terms_, priors_);
  incidence_.resize(n_);
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    for (std::size_t v : terms_[t].vars) incidence_[v].push_back(t);
  }
}

double psi_eval(const EnergyModel& model, std::span<const std::uint8_t> x) {
  if (x.size() != model.size()) {
    throw ModelError(fmt::format("dimension mismatch: x has {} entries, model has {}", x.size(),
                                 model.size()));
  }
  for (std::uint8_t b : x) {
    if (b > 1) throw ModelError("configuration entries must be 0 or 1");
  }
  double total = 0.0;
  for (const Term& term : model.terms()) {
    bool active = true;
    for (std::size_t v : term.vars) {
      if (x[v] == 0) {
        active = false;
        break;
      }
    }
    if (active) total += term.coeff;
  }
  return total;
}

double psi_eval_mask(const EnergyModel& model, std::uint64_t mask) {
  double total = 0.0;
  for (const Term& term : model.terms()) {
    bool active = true;
    for (std::size_t v : term.vars) {
      if (((mask >> v) & 1U) == 0) {
        active = false;
        break;
      }
    }
    if (active) total += term.coeff;
  }
  return total;
}

PsiBounds interval_psi_bounds(const EnergyModel& model) {
  PsiBounds b{0.0, 0.0, BoundsMode::interval};
  for (const Term& term : model.terms()) {
    if (term.vars.empty()) {
      b.psi_min += term.coeff;
      b.psi_max += term.coeff;
    } else {
      b.psi_min += std::min(0.0, term.coeff);
      b.psi_max += std::max(0.0, term.coeff);
    }
  }
  return b;
}

PsiBounds psi_bounds(const EnergyModel& model, std::size_t max_exact_n) {
  const std::size_t n = model.size();
  if (n > max_exact_n || n > 30) return interval_psi_bounds(model);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const double v = psi_eval_mask(model, mask);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi, BoundsMode::exact};
}

BoxBounds box_bounds(const EnergyModel& model, const PsiBounds& bounds) {
  const std::size_t n = model.size();
  const double spread = bounds.psi_max - bounds.psi_min;
  BoxBounds box;
  box.q_min.resize(n);
  box.q_max.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double prior_term = neg_logit(model.prior(i));
    if (spread == 0.0) {
      box.q_min[i] = box.q_max[i] = model.prior(i);
      continue;
    }
    box.q_min[i] = clamp_interior(logistic_of_neg(spread + prior_term));
    box.q_max[i] = clamp_interior(logistic_of_neg(-spread + prior_term));
  }
  return box;
}

}  // namespace mfprox

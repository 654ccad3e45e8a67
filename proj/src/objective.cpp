#include "mfprox/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mfprox/numeric.hpp"

namespace mfprox {
namespace {

void require_same_size(const EnergyModel& model, const MeanFieldState& state) {
  if (state.size() != model.size()) {
    throw ModelError(fmt::format("dimension mismatch: state has {} entries, model has {}",
                                 state.size(), model.size()));
  }
}

// q log(q/p) + (1-q) log((1-q)/(1-p)), the Bernoulli KL shared by f_i and l.
double bernoulli_kl(double q, double p) {
  return q * (std::log(q) - std::log(p)) + (1.0 - q) * (std::log1p(-q) - std::log1p(-p));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace

MeanFieldState::MeanFieldState(std::vector<double> q) : q_(std::move(q)) {
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (!is_interior(q_[i])) {
      throw ModelError(fmt::format("state not interior: q[{}] = {}", i, q_[i]));
    }
  }
}

void MeanFieldState::set(std::size_t i, double value) {
  if (!is_interior(value)) {
    throw ModelError(fmt::format("state not interior: q[{}] = {}", i, value));
  }
  q_.at(i) = value;
}

double omega(const EnergyModel& model, const MeanFieldState& state) {
  require_same_size(model, state);
  double total = 0.0;
  for (const Term& term : model.terms()) {
    double prod = term.coeff;
    for (std::size_t v : term.vars) prod *= state[v];
    total += prod;
  }
  return total;
}

double conditional_gap(const EnergyModel& model, const MeanFieldState& state, std::size_t i) {
  require_same_size(model, state);
  if (i >= model.size()) {
    throw ModelError(fmt::format("index {} out of range [0, {})", i, model.size()));
  }
  double gap = 0.0;
  for (std::size_t t : model.incident_terms(i)) {
    const Term& term = model.terms()[t];
    double prod = term.coeff;
    for (std::size_t v : term.vars) {
      if (v != i) prod *= state[v];
    }
    gap += prod;
  }
  return gap;
}

double entropy_term(double p0, double qi) { return bernoulli_kl(qi, p0); }

double objective_g(const EnergyModel& model, const MeanFieldState& state) {
  double total = omega(model, state);
  for (std::size_t i = 0; i < model.size(); ++i) total += entropy_term(model.prior(i), state[i]);
  return total;
}

std::vector<double> grad_g(const EnergyModel& model, const MeanFieldState& state) {
  require_same_size(model, state);
  std::vector<double> grad(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    grad[i] = conditional_gap(model, state, i) + logit(state[i]) - logit(model.prior(i));
  }
  return grad;
}

Eigen::MatrixXd hessian_g(const EnergyModel& model, const MeanFieldState& state) {
  require_same_size(model, state);
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const Term& term : model.terms()) {
    const auto& vars = term.vars;
    for (std::size_t a = 0; a < vars.size(); ++a) {
      for (std::size_t b = a + 1; b < vars.size(); ++b) {
        double prod = term.coeff;
        for (std::size_t k = 0; k < vars.size(); ++k) {
          if (k != a && k != b) prod *= state[vars[k]];
        }
        const auto i = static_cast<Eigen::Index>(vars[a]);
        const auto j = static_cast<Eigen::Index>(vars[b]);
        h(i, j) += prod;
        h(j, i) += prod;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = state[static_cast<std::size_t>(i)];
    h(i, i) = 1.0 / q + 1.0 / (1.0 - q);
  }
  return h;
}

double prox_value(double q, double q0) { return bernoulli_kl(q, q0); }

double prox_derivative(double q, double q0) { return logit(q) - logit(q0); }

OracleResult kl_oracle(const EnergyModel& model, const MeanFieldState& state) {
  require_same_size(model, state);
  const std::size_t n = model.size();
  if (n > kOracleMaxN) {
    throw ModelError(fmt::format("oracle enumeration limited to N <= {}, got N = {}", kOracleMaxN, n));
  }
  std::vector<double> log_q1(n), log_q0(n), log_p1(n), log_p0(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_q1[i] = std::log(state[i]);
    log_q0[i] = std::log1p(-state[i]);
    log_p1[i] = std::log(model.prior(i));
    log_p0[i] = std::log1p(-model.prior(i));
  }

  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> log_q(count), log_unnorm(count);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double lq = 0.0;
    double lp = -psi_eval_mask(model, mask);
    for (std::size_t i = 0; i < n; ++i) {
      const bool on = ((mask >> i) & 1U) != 0;
      lq += on ? log_q1[i] : log_q0[i];
      lp += on ? log_p1[i] : log_p0[i];
    }
    log_q[mask] = lq;
    log_unnorm[mask] = lp;
    max_log = std::max(max_log, lp);
  }

  double sum = 0.0;
  for (double lp : log_unnorm) sum += std::exp(lp - max_log);
  OracleResult out;
  out.log_z = max_log + std::log(sum);

  double kl = 0.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    kl += std::exp(log_q[mask]) * (log_q[mask] - log_unnorm[mask] + out.log_z);
  }
  out.kl_exact = std::max(0.0, kl);
  return out;
}

double euclidean_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(const MeanFieldState& a, const MeanFieldState& b) {
  if (a.size() != b.size()) throw ModelError("dimension mismatch between states");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace mfprox

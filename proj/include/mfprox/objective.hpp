#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "mfprox/model.hpp"

namespace mfprox {

/// Bernoulli means q_i of a fully factorised distribution Q, each strictly in (0, 1).
class MeanFieldState {
 public:
  explicit MeanFieldState(std::vector<double> q);

  static MeanFieldState from_priors(const EnergyModel& model) {
    return MeanFieldState(model.priors());
  }

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  const std::vector<double>& values() const { return q_; }

  /// Replaces coordinate i; throws ModelError unless 0 < value < 1.
  void set(std::size_t i, double value);

  friend bool operator==(const MeanFieldState&, const MeanFieldState&) = default;

 private:
  std::vector<double> q_;
};

struct OracleResult {
  double log_z = 0.0;
  double kl_exact = 0.0;
};

inline constexpr std::size_t kOracleMaxN = 20;

/// E_Q[Psi], the multilinear extension of Psi at q.
double omega(const EnergyModel& model, const MeanFieldState& state);

/// E[Psi | X_i = 1] - E[Psi | X_i = 0] with the other coordinates drawn from Q.
double conditional_gap(const EnergyModel& model, const MeanFieldState& state, std::size_t i);

/// Bernoulli KL divergence KL(B(qi) || B(p0)); the per-variable entropy term f_i.
double entropy_term(double p0, double qi);

/// G = Omega + sum_i f_i, i.e. KL(Q || P) - log Z.
double objective_g(const EnergyModel& model, const MeanFieldState& state);

std::vector<double> grad_g(const EnergyModel& model, const MeanFieldState& state);

/// Dense Hessian of G. Omega is multilinear, so its diagonal contribution vanishes.
Eigen::MatrixXd hessian_g(const EnergyModel& model, const MeanFieldState& state);

/// Proximal penalty l(q, q0) = KL(B(q) || B(q0)).
double prox_value(double q, double q0);

/// d/dq l(q, q0) = logit(q) - logit(q0).
double prox_derivative(double q, double q0);

/// log Z and the exact KL(Q || P) by enumerating {0,1}^N. Refuses N > 20.
OracleResult kl_oracle(const EnergyModel& model, const MeanFieldState& state);

double euclidean_norm(const std::vector<double>& v);
double distance(const MeanFieldState& a, const MeanFieldState& b);

}  // namespace mfprox

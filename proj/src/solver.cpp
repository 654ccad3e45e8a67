#include "mfprox/solver.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mfprox/numeric.hpp"

namespace mfprox {
namespace {

constexpr double kBoxRoundingSlack = 1e-12;

std::vector<std::size_t> resolve_order(const SolverConfig& config, std::size_t n) {
  if (!config.order.empty()) return config.order;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

bool inside_box(const MeanFieldState& state, const BoxBounds& box) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < box.q_min[i] || state[i] > box.q_max[i]) return false;
  }
  return true;
}

// Pulls values that rounding pushed marginally outside the box back onto it.
double snap_to_box(double q, double lo, double hi) {
  if (q < lo && lo - q < kBoxRoundingSlack) return lo;
  if (q > hi && q - hi < kBoxRoundingSlack) return hi;
  return q;
}

MeanFieldState run_sweep(const EnergyModel& model, MeanFieldState state,
                         const std::vector<std::size_t>& order, double lambda,
                         const BoxBounds* box) {
  for (std::size_t i : order) {
    double q = coordinate_update(model, state, i, lambda);
    if (box != nullptr) q = snap_to_box(q, box->q_min[i], box->q_max[i]);
    state.set(i, q);
  }
  return state;
}

}  // namespace

std::string_view to_string(Termination t) {
  return t == Termination::converged ? "converged" : "budget_exhausted";
}

void validate_config(const SolverConfig& config, std::size_t n) {
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw ModelError(fmt::format("lambda must be finite and >= 0, got {}", config.lambda));
  }
  if (!(config.epsilon > 0.0)) {
    throw ModelError(fmt::format("epsilon must be > 0, got {}", config.epsilon));
  }
  if (config.max_sweeps == 0) throw ModelError("max_sweeps must be positive");
  if (!config.order.empty()) {
    if (config.order.size() != n) {
      throw ModelError(fmt::format("order has {} entries, expected {}", config.order.size(), n));
    }
    std::vector<bool> seen(n, false);
    for (std::size_t i : config.order) {
      if (i >= n || seen[i]) throw ModelError("order is not a permutation of [0, N)");
      seen[i] = true;
    }
  }
}

double coordinate_update(const EnergyModel& model, const MeanFieldState& state, std::size_t i,
                         double lambda) {
  const double gap = conditional_gap(model, state, i);
  double exponent = gap + neg_logit(model.prior(i));
  if (lambda != 0.0) exponent += lambda * neg_logit(state[i]);
  exponent /= 1.0 + lambda;
  return clamp_interior(logistic_of_neg(exponent));
}

MeanFieldState sweep(const EnergyModel& model, const MeanFieldState& state,
                     const SolverConfig& config) {
  validate_config(config, model.size());
  if (state.size() != model.size()) throw ModelError("dimension mismatch between state and model");
  return run_sweep(model, state, resolve_order(config, model.size()), config.lambda, nullptr);
}

TraceRecord make_record(const EnergyModel& model, const MeanFieldState& state, std::size_t sweep,
                        double step_norm) {
  TraceRecord rec;
  rec.sweep = sweep;
  rec.q = state.values();
  rec.g = objective_g(model, state);
  rec.grad_norm = euclidean_norm(grad_g(model, state));
  rec.step_norm = step_norm;
  return rec;
}

SolveResult solve(const EnergyModel& model, const SolverConfig& config,
                  const std::optional<MeanFieldState>& init) {
  validate_config(config, model.size());
  MeanFieldState state = init.value_or(MeanFieldState::from_priors(model));
  if (state.size() != model.size()) throw ModelError("dimension mismatch between init and model");

  const BoxBounds box = box_bounds(model, psi_bounds(model));
  const std::vector<std::size_t> order = resolve_order(config, model.size());

  IterationTrace trace;
  trace.init_in_box = inside_box(state, box);
  const BoxBounds* clamp = trace.init_in_box ? &box : nullptr;
  trace.records.push_back(make_record(model, state, 0, 0.0));

  for (std::size_t t = 1; t <= config.max_sweeps; ++t) {
    MeanFieldState next = run_sweep(model, state, order, config.lambda, clamp);
    const double step = distance(next, state);
    state = std::move(next);
    trace.records.push_back(make_record(model, state, t, step));
    if (trace.records.back().grad_norm <= config.epsilon) {
      trace.termination = Termination::converged;
      return {std::move(state), std::move(trace)};
    }
  }
  trace.termination = Termination::budget_exhausted;
  return {std::move(state), std::move(trace)};
}

SolveResult classic_solve(const EnergyModel& model, const SolverConfig& config,
                          const std::optional<MeanFieldState>& init) {
  SolverConfig classic = config;
  classic.lambda = 0.0;
  return solve(model, classic, init);
}

}  // namespace mfprox

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "mfprox/model.hpp"
#include "mfprox/objective.hpp"

namespace mfprox {

struct SolverConfig {
  /// Weight of the KL-proximal penalty; 0 gives the classical fixed-point scheme.
  double lambda = 0.1;
  /// Stop once ||grad G|| <= epsilon, checked after every full sweep.
  double epsilon = 1e-8;
  std::size_t max_sweeps = 10000;
  /// Coordinate visit order per sweep. Empty means ascending.
  std::vector<std::size_t> order;
};

/// Throws ModelError if the config is unusable for a model with n variables.
void validate_config(const SolverConfig& config, std::size_t n);

enum class Termination { converged, budget_exhausted };

std::string_view to_string(Termination t);

struct TraceRecord {
  std::size_t sweep = 0;
  std::vector<double> q;
  double g = 0.0;
  double grad_norm = 0.0;
  /// ||Q^t - Q^{t-1}||; zero for the initial record.
  double step_norm = 0.0;
};

/// Record 0 holds the initial state, record t the state after sweep t.
struct IterationTrace {
  std::vector<TraceRecord> records;
  Termination termination = Termination::budget_exhausted;
  /// Whether Q^0 lay inside the compact box; box confinement is only guaranteed if so.
  bool init_in_box = true;

  std::size_t sweeps() const { return records.empty() ? 0 : records.size() - 1; }
};

struct SolveResult {
  MeanFieldState state;
  IterationTrace trace;
};

/// Closed-form minimiser over q_i of G + lambda * l(q, q_i), given the other
/// coordinates of `state` (which already hold this sweep's updates for earlier indices).
double coordinate_update(const EnergyModel& model, const MeanFieldState& state, std::size_t i,
                         double lambda);

/// One pass of coordinate updates in config order, each seeing the earlier ones.
MeanFieldState sweep(const EnergyModel& model, const MeanFieldState& state,
                     const SolverConfig& config);

/// Proximal alternate minimisation, started at the priors unless `init` is given.
SolveResult solve(const EnergyModel& model, const SolverConfig& config,
                  const std::optional<MeanFieldState>& init = std::nullopt);

/// The classical alternate minimisation (lambda = 0). Carries no convergence guarantee.
SolveResult classic_solve(const EnergyModel& model, const SolverConfig& config,
                          const std::optional<MeanFieldState>& init = std::nullopt);

/// Builds a trace record for `state` reached at sweep index `sweep`.
TraceRecord make_record(const EnergyModel& model, const MeanFieldState& state, std::size_t sweep,
                        double step_norm);

}  // namespace mfprox

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mfprox/model.hpp"
#include "mfprox/objective.hpp"
#include "mfprox/solver.hpp"

namespace mfprox {

/// Constants behind the convergence argument, computed a priori from the model.
struct AnalysisConstants {
  PsiBounds psi_bounds;
  BoxBounds box;
  /// Bound on ||grad Omega||: (psi_max - psi_min) * sqrt(N).
  double k_omega = 0.0;
  /// max_i (1/q_min_i + 1/(1 - q_max_i)), a Lipschitz constant of l' on the box.
  double k_l = 0.0;
  /// 2 k_l + sqrt(N - 1) k_omega
  double grad_bound_coeff = 0.0;
};

AnalysisConstants compute_constants(const EnergyModel& model,
                                    std::size_t max_exact_n = kDefaultMaxExactN);

struct CheckRecord {
  std::size_t sweep = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs before tolerance; negative values mean the raw inequality is violated.
  double slack = 0.0;
  bool passed = true;
};

struct CheckReport {
  std::vector<CheckRecord> records;
  bool passed = true;
  double worst_slack = 0.0;

  std::optional<std::size_t> first_failure() const;
};

class TraceTooShort : public std::invalid_argument {
 public:
  TraceTooShort() : std::invalid_argument("trace too short") {}
};

inline constexpr double kDecreaseTol = 1e-10;
inline constexpr double kGradientBoundTol = 1e-9;
inline constexpr double kGradientBoundFloor = 1e-12;
inline constexpr double kBoxTol = 1e-12;

/// G(Q^{t+1}) + lambda/2 ||Q^{t+1} - Q^t||^2 <= G(Q^t) + tol (1 + |G(Q^t)|) for each pair.
CheckReport check_sufficient_decrease(const IterationTrace& trace, double lambda,
                                      double tol = kDecreaseTol);

/// ||grad G(Q^u)|| <= coeff ||Q^u - Q^{u-1}|| (1 + tol) + 1e-12 for every u >= 1.
CheckReport check_gradient_bound(const IterationTrace& trace, const AnalysisConstants& constants,
                                 double tol = kGradientBoundTol);

/// Every snapshot lies in [q_min - tol, q_max + tol]. Records report the worst coordinate.
CheckReport check_box_membership(const IterationTrace& trace, const BoxBounds& box,
                                 double tol = kBoxTol);

enum class RateRegime { linear, sublinear, inconclusive };

std::string_view to_string(RateRegime r);

struct RateFitReport {
  RateRegime regime = RateRegime::inconclusive;
  std::optional<double> tau;
  std::optional<double> theta_estimate;
  double fit_quality = 0.0;
  std::size_t window = 0;
  std::string reason;
  /// R^2 of both candidate fits and the power-law exponent, for reporting.
  double geometric_r2 = 0.0;
  double power_r2 = 0.0;
  double power_exponent = 0.0;
};

inline constexpr double kRateFitQuality = 0.98;
inline constexpr std::size_t kRateFitMinPoints = 5;
inline constexpr double kRateDistanceFloor = 1e-13;

/// Classifies the tail of a trace as geometric or power-law convergence towards
/// its final iterate by least squares on log-distances.
RateFitReport fit_rate(const IterationTrace& trace, std::size_t window);

struct SsocReport {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

inline constexpr double kSsocThreshold = 1e-10;

/// Positive definiteness of the Hessian of G at `state`. N is limited to 1000.
SsocReport check_ssoc(const EnergyModel& model, const MeanFieldState& state);

}  // namespace mfprox

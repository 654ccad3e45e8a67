#include "mfprox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace mfprox {
namespace {

double vector_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void finalize(CheckReport& report) {
  report.passed = true;
  report.worst_slack = report.records.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const CheckRecord& r : report.records) {
    report.passed = report.passed && r.passed;
    report.worst_slack = std::min(report.worst_slack, r.slack);
  }
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit fit;
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) return fit;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (fit.intercept + fit.slope * x[k]);
    ss_res += r * r;
  }
  fit.r2 = 1.0 - ss_res / syy;
  return fit;
}

}  // namespace

std::optional<std::size_t> CheckReport::first_failure() const {
  for (const CheckRecord& r : records) {
    if (!r.passed) return r.sweep;
  }
  return std::nullopt;
}

AnalysisConstants compute_constants(const EnergyModel& model, std::size_t max_exact_n) {
  AnalysisConstants c;
  c.psi_bounds = psi_bounds(model, max_exact_n);
  c.box = box_bounds(model, c.psi_bounds);
  const auto n = static_cast<double>(model.size());
  c.k_omega = (c.psi_bounds.psi_max - c.psi_bounds.psi_min) * std::sqrt(n);
  for (std::size_t i = 0; i < model.size(); ++i) {
    c.k_l = std::max(c.k_l, 1.0 / c.box.q_min[i] + 1.0 / (1.0 - c.box.q_max[i]));
  }
  c.grad_bound_coeff = 2.0 * c.k_l + std::sqrt(n - 1.0) * c.k_omega;
  return c;
}

CheckReport check_sufficient_decrease(const IterationTrace& trace, double lambda, double tol) {
  if (trace.records.size() < 2) throw TraceTooShort();
  CheckReport report;
  for (std::size_t t = 0; t + 1 < trace.records.size(); ++t) {
    const TraceRecord& prev = trace.records[t];
    const TraceRecord& next = trace.records[t + 1];
    const double step = vector_distance(next.q, prev.q);
    CheckRecord r;
    r.sweep = next.sweep;
    r.lhs = next.g + 0.5 * lambda * step * step;
    r.rhs = prev.g;
    r.slack = r.rhs - r.lhs;
    r.passed = r.slack >= -tol * (1.0 + std::abs(prev.g));
    report.records.push_back(r);
  }
  finalize(report);
  return report;
}

CheckReport check_gradient_bound(const IterationTrace& trace, const AnalysisConstants& constants,
                                 double tol) {
  if (trace.records.size() < 2) throw TraceTooShort();
  CheckReport report;
  for (std::size_t u = 1; u < trace.records.size(); ++u) {
    const TraceRecord& rec = trace.records[u];
    const double step = vector_distance(rec.q, trace.records[u - 1].q);
    const double bound = constants.grad_bound_coeff * step;
    CheckRecord r;
    r.sweep = rec.sweep;
    r.lhs = rec.grad_norm;
    r.rhs = bound * (1.0 + tol) + kGradientBoundFloor;
    r.slack = bound - rec.grad_norm;
    r.passed = r.lhs <= r.rhs;
    report.records.push_back(r);
  }
  finalize(report);
  return report;
}

CheckReport check_box_membership(const IterationTrace& trace, const BoxBounds& box, double tol) {
  CheckReport report;
  for (const TraceRecord& rec : trace.records) {
    if (rec.q.size() != box.q_min.size()) {
      throw ModelError("dimension mismatch between trace and box");
    }
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rec.q.size(); ++i) {
      slack = std::min({slack, rec.q[i] - box.q_min[i], box.q_max[i] - rec.q[i]});
    }
    CheckRecord r;
    r.sweep = rec.sweep;
    r.lhs = -slack;  // distance outside the box, negative when inside
    r.rhs = tol;
    r.slack = slack;
    r.passed = slack >= -tol;
    report.records.push_back(r);
  }
  finalize(report);
  return report;
}

std::string_view to_string(RateRegime r) {
  switch (r) {
    case RateRegime::linear:
      return "linear";
    case RateRegime::sublinear:
      return "sublinear";
    case RateRegime::inconclusive:
      break;
  }
  return "inconclusive";
}

RateFitReport fit_rate(const IterationTrace& trace, std::size_t window) {
  RateFitReport report;
  if (trace.records.size() < 2) {
    report.reason = "trace too short";
    return report;
  }
  if (trace.termination != Termination::converged) {
    report.reason = "trace did not converge";
    return report;
  }
  const std::size_t last = trace.records.size() - 1;
  // t = 0 is excluded so that log t is defined for the power-law fit.
  const std::size_t available = last - 1;
  report.window = std::min(window, available);
  const std::vector<double>& limit = trace.records[last].q;

  std::vector<double> ts, log_ts, log_ds;
  for (std::size_t t = last - report.window; t < last; ++t) {
    const double d = vector_distance(trace.records[t].q, limit);
    if (d < kRateDistanceFloor) continue;
    const auto tt = static_cast<double>(trace.records[t].sweep);
    ts.push_back(tt);
    log_ts.push_back(std::log(tt));
    log_ds.push_back(std::log(d));
  }
  if (ts.size() < kRateFitMinPoints) {
    report.reason = fmt::format("insufficient usable points ({} < {})", ts.size(), kRateFitMinPoints);
    return report;
  }

  const LineFit geometric = least_squares(ts, log_ds);
  const LineFit power = least_squares(log_ts, log_ds);
  report.geometric_r2 = geometric.r2;
  report.power_r2 = power.r2;
  report.power_exponent = -power.slope;

  if (geometric.r2 >= power.r2) {
    report.fit_quality = geometric.r2;
    if (geometric.r2 < kRateFitQuality) {
      report.reason = "geometric fit quality below threshold";
    } else if (geometric.slope >= 0.0) {
      report.reason = "distances do not decrease";
    } else {
      report.regime = RateRegime::linear;
      report.tau = std::exp(geometric.slope);
    }
  } else {
    report.fit_quality = power.r2;
    const double e = -power.slope;
    if (power.r2 < kRateFitQuality) {
      report.reason = "power-law fit quality below threshold";
    } else if (e <= 0.0) {
      report.reason = "distances do not decrease";
    } else {
      report.regime = RateRegime::sublinear;
      report.theta_estimate = (1.0 + e) / (1.0 + 2.0 * e);
    }
  }
  return report;
}

SsocReport check_ssoc(const EnergyModel& model, const MeanFieldState& state) {
  if (model.size() > 1000) {
    throw ModelError("check_ssoc is limited to N <= 1000 (dense eigendecomposition)");
  }
  const Eigen::MatrixXd h = hessian_g(model, state);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  SsocReport report;
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.max_eigenvalue = solver.eigenvalues().maxCoeff();
  report.positive_definite = report.min_eigenvalue > kSsocThreshold;
  return report;
}

}  // namespace mfprox

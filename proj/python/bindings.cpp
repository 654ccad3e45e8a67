#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfprox/diagnostics.hpp"
#include "mfprox/generate.hpp"
#include "mfprox/io.hpp"
#include "mfprox/model.hpp"
#include "mfprox/objective.hpp"
#include "mfprox/solver.hpp"

namespace py = pybind11;
using namespace mfprox;

namespace {

// States cross the boundary as plain sequences of floats.
MeanFieldState state(const std::vector<double>& q) { return MeanFieldState(q); }

SolverConfig make_config(double lambda, double epsilon, std::size_t max_sweeps,
                         std::vector<std::size_t> order) {
  SolverConfig c;
  c.lambda = lambda;
  c.epsilon = epsilon;
  c.max_sweeps = max_sweeps;
  c.order = std::move(order);
  return c;
}

std::optional<MeanFieldState> make_init(const std::optional<std::vector<double>>& init) {
  if (!init) return std::nullopt;
  return MeanFieldState(*init);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field variational inference with KL-proximal alternate minimisation";
  m.attr("__version__") = MFPROX_VERSION;

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<TraceTooShort>(m, "TraceTooShort", PyExc_ValueError);

  py::class_<Term>(m, "Term")
      .def(py::init([](std::vector<std::size_t> vars, double coeff) { return Term{std::move(vars), coeff}; }),
           py::arg("vars"), py::arg("coeff"))
      .def_readonly("vars", &Term::vars)
      .def_readonly("coeff", &Term::coeff)
      .def("__eq__", [](const Term& a, const Term& b) { return a == b; })
      .def("__repr__", [](const Term& t) {
        return "Term(" + py::repr(py::cast(t.vars)).cast<std::string>() + ", " + format_real(t.coeff) + ")";
      });

  py::class_<EnergyModel>(m, "EnergyModel")
      .def(py::init<std::size_t, std::vector<Term>, std::vector<double>>(), py::arg("n"),
           py::arg("terms"), py::arg("priors"))
      .def(py::init([](std::size_t n, const std::vector<std::pair<std::vector<std::size_t>, double>>& pairs,
                       std::vector<double> priors) {
             std::vector<Term> terms;
             for (const auto& [vars, coeff] : pairs) terms.push_back(Term{vars, coeff});
             return EnergyModel(n, std::move(terms), std::move(priors));
           }),
           py::arg("n"), py::arg("terms"), py::arg("priors"), "Terms given as (vars, coeff) pairs.")
      .def_property_readonly("n", &EnergyModel::size)
      .def_property_readonly("terms", &EnergyModel::terms)
      .def_property_readonly("priors", &EnergyModel::priors)
      .def("__len__", &EnergyModel::size)
      .def("__eq__", [](const EnergyModel& a, const EnergyModel& b) { return a == b; })
      .def("to_json", &model_to_json)
      .def_static("from_json", [](const std::string& text) { return model_from_json(text); })
      .def_static("load", &load_model)
      .def("save", [](const EnergyModel& model, const std::string& path) { save_model(model, path); });

  m.def("psi", [](const EnergyModel& model, std::vector<std::uint8_t> x) { return psi_eval(model, x); },
        py::arg("model"), py::arg("x"));

  m.def("omega", [](const EnergyModel& model, const std::vector<double>& q) { return omega(model, state(q)); });
  m.def("conditional_gap", [](const EnergyModel& model, const std::vector<double>& q, std::size_t i) {
    return conditional_gap(model, state(q), i);
  });
  m.def("objective_g", [](const EnergyModel& model, const std::vector<double>& q) {
    return objective_g(model, state(q));
  });
  m.def("grad_g", [](const EnergyModel& model, const std::vector<double>& q) { return grad_g(model, state(q)); });
  m.def("hessian_g", [](const EnergyModel& model, const std::vector<double>& q) {
    return hessian_g(model, state(q));
  });
  m.def("prox_value", &prox_value, py::arg("q"), py::arg("q0"));
  m.def("kl_oracle", [](const EnergyModel& model, const std::vector<double>& q) {
    const OracleResult r = kl_oracle(model, state(q));
    return py::dict(py::arg("log_z") = r.log_z, py::arg("kl_exact") = r.kl_exact);
  });

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("sweep", &TraceRecord::sweep)
      .def_readonly("q", &TraceRecord::q)
      .def_readonly("g", &TraceRecord::g)
      .def_readonly("grad_norm", &TraceRecord::grad_norm)
      .def_readonly("step_norm", &TraceRecord::step_norm);

  py::class_<IterationTrace>(m, "IterationTrace")
      .def_readonly("records", &IterationTrace::records)
      .def_property_readonly("termination",
                             [](const IterationTrace& t) { return std::string(to_string(t.termination)); })
      .def_readonly("init_in_box", &IterationTrace::init_in_box)
      .def_property_readonly("sweeps", &IterationTrace::sweeps)
      .def("to_csv", [](const IterationTrace& t) {
        std::ostringstream ss;
        write_trace_csv(t, ss);
        return ss.str();
      });

  py::class_<SolveResult>(m, "SolveResult")
      .def_property_readonly("q", [](const SolveResult& r) { return r.state.values(); })
      .def_readonly("trace", &SolveResult::trace);

  m.def("coordinate_update",
        [](const EnergyModel& model, const std::vector<double>& q, std::size_t i, double lambda) {
          return coordinate_update(model, state(q), i, lambda);
        },
        py::arg("model"), py::arg("q"), py::arg("i"), py::arg("lam"));
  m.def("solve",
        [](const EnergyModel& model, double lambda, double epsilon, std::size_t max_sweeps,
           std::vector<std::size_t> order, std::optional<std::vector<double>> init) {
          return solve(model, make_config(lambda, epsilon, max_sweeps, std::move(order)), make_init(init));
        },
        py::arg("model"), py::arg("lam") = 0.1, py::arg("epsilon") = 1e-8,
        py::arg("max_sweeps") = 10000, py::arg("order") = std::vector<std::size_t>{},
        py::arg("init") = py::none());

  py::class_<BoxBounds>(m, "BoxBounds")
      .def_readonly("q_min", &BoxBounds::q_min)
      .def_readonly("q_max", &BoxBounds::q_max);

  py::class_<AnalysisConstants>(m, "AnalysisConstants")
      .def_property_readonly("psi_min", [](const AnalysisConstants& c) { return c.psi_bounds.psi_min; })
      .def_property_readonly("psi_max", [](const AnalysisConstants& c) { return c.psi_bounds.psi_max; })
      .def_readonly("box", &AnalysisConstants::box)
      .def_readonly("k_omega", &AnalysisConstants::k_omega)
      .def_readonly("k_l", &AnalysisConstants::k_l)
      .def_readonly("grad_bound_coeff", &AnalysisConstants::grad_bound_coeff);
  m.def("compute_constants", [](const EnergyModel& model) { return compute_constants(model); });

  py::class_<CheckReport>(m, "CheckReport")
      .def_readonly("passed", &CheckReport::passed)
      .def_readonly("worst_slack", &CheckReport::worst_slack)
      .def_property_readonly("first_failure", &CheckReport::first_failure);
  m.def("check_sufficient_decrease",
        [](const IterationTrace& t, double lambda) { return check_sufficient_decrease(t, lambda); },
        py::arg("trace"), py::arg("lam"));
  m.def("check_gradient_bound", [](const IterationTrace& t, const AnalysisConstants& c) {
    return check_gradient_bound(t, c);
  });
  m.def("check_box_membership",
        [](const IterationTrace& t, const BoxBounds& box) { return check_box_membership(t, box); });

  py::class_<RateFitReport>(m, "RateFitReport")
      .def_property_readonly("regime", [](const RateFitReport& r) { return std::string(to_string(r.regime)); })
      .def_readonly("tau", &RateFitReport::tau)
      .def_readonly("theta_estimate", &RateFitReport::theta_estimate)
      .def_readonly("fit_quality", &RateFitReport::fit_quality)
      .def_readonly("window", &RateFitReport::window)
      .def_readonly("reason", &RateFitReport::reason);
  m.def("fit_rate", &fit_rate, py::arg("trace"), py::arg("window") = 50);

  m.def("check_ssoc", [](const EnergyModel& model, const std::vector<double>& q) {
    const SsocReport r = check_ssoc(model, state(q));
    return py::dict(py::arg("positive_definite") = r.positive_definite,
                    py::arg("min_eigenvalue") = r.min_eigenvalue,
                    py::arg("max_eigenvalue") = r.max_eigenvalue);
  });

  m.def("ising_pair", &ising_pair, py::arg("coupling") = 1.0);
  m.def("generate_ising_grid", &generate_ising_grid, py::arg("side"), py::arg("seed"),
        py::arg("coupling") = 1.0);
  m.def("generate_random_poly",
        [](std::size_t n, std::uint64_t seed, double scale, std::size_t max_order, bool random_priors,
           bool constant_term) {
          return generate_random_poly(n, seed, {scale, max_order, random_priors, constant_term});
        },
        py::arg("n"), py::arg("seed"), py::arg("scale") = 1.0, py::arg("max_order") = 3,
        py::arg("random_priors") = false, py::arg("constant_term") = false);
}

// mfprox command-line front end.
//
// Exit codes: 0 success/converged, 1 input error, 2 budget exhausted,
// 3 diagnostic check failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mfprox/diagnostics.hpp"
#include "mfprox/generate.hpp"
#include "mfprox/io.hpp"
#include "mfprox/model.hpp"
#include "mfprox/objective.hpp"
#include "mfprox/random.hpp"
#include "mfprox/solver.hpp"

namespace {

using nlohmann::ordered_json;
using namespace mfprox;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;
constexpr int kExitCheckFailed = 3;
constexpr std::size_t kOracleCheckMaxN = 12;

struct SolverFlags {
  double lambda = 0.1;
  double epsilon = 1e-8;
  std::size_t max_sweeps = 10000;
  std::string order = "ascending";
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags, bool with_lambda) {
  if (with_lambda) {
    cmd->add_option("--lambda", flags.lambda, "Proximal weight (0 = classical scheme)")
        ->capture_default_str();
  }
  cmd->add_option("--epsilon", flags.epsilon, "Gradient-norm stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--max-sweeps", flags.max_sweeps, "Sweep budget")->capture_default_str();
  cmd->add_option("--order", flags.order,
                  "Coordinate order: 'ascending' or a comma-separated permutation")
      ->capture_default_str();
}

std::vector<std::size_t> parse_order(const std::string& text) {
  if (text == "ascending") return {};
  std::vector<std::size_t> order;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw ModelError(fmt::format("invalid entry '{}' in --order", item));
    }
    order.push_back(static_cast<std::size_t>(v));
  }
  return order;
}

SolverConfig make_config(const SolverFlags& flags) {
  SolverConfig config;
  config.lambda = flags.lambda;
  config.epsilon = flags.epsilon;
  config.max_sweeps = flags.max_sweeps;
  config.order = parse_order(flags.order);
  return config;
}

ordered_json config_json(const SolverConfig& config) {
  ordered_json j;
  j["lambda"] = config.lambda;
  j["epsilon"] = config.epsilon;
  j["max_sweeps"] = config.max_sweeps;
  if (config.order.empty()) {
    j["order"] = "ascending";
  } else {
    j["order"] = config.order;
  }
  return j;
}

ordered_json manifest_header(const std::string& command) {
  ordered_json j;
  j["tool"] = "mfprox";
  j["version"] = MFPROX_VERSION;
  j["command"] = command;
  return j;
}

std::string state_json(const std::vector<double>& q) {
  std::string out = "{\"q\": [";
  for (std::size_t i = 0; i < q.size(); ++i) out += (i == 0 ? "" : ", ") + format_real(q[i]);
  return out + "]}\n";
}

void write_trace(const IterationTrace& trace, const std::string& path) {
  std::ostringstream ss;
  write_trace_csv(trace, ss);
  write_file(path, ss.str());
}

std::string strip_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return s.substr(0, s.size() - suffix.size());
  }
  return s;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string model_path;
  SolverFlags flags;
  std::vector<double> init;
  std::string out = "run";
};

int cmd_solve(const SolveArgs& args) {
  const EnergyModel model = load_model(args.model_path);
  const SolverConfig config = make_config(args.flags);
  std::optional<MeanFieldState> init;
  if (!args.init.empty()) init = MeanFieldState(args.init);

  const SolveResult result = solve(model, config, init);
  const TraceRecord& last = result.trace.records.back();

  const std::string trace_path = args.out + ".trace.csv";
  const std::string state_path = args.out + ".state.json";
  const std::string manifest_path = args.out + ".manifest.json";

  ordered_json manifest = manifest_header("solve");
  manifest["model_path"] = args.model_path;
  manifest["variant"] = config.lambda == 0.0 ? "classic" : "proximal";
  manifest["config"] = config_json(config);
  if (init) {
    manifest["init"] = init->values();
  } else {
    manifest["init"] = "priors";
  }
  manifest["seed"] = nullptr;
  manifest["outputs"] = {{"trace", trace_path}, {"state", state_path}};
  manifest["result"] = {{"termination", std::string(to_string(result.trace.termination))},
                        {"sweeps", result.trace.sweeps()},
                        {"final_g", last.g},
                        {"final_grad_norm", last.grad_norm},
                        {"init_in_box", result.trace.init_in_box}};

  write_trace(result.trace, trace_path);
  write_file(state_path, state_json(result.state.values()));
  write_file(manifest_path, manifest.dump(2) + "\n");

  std::cout << "sweeps: " << result.trace.sweeps() << '\n'
            << "final_g: " << format_real(last.g) << '\n'
            << "final_grad_norm: " << format_real(last.grad_norm) << '\n'
            << "termination: " << to_string(result.trace.termination) << '\n';
  if (config.lambda == 0.0) {
    std::cout << "note: lambda = 0 is the classical scheme (no convergence guarantee)\n";
  }
  if (!result.trace.init_in_box) {
    std::cout << "note: initial state lies outside the compact box; confinement not guaranteed\n";
  }
  return result.trace.termination == Termination::converged ? kExitOk : kExitBudget;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  std::string trace_path;
  std::string model_path;
  std::string manifest_path;
  std::string out;
  std::size_t window = 50;
};

ordered_json check_json(const std::string& status, const CheckReport* report) {
  ordered_json j;
  j["status"] = status;
  if (report != nullptr) {
    j["worst_slack"] = report->worst_slack;
    std::vector<std::size_t> failing;
    for (const CheckRecord& r : report->records) {
      if (!r.passed) failing.push_back(r.sweep);
    }
    j["failing_sweeps"] = failing;
  }
  return j;
}

int cmd_diagnose(const DiagnoseArgs& args) {
  const EnergyModel model = load_model(args.model_path);
  std::ifstream trace_in(args.trace_path);
  if (!trace_in) throw std::runtime_error(fmt::format("cannot open '{}'", args.trace_path));
  IterationTrace trace = read_trace_csv(trace_in);

  const std::string manifest_path =
      args.manifest_path.empty() ? strip_suffix(args.trace_path, ".trace.csv") + ".manifest.json"
                                 : args.manifest_path;
  const auto manifest = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("config") ||
      !manifest["config"].contains("lambda") || !manifest["config"]["lambda"].is_number()) {
    throw ModelError(fmt::format("manifest '{}' does not carry the run's lambda", manifest_path));
  }
  const double lambda = manifest["config"]["lambda"].get<double>();
  const bool converged = manifest.contains("result") &&
                         manifest["result"].value("termination", "") == "converged";
  trace.termination = converged ? Termination::converged : Termination::budget_exhausted;

  if (trace.records.front().q.size() != model.size()) {
    throw ModelError(fmt::format("trace has {} variables but the model has {}",
                                 trace.records.front().q.size(), model.size()));
  }
  // Objective values are recomputed from the model, not taken from the file.
  for (TraceRecord& r : trace.records) {
    const std::size_t sweep = r.sweep;
    const double step = r.step_norm;
    r = make_record(model, MeanFieldState(r.q), sweep, step);
  }

  const AnalysisConstants constants = compute_constants(model);
  const MeanFieldState init(trace.records.front().q);
  bool init_in_box = true;
  for (std::size_t i = 0; i < model.size(); ++i) {
    init_in_box = init_in_box && init[i] >= constants.box.q_min[i] && init[i] <= constants.box.q_max[i];
  }
  trace.init_in_box = init_in_box;

  bool all_pass = true;
  ordered_json checks;
  const bool long_enough = trace.records.size() >= 2;

  if (long_enough) {
    const CheckReport r = check_sufficient_decrease(trace, lambda);
    checks["sufficient_decrease"] = check_json(r.passed ? "pass" : "fail", &r);
    all_pass = all_pass && r.passed;
  } else {
    checks["sufficient_decrease"] = check_json("not_applicable", nullptr);
  }

  if (long_enough && init_in_box) {
    const CheckReport r = check_gradient_bound(trace, constants);
    checks["gradient_bound"] = check_json(r.passed ? "pass" : "fail", &r);
    all_pass = all_pass && r.passed;
  } else {
    checks["gradient_bound"] = check_json("not_applicable", nullptr);
  }

  {
    const CheckReport r = check_box_membership(trace, constants.box);
    if (init_in_box) {
      checks["box_membership"] = check_json(r.passed ? "pass" : "fail", &r);
      all_pass = all_pass && r.passed;
    } else {
      checks["box_membership"] = check_json(r.passed ? "pass" : "flagged_init_outside_box", &r);
    }
  }

  const RateFitReport rate = fit_rate(trace, args.window);
  ordered_json rate_json;
  rate_json["regime"] = std::string(to_string(rate.regime));
  rate_json["tau"] = rate.tau ? ordered_json(*rate.tau) : ordered_json(nullptr);
  rate_json["theta_estimate"] =
      rate.theta_estimate ? ordered_json(*rate.theta_estimate) : ordered_json(nullptr);
  rate_json["fit_quality"] = rate.fit_quality;
  rate_json["window"] = rate.window;
  rate_json["reason"] = rate.reason;

  const SsocReport ssoc = check_ssoc(model, MeanFieldState(trace.records.back().q));

  ordered_json report = manifest_header("diagnose");
  report["trace_path"] = args.trace_path;
  report["model_path"] = args.model_path;
  report["manifest_path"] = manifest_path;
  report["lambda"] = lambda;
  report["sweeps"] = trace.sweeps();
  report["init_in_box"] = init_in_box;
  report["constants"] = {
      {"psi_min", constants.psi_bounds.psi_min},
      {"psi_max", constants.psi_bounds.psi_max},
      {"psi_bounds_mode", constants.psi_bounds.mode == BoundsMode::exact ? "exact" : "interval"},
      {"k_omega", constants.k_omega},
      {"k_l", constants.k_l},
      {"grad_bound_coeff", constants.grad_bound_coeff},
      {"q_min", constants.box.q_min},
      {"q_max", constants.box.q_max}};
  report["checks"] = checks;
  report["rate_fit"] = rate_json;
  report["ssoc"] = {{"positive_definite", ssoc.positive_definite},
                    {"min_eigenvalue", ssoc.min_eigenvalue},
                    {"max_eigenvalue", ssoc.max_eigenvalue}};
  report["verdict"] = all_pass ? "pass" : "fail";

  const std::string out = args.out.empty()
                              ? strip_suffix(args.trace_path, ".trace.csv") + ".report.json"
                              : args.out;
  write_file(out, report.dump(2) + "\n");

  for (const auto& [name, value] : checks.items()) {
    std::cout << name << ": " << value["status"].get<std::string>();
    if (value.contains("failing_sweeps") && !value["failing_sweeps"].empty()) {
      std::cout << " (failing sweeps: " << value["failing_sweeps"].dump() << ")";
    }
    std::cout << '\n';
  }
  std::cout << "rate_fit: " << to_string(rate.regime);
  if (rate.tau) std::cout << " tau=" << format_real(*rate.tau);
  if (rate.theta_estimate) std::cout << " theta=" << format_real(*rate.theta_estimate);
  if (!rate.reason.empty()) std::cout << " (" << rate.reason << ")";
  std::cout << '\n'
            << "ssoc: " << (ssoc.positive_definite ? "positive_definite" : "not_positive_definite")
            << " min_eigenvalue=" << format_real(ssoc.min_eigenvalue) << '\n'
            << "verdict: " << (all_pass ? "pass" : "fail") << '\n';
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string model_path;
  std::vector<double> lambdas;
  SolverFlags flags;
  std::size_t horizon = 0;
  std::string out = "compare";
};

int cmd_compare(const CompareArgs& args) {
  const EnergyModel model = load_model(args.model_path);
  if (args.lambdas.empty()) throw ModelError("--lambdas must list at least one value");
  SolverConfig base = make_config(args.flags);

  base.lambda = 0.0;
  const SolveResult reference = solve(model, base);
  std::vector<SolveResult> runs;
  for (double lambda : args.lambdas) {
    SolverConfig c = base;
    c.lambda = lambda;
    runs.push_back(solve(model, c));
  }

  ordered_json manifest = manifest_header("compare");
  manifest["model_path"] = args.model_path;
  manifest["config"] = config_json(base);
  manifest["config"].erase("lambda");
  manifest["lambdas"] = args.lambdas;
  manifest["horizon"] = args.horizon;
  manifest["init"] = "priors";
  manifest["seed"] = nullptr;

  const std::string classic_path = args.out + ".classic.trace.csv";
  write_trace(reference.trace, classic_path);
  ordered_json outputs;
  outputs["classic_trace"] = classic_path;

  std::string table = "lambda,sweeps,compared_sweeps,max_distance\n";
  std::cout << "lambda sweeps compared max_distance\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const IterationTrace& trace = runs[k].trace;
    std::size_t common = std::min(trace.sweeps(), reference.trace.sweeps());
    if (args.horizon > 0) common = std::min(common, args.horizon);
    double max_dist = 0.0;
    for (std::size_t t = 0; t <= common; ++t) {
      max_dist = std::max(max_dist, distance(MeanFieldState(trace.records[t].q),
                                             MeanFieldState(reference.trace.records[t].q)));
    }
    const std::string path = fmt::format("{}.lambda_{}.trace.csv", args.out, k);
    write_trace(trace, path);
    outputs[fmt::format("lambda_{}_trace", k)] = path;
    table += fmt::format("{},{},{},{}\n", format_real(args.lambdas[k]), trace.sweeps(), common,
                         format_real(max_dist));
    std::cout << format_real(args.lambdas[k]) << ' ' << trace.sweeps() << ' ' << common << ' '
              << format_real(max_dist) << '\n';
  }
  const std::string table_path = args.out + ".compare.csv";
  outputs["table"] = table_path;
  manifest["outputs"] = outputs;
  write_file(table_path, table);
  write_file(args.out + ".manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- oracle-check

struct OracleArgs {
  std::string model_path;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
};

int cmd_oracle_check(const OracleArgs& args) {
  const EnergyModel model = load_model(args.model_path);
  if (model.size() > kOracleCheckMaxN) {
    std::cerr << "error: oracle limited to N <= 12 for this command (model has N = "
              << model.size() << ")\n";
    return kExitInput;
  }
  Rng rng(args.seed);
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t s = 0; s < args.samples; ++s) {
    const MeanFieldState state = random_state(model.size(), rng);
    const double g = objective_g(model, state);
    const OracleResult oracle = kl_oracle(model, state);
    const double err = std::abs(g - (oracle.kl_exact - oracle.log_z));
    const double scaled = err / (1.0 + std::abs(g));
    worst = std::max(worst, scaled);
    if (scaled > 1e-9) ++failures;
  }
  std::cout << "samples: " << args.samples << '\n'
            << "seed: " << args.seed << '\n'
            << "rng: " << Rng::kAlgorithm << '\n'
            << "worst_relative_error: " << format_real(worst) << '\n'
            << "failures: " << failures << '\n';
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double coupling = 1.0;
  double scale = 1.0;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  std::optional<EnergyModel> model;
  if (args.kind == "ising_grid") {
    if (args.n == 0 || args.n > 64) throw ModelError("ising_grid side must be in [1, 64]");
    model = generate_ising_grid(args.n, args.seed, args.coupling);
  } else if (args.kind == "random_poly") {
    if (args.n == 0 || args.n > 10000) throw ModelError("random_poly n must be in [1, 10000]");
    RandomPolyOptions options;
    options.scale = args.scale;
    model = generate_random_poly(args.n, args.seed, options);
  } else {
    throw ModelError(fmt::format("unknown kind '{}' (expected ising_grid or random_poly)", args.kind));
  }
  const std::string text = model_to_json(*model);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field variational inference with KL-proximal alternate minimisation"};
  app.set_version_flag("--version", std::string("mfprox ") + MFPROX_VERSION);
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Run the solver on a model file");
  solve_cmd->add_option("model", solve_args.model_path, "Model JSON file")->required();
  add_solver_flags(solve_cmd, solve_args.flags, true);
  solve_cmd->add_option("--init", solve_args.init, "Initial state q_0,...,q_{N-1} (default: priors)")
      ->delimiter(',');
  solve_cmd->add_option("--out", solve_args.out, "Output prefix")->capture_default_str();

  DiagnoseArgs diag_args;
  auto* diag_cmd = app.add_subcommand("diagnose", "Check convergence properties of a trace");
  diag_cmd->add_option("trace", diag_args.trace_path, "Trace CSV written by solve")->required();
  diag_cmd->add_option("model", diag_args.model_path, "Model JSON file")->required();
  diag_cmd->add_option("--manifest", diag_args.manifest_path,
                       "Run manifest (default: <trace prefix>.manifest.json)");
  diag_cmd->add_option("--window", diag_args.window, "Trailing sweeps used by the rate fit")
      ->capture_default_str();
  diag_cmd->add_option("--out", diag_args.out, "Report path (default: <trace prefix>.report.json)");

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare proximal trajectories to the classical one");
  cmp_cmd->add_option("model", cmp_args.model_path, "Model JSON file")->required();
  cmp_cmd->add_option("--lambdas", cmp_args.lambdas, "Comma-separated proximal weights")
      ->delimiter(',')
      ->required();
  add_solver_flags(cmp_cmd, cmp_args.flags, false);
  cmp_cmd->add_option("--horizon", cmp_args.horizon, "Compare at most this many sweeps (0 = all)")
      ->capture_default_str();
  cmp_cmd->add_option("--out", cmp_args.out, "Output prefix")->capture_default_str();

  OracleArgs oracle_args;
  auto* oracle_cmd =
      app.add_subcommand("oracle-check", "Verify G = KL - log Z by enumeration on random states");
  oracle_cmd->add_option("model", oracle_args.model_path, "Model JSON file")->required();
  oracle_cmd->add_option("--samples", oracle_args.samples, "Number of random states")
      ->capture_default_str();
  oracle_cmd->add_option("--seed", oracle_args.seed, "Random seed")->capture_default_str();

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic model file");
  gen_cmd->add_option("kind", gen_args.kind, "ising_grid (n = grid side) or random_poly")->required();
  gen_cmd->add_option("n", gen_args.n, "Size parameter")->required();
  gen_cmd->add_option("--seed", gen_args.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--coupling", gen_args.coupling, "ising_grid coupling magnitude")
      ->capture_default_str();
  gen_cmd->add_option("--scale", gen_args.scale, "random_poly coefficient range")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen_args.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args);
    if (*diag_cmd) return cmd_diagnose(diag_args);
    if (*cmp_cmd) return cmd_compare(cmp_args);
    if (*oracle_cmd) return cmd_oracle_check(oracle_args);
    if (*gen_cmd) return cmd_generate(gen_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

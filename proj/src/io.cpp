#include "mfprox/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace mfprox {
namespace {

using nlohmann::json;

double parse_real(const std::string& token, std::size_t line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ModelError(fmt::format("trace line {}: cannot parse '{}' as a real", line, token));
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string model_to_json(const EnergyModel& model) {
  std::string out = fmt::format("{{\n  \"n\": {},\n  \"priors\": [", model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    out += (i == 0 ? "" : ", ") + format_real(model.prior(i));
  }
  out += "],\n  \"terms\": [";
  const auto& terms = model.terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    out += t == 0 ? "\n" : ",\n";
    out += "    {\"vars\": [";
    for (std::size_t k = 0; k < terms[t].vars.size(); ++k) {
      out += fmt::format("{}{}", k == 0 ? "" : ", ", terms[t].vars[k]);
    }
    out += "], \"coeff\": " + format_real(terms[t].coeff) + "}";
  }
  out += terms.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

EnergyModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(fmt::format("model file is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ModelError("model document must be a JSON object");
  for (const char* key : {"n", "priors", "terms"}) {
    if (!doc.contains(key)) throw ModelError(fmt::format("model document lacks field '{}'", key));
  }
  if (!doc["n"].is_number_unsigned()) throw ModelError("field 'n' must be a positive integer");
  const auto n = doc["n"].get<std::size_t>();

  if (!doc["priors"].is_array()) throw ModelError("field 'priors' must be an array");
  std::vector<double> priors;
  for (const json& p : doc["priors"]) {
    if (!p.is_number()) throw ModelError("priors must be numbers");
    priors.push_back(p.get<double>());
  }

  if (!doc["terms"].is_array()) throw ModelError("field 'terms' must be an array");
  std::vector<Term> terms;
  for (const json& t : doc["terms"]) {
    if (!t.is_object() || !t.contains("vars") || !t.contains("coeff")) {
      throw ModelError("each term must be an object with 'vars' and 'coeff'");
    }
    if (!t["vars"].is_array()) throw ModelError("term 'vars' must be an array");
    if (!t["coeff"].is_number()) throw ModelError("term 'coeff' must be a number");
    Term term;
    for (const json& v : t["vars"]) {
      if (!v.is_number_unsigned()) throw ModelError("variable indices must be non-negative integers");
      term.vars.push_back(v.get<std::size_t>());
    }
    term.coeff = t["coeff"].get<double>();
    terms.push_back(std::move(term));
  }
  return EnergyModel(n, std::move(terms), std::move(priors));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path));
}

EnergyModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

void save_model(const EnergyModel& model, const std::string& path) {
  write_file(path, model_to_json(model));
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  const std::size_t n = trace.records.empty() ? 0 : trace.records.front().q.size();
  out << "sweep,g,grad_norm,step_norm";
  for (std::size_t i = 0; i < n; ++i) out << ",q_" << i;
  out << '\n';
  for (const TraceRecord& r : trace.records) {
    out << r.sweep << ',' << format_real(r.g) << ',' << format_real(r.grad_norm) << ','
        << format_real(r.step_norm);
    for (double q : r.q) out << ',' << format_real(q);
    out << '\n';
  }
}

IterationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ModelError("trace file is empty");
  const std::vector<std::string> header = split_csv(line);
  if (header.size() < 5 || header[0] != "sweep" || header[1] != "g" || header[2] != "grad_norm" ||
      header[3] != "step_norm") {
    throw ModelError("trace header must start with sweep,g,grad_norm,step_norm,q_0");
  }
  const std::size_t n = header.size() - 4;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[4 + i] != fmt::format("q_{}", i)) {
      throw ModelError(fmt::format("trace header column {} should be q_{}", 4 + i, i));
    }
  }

  IterationTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ModelError(fmt::format("trace line {}: expected {} columns, got {}", line_no,
                                   header.size(), cells.size()));
    }
    TraceRecord r;
    const double sweep = parse_real(cells[0], line_no);
    if (sweep < 0 || sweep != static_cast<double>(static_cast<std::size_t>(sweep))) {
      throw ModelError(fmt::format("trace line {}: sweep must be a non-negative integer", line_no));
    }
    r.sweep = static_cast<std::size_t>(sweep);
    if (r.sweep != trace.records.size()) {
      throw ModelError(fmt::format("trace line {}: sweep indices must be consecutive from 0",
                                   line_no));
    }
    r.g = parse_real(cells[1], line_no);
    r.grad_norm = parse_real(cells[2], line_no);
    r.step_norm = parse_real(cells[3], line_no);
    r.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.q[i] = parse_real(cells[4 + i], line_no);
    trace.records.push_back(std::move(r));
  }
  if (trace.records.empty()) throw ModelError("trace file has no records");
  return trace;
}

}  // namespace mfprox

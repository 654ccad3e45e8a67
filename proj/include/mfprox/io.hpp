#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mfprox/model.hpp"
#include "mfprox/solver.hpp"

namespace mfprox {

/// Formats a double with 17 significant digits (lossless round trip).
std::string format_real(double v);

/// Model document: {"n": int, "priors": [real...], "terms": [{"vars": [int...], "coeff": real}...]}.
std::string model_to_json(const EnergyModel& model);
EnergyModel model_from_json(std::string_view text);

EnergyModel load_model(const std::string& path);
void save_model(const EnergyModel& model, const std::string& path);

/// CSV with header sweep,g,grad_norm,step_norm,q_0,...,q_{N-1}; one row per record.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);
/// Parses a trace CSV. Termination and init_in_box are not stored in the CSV and
/// are left at their defaults; callers restore them from the manifest.
IterationTrace read_trace_csv(std::istream& in);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace mfprox

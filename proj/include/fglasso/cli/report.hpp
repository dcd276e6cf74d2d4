#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fglasso/solver.hpp"

namespace fglasso::cli {

inline constexpr const char* kVersion = "fglasso 1.0.0";

struct LambdaDiagnostics {
  double lambda = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  double kkt_gap = 0.0;
  double dual_gap = 0.0;
  std::size_t edges = 0;

  bool operator==(const LambdaDiagnostics&) const = default;
};

LambdaDiagnostics diagnostics_of(const AdmmSolution& solution, std::size_t edges);

// Everything needed to audit one fit or path run. Wall-clock timing is only
// recorded on request so that reports stay reproducible byte for byte.
struct RunReport {
  std::string version = kVersion;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<LambdaDiagnostics> lambdas;
  std::optional<double> seconds;

  bool operator==(const RunReport&) const = default;
};

void to_json(nlohmann::json& j, const LambdaDiagnostics& d);
void from_json(const nlohmann::json& j, LambdaDiagnostics& d);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

std::string format_report(const RunReport& report);
RunReport parse_report(const std::string& text);

}  // namespace fglasso::cli

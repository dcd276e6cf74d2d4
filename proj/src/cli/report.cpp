#include "fglasso/cli/report.hpp"

#include <cmath>
#include <limits>

#include "fglasso/cli/io.hpp"

namespace fglasso::cli {

using json = nlohmann::json;

namespace {

// JSON has no infinity; an infeasible objective is written as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

LambdaDiagnostics diagnostics_of(const AdmmSolution& solution, std::size_t edges) {
  return LambdaDiagnostics{solution.lambda,          solution.iterations,
                           solution.converged,       solution.primal_residual,
                           solution.dual_residual,   solution.objective,
                           solution.kkt_gap,         solution.dual_gap,
                           edges};
}

void to_json(json& j, const LambdaDiagnostics& d) {
  j = json{{"lambda", d.lambda},
           {"iterations", d.iterations},
           {"converged", d.converged},
           {"primal_residual", d.primal_residual},
           {"dual_residual", d.dual_residual},
           {"objective", number_or_null(d.objective)},
           {"kkt_gap", d.kkt_gap},
           {"dual_gap", d.dual_gap},
           {"edges", d.edges}};
}

void from_json(const json& j, LambdaDiagnostics& d) {
  j.at("lambda").get_to(d.lambda);
  j.at("iterations").get_to(d.iterations);
  j.at("converged").get_to(d.converged);
  j.at("primal_residual").get_to(d.primal_residual);
  j.at("dual_residual").get_to(d.dual_residual);
  d.objective = number_from(j.at("objective"));
  j.at("kkt_gap").get_to(d.kkt_gap);
  j.at("dual_gap").get_to(d.dual_gap);
  j.at("edges").get_to(d.edges);
}

void to_json(json& j, const RunReport& r) {
  j = json{{"version", r.version},
           {"command", r.command},
           {"config", r.config},
           {"lambdas", r.lambdas}};
  if (r.seconds) j["seconds"] = *r.seconds;
}

void from_json(const json& j, RunReport& r) {
  j.at("version").get_to(r.version);
  j.at("command").get_to(r.command);
  r.config = j.at("config");
  j.at("lambdas").get_to(r.lambdas);
  if (j.contains("seconds")) {
    r.seconds = j.at("seconds").get<double>();
  } else {
    r.seconds.reset();
  }
}

std::string format_report(const RunReport& report) {
  return json(report).dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  try {
    return json::parse(text).get<RunReport>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed run report: ") + e.what());
  }
}

}  // namespace fglasso::cli

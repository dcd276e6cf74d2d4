#include "fglasso/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fglasso/cli/io.hpp"
#include "fglasso/cli/report.hpp"
#include "fglasso/estimate.hpp"
#include "fglasso/graph.hpp"
#include "fglasso/simgen.hpp"
#include "fglasso/solver.hpp"

namespace fglasso::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string edge_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "edges_%03zu.csv", index);
  return buf;
}

// Samples, covariance and the correlation matrix handed to the solver.
struct Prepared {
  DatasetManifest manifest;
  std::size_t n = 0;
  CorrelationEstimate correlation;
};

Prepared prepare(const SolveOptions& options) {
  Prepared prep{read_manifest(options.manifest), 0, {}};
  const SampleSet samples = read_samples(prep.manifest.samples, prep.manifest.layout);
  prep.n = samples.size();
  const BlockMatrix covariance = empirical_covariance(samples);
  const double epsilon =
      options.epsilon ? *options.epsilon : default_epsilon(covariance, prep.n);
  prep.correlation = regularized_correlation(covariance, epsilon);
  return prep;
}

json solve_config(const SolveOptions& options, const Prepared& prep) {
  return json{{"manifest", options.manifest.generic_string()},
              {"n", prep.n},
              {"p", prep.manifest.layout.nodes()},
              {"K", prep.manifest.layout.total()},
              {"epsilon", prep.correlation.epsilon},
              {"epsilon_source", options.epsilon ? "user" : "default"},
              {"rho", options.rho},
              {"tol", options.tol},
              {"max_iter", options.max_iter},
              {"lambda_max", lambda_max(prep.correlation.r)}};
}

SolverConfig solver_config(const SolveOptions& options) {
  SolverConfig config;
  config.rho = options.rho;
  config.tol = options.tol;
  config.max_iter = options.max_iter;
  return config;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void cmd_simulate(const SimulateOptions& options) {
  SimConfig config;
  config.setup = options.setup;
  config.n = options.n;
  config.p = options.p;
  config.grid = options.grid;
  config.seed = options.seed;
  config.noise_sd = options.noise_sd;
  config.validate();

  const SimDraw draw = simulate(config);
  ensure_directory(options.out);
  write_file_atomic(options.out / "samples.csv", format_samples(draw.samples.data()));
  write_file_atomic(options.out / "truth.csv", format_edges(draw.truth));
  write_file_atomic(options.out / "manifest.json",
                    format_manifest(DatasetManifest{
                        "samples.csv", draw.samples.layout(), fs::path("truth.csv")}));
}

bool cmd_fit(const FitOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared prep = prepare(options);
  SolverConfig config = solver_config(options);
  config.lambda = options.lambda;
  const AdmmSolution solution = admm_solve(prep.correlation.r, config);
  const BlockLayout& layout = prep.manifest.layout;
  const GraphEstimate graph = extract_graph(solution, layout);
  const BlockMatrix h = precision_operator(solution.q, MassMatrix(layout));

  RunReport report;
  report.command = "fit";
  report.config = solve_config(options, prep);
  report.config["lambda"] = options.lambda;
  report.lambdas.push_back(diagnostics_of(solution, graph.edge_count()));
  if (options.timing) report.seconds = seconds_since(start);

  ensure_directory(options.out);
  write_file_atomic(options.out / "edges.csv", format_edges(graph));
  write_file_atomic(options.out / "H.csv", format_matrix(h.entries()));
  write_file_atomic(options.out / "Q.csv", format_matrix(solution.q.entries()));
  write_file_atomic(options.out / "report.json", format_report(report));
  return solution.converged;
}

void cmd_path(const PathOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared prep = prepare(options);
  const std::vector<double> grid = default_lambda_grid(
      prep.correlation.r, options.n_lambdas, options.lambda_min_ratio);
  const std::vector<AdmmSolution> path =
      lambda_path(prep.correlation.r, grid, solver_config(options));

  RunReport report;
  report.command = "path";
  report.config = solve_config(options, prep);
  report.config["n_lambdas"] = options.n_lambdas;
  report.config["lambda_min_ratio"] = options.lambda_min_ratio;

  ensure_directory(options.out);
  std::string summary = "index,lambda,edges,iterations,converged,objective,kkt_gap,dual_gap\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    const GraphEstimate graph = extract_graph(path[k], prep.manifest.layout);
    const LambdaDiagnostics d = diagnostics_of(path[k], graph.edge_count());
    report.lambdas.push_back(d);
    summary += std::to_string(k + 1) + "," + format_double(d.lambda) + "," +
               std::to_string(d.edges) + "," + std::to_string(d.iterations) +
               "," + (d.converged ? "1" : "0") + "," +
               format_double(d.objective) + "," + format_double(d.kkt_gap) +
               "," + format_double(d.dual_gap) + "\n";
    write_file_atomic(options.out / edge_file_name(k + 1), format_edges(graph));
  }
  if (options.timing) report.seconds = seconds_since(start);
  write_file_atomic(options.out / "summary.csv", summary);
  write_file_atomic(options.out / "report.json", format_report(report));
}

double cmd_roc(const RocOptions& options) {
  const DatasetManifest manifest = read_manifest(options.manifest);
  if (!manifest.truth) {
    throw IoError("manifest '" + options.manifest.string() +
                  "' names no truth graph");
  }
  const std::size_t p = manifest.layout.nodes();
  const GraphEstimate truth = read_edges(*manifest.truth, p);

  const fs::path summary_path = options.path_dir / "summary.csv";
  const std::string summary = read_file(summary_path);
  std::vector<double> lambdas;
  std::vector<GraphEstimate> graphs;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < summary.size()) {
    std::size_t end = summary.find('\n', start);
    if (end == std::string::npos) end = summary.size();
    const std::string line = summary.substr(start, end - start);
    start = end + 1;
    if (line_no++ == 0 || line.empty()) continue;  // header
    const std::size_t c1 = line.find(',');
    if (c1 == std::string::npos) {
      throw IoError("malformed row " + std::to_string(line_no) + " in '" +
                    summary_path.string() + "'");
    }
    std::size_t index = 0;
    double lambda = 0.0;
    try {
      index = std::stoul(line.substr(0, c1));
      const std::size_t c2 = line.find(',', c1 + 1);
      lambda = std::stod(line.substr(c1 + 1, c2 == std::string::npos
                                                 ? std::string::npos
                                                 : c2 - c1 - 1));
    } catch (const std::exception&) {
      throw IoError("malformed row " + std::to_string(line_no) + " in '" +
                    summary_path.string() + "'");
    }
    lambdas.push_back(lambda);
    graphs.push_back(read_edges(options.path_dir / edge_file_name(index), p));
  }
  if (graphs.empty()) {
    throw IoError("'" + summary_path.string() + "' lists no path points");
  }

  const RocCurve curve = roc_curve(graphs, lambdas, truth);
  std::string table = "lambda,tpr,fpr,edges\n";
  for (const auto& point : curve.points) {
    table += format_double(point.lambda) + "," + format_double(point.tpr) + "," +
             format_double(point.fpr) + "," + std::to_string(point.edges) + "\n";
  }
  ensure_directory(options.out);
  write_file_atomic(options.out / "roc.csv", table);
  write_file_atomic(options.out / "roc.svg", roc_svg(curve.envelope, curve.auc));
  return curve.auc;
}

namespace {

void add_solve_flags(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--manifest", o.manifest, "Dataset manifest (JSON)")->required();
  cmd->add_option("--epsilon", o.epsilon,
                  "Ridge for the correlation step (default: data-driven)");
  cmd->add_option("--rho", o.rho, "ADMM step size")->capture_default_str();
  cmd->add_option("--tol", o.tol, "Relative residual tolerance")->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "ADMM iteration cap")->capture_default_str();
  cmd->add_flag("--timing", o.timing, "Record wall-clock time in report.json");
  cmd->add_option("--out", o.out, "Output directory")->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Functional graphical lasso: conditional independence graphs "
               "of multivariate functional data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Draw a simulation dataset");
  simulate_cmd->add_option("--setup", sim.setup, "Simulation setup (1, 2 or 3)")->required();
  simulate_cmd->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate_cmd->add_option("--p", sim.p, "Number of nodes")->capture_default_str();
  simulate_cmd->add_option("--grid", sim.grid, "Grid points per node")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate_cmd->add_option("--noise-sd", sim.noise_sd,
                           "Setup 3 noise sd (default: 3:1:2 trace proportions)");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the graph at one lambda");
  add_solve_flags(fit_cmd, fit);
  fit_cmd->add_option("--lambda", fit.lambda, "Group lasso penalty")->required();

  PathOptions path;
  auto* path_cmd = app.add_subcommand("path", "Trace a warm-started lambda path");
  add_solve_flags(path_cmd, path);
  path_cmd->add_option("--n-lambdas", path.n_lambdas, "Grid size")->capture_default_str();
  path_cmd->add_option("--lambda-min-ratio", path.lambda_min_ratio,
                       "Smallest lambda as a fraction of lambda_max")
      ->capture_default_str();

  RocOptions roc;
  auto* roc_cmd = app.add_subcommand("roc", "Score a lambda path against the truth");
  roc_cmd->add_option("--manifest", roc.manifest, "Dataset manifest with truth")->required();
  roc_cmd->add_option("--path-dir", roc.path_dir, "Output directory of `path`")->required();
  roc_cmd->add_option("--out", roc.out, "Output directory")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("fglasso");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*simulate_cmd) {
      cmd_simulate(sim);
      out << "wrote " << (sim.out / "samples.csv").string() << "\n";
    } else if (*fit_cmd) {
      const bool converged = cmd_fit(fit);
      out << "converged=" << (converged ? "true" : "false") << "\n";
    } else if (*path_cmd) {
      cmd_path(path);
      out << "wrote " << (path.out / "summary.csv").string() << "\n";
    } else if (*roc_cmd) {
      const double auc = cmd_roc(roc);
      out << "AUC " << format_double(auc) << "\n";
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kSuccess;
}

}  // namespace fglasso::cli

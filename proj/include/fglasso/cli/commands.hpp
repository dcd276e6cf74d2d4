#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fglasso::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kIoError = 2 };

struct SimulateOptions {
  int setup = 1;
  std::size_t n = 100;
  std::size_t p = 100;
  std::size_t grid = 30;
  std::uint64_t seed = 0;
  std::optional<double> noise_sd;
  std::filesystem::path out;
};

struct SolveOptions {
  std::filesystem::path manifest;
  std::optional<double> epsilon;
  double rho = 1.0;
  double tol = 1e-4;
  std::size_t max_iter = 2000;
  bool timing = false;
  std::filesystem::path out;
};

struct FitOptions : SolveOptions {
  double lambda = 0.0;
};

struct PathOptions : SolveOptions {
  std::size_t n_lambdas = 30;
  double lambda_min_ratio = 0.01;
};

struct RocOptions {
  std::filesystem::path manifest;
  std::filesystem::path path_dir;
  std::filesystem::path out;
};

// Writes samples.csv, manifest.json and truth.csv into options.out.
void cmd_simulate(const SimulateOptions& options);
// Writes edges.csv, H.csv, Q.csv and report.json. Returns whether ADMM met
// its tolerance.
bool cmd_fit(const FitOptions& options);
// Writes summary.csv, edges_NNN.csv per lambda and report.json.
void cmd_path(const PathOptions& options);
// Writes roc.csv and roc.svg; returns the AUC.
double cmd_roc(const RocOptions& options);

// Parses argv, runs a subcommand and maps failures onto exit codes.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace fglasso::cli

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fglasso/block_matrix.hpp"
#include "fglasso/errors.hpp"
#include "fglasso/estimate.hpp"
#include "fglasso/graph.hpp"

namespace fglasso::cli {

// File missing, unreadable, unwritable or malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Where a dataset lives and how its columns split into nodes. Paths are kept
// as written in the manifest and resolved against the manifest's directory.
struct DatasetManifest {
  std::filesystem::path samples;
  BlockLayout layout;
  std::optional<std::filesystem::path> truth;
};

// Manifest JSON:
//   {"samples": "samples.csv", "p": 3, "sizes": [30, 30, 30],
//    "schemes": ["points", "points", "points"], "truth": "truth.csv"}
// Returned paths are resolved against the manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest);

// Shortest text that parses back to the same double.
std::string format_double(double value);

// Comma-separated rows, no header.
std::string format_samples(const Eigen::MatrixXd& data);
Eigen::MatrixXd parse_samples(std::string_view text,
                              const std::string& source_name);
SampleSet read_samples(const std::filesystem::path& path,
                       const BlockLayout& layout);

// "i,j" lines with i < j, 1-based, lexicographic order.
std::string format_edges(const GraphEstimate& graph);
GraphEstimate read_edges(const std::filesystem::path& path, std::size_t p);

// First line is K, then K comma-separated rows.
std::string format_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Plain SVG staircase plot of an ROC envelope.
std::string roc_svg(const std::vector<RocPoint>& envelope, double auc);

}  // namespace fglasso::cli

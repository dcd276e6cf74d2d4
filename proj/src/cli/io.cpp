#include "fglasso/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace fglasso::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return buffer.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

double parse_double(std::string_view field, const std::string& where) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                            field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw IoError("cannot parse number '" + std::string(field) + "' at " + where);
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

DatasetManifest read_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError("manifest '" + path.string() + "' is not valid JSON: " +
                  e.what());
  }
  try {
    const fs::path base = path.parent_path();
    const auto sizes = doc.at("sizes").get<std::vector<std::size_t>>();
    const auto p = doc.at("p").get<std::size_t>();
    if (sizes.size() != p) {
      throw IoError("manifest '" + path.string() + "' declares p=" +
                    std::to_string(p) + " but lists " +
                    std::to_string(sizes.size()) + " sizes");
    }
    std::vector<Scheme> schemes;
    const json& sj = doc.at("schemes");
    if (sj.is_string()) {
      schemes.assign(p, scheme_from_string(sj.get<std::string>()));
    } else {
      for (const auto& s : sj) schemes.push_back(scheme_from_string(s.get<std::string>()));
    }
    DatasetManifest manifest{resolve(base, doc.at("samples").get<std::string>()),
                             BlockLayout(sizes, schemes), std::nullopt};
    if (doc.contains("truth") && !doc.at("truth").is_null()) {
      manifest.truth = resolve(base, doc.at("truth").get<std::string>());
    }
    return manifest;
  } catch (const json::exception& e) {
    throw IoError("manifest '" + path.string() + "' is malformed: " + e.what());
  } catch (const InvalidInput& e) {
    throw IoError("manifest '" + path.string() + "': " + e.what());
  }
}

std::string format_manifest(const DatasetManifest& manifest) {
  json doc;
  doc["samples"] = manifest.samples.generic_string();
  doc["p"] = manifest.layout.nodes();
  doc["sizes"] = manifest.layout.sizes();
  json schemes = json::array();
  for (const Scheme s : manifest.layout.schemes()) schemes.push_back(std::string(to_string(s)));
  doc["schemes"] = schemes;
  if (manifest.truth) doc["truth"] = manifest.truth->generic_string();
  return doc.dump(2) + "\n";
}

std::string format_samples(const Eigen::MatrixXd& data) {
  std::string out;
  out.reserve(static_cast<std::size_t>(data.size()) * 20);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(data(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd parse_samples(std::string_view text,
                              const std::string& source_name) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw IoError("'" + source_name + "' holds no samples");
  const std::size_t cols = split(lines.front(), ',').size();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(lines.size()),
                       static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != cols) {
      throw IoError("'" + source_name + "' row " + std::to_string(i + 1) +
                    " has " + std::to_string(fields.size()) +
                    " columns, expected " + std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(fields[j], source_name + " row " + std::to_string(i + 1));
    }
  }
  return data;
}

SampleSet read_samples(const fs::path& path, const BlockLayout& layout) {
  Eigen::MatrixXd data = parse_samples(read_file(path), path.string());
  if (static_cast<std::size_t>(data.cols()) != layout.total()) {
    throw IoError("'" + path.string() + "' has " + std::to_string(data.cols()) +
                  " columns but the manifest declares K=" +
                  std::to_string(layout.total()));
  }
  return SampleSet(layout, std::move(data));
}

std::string format_edges(const GraphEstimate& graph) {
  std::string out;
  for (const auto& [i, j] : graph.edges()) {
    out += std::to_string(i + 1) + "," + std::to_string(j + 1) + "\n";
  }
  return out;
}

GraphEstimate read_edges(const fs::path& path, std::size_t p) {
  GraphEstimate graph(p);
  const std::string text = read_file(path);
  std::size_t row = 0;
  for (const auto line : lines_of(text)) {
    ++row;
    const auto fields = split(line, ',');
    const std::string where = path.string() + " line " + std::to_string(row);
    if (fields.size() != 2) throw IoError("expected 'i,j' at " + where);
    const double a = parse_double(fields[0], where);
    const double b = parse_double(fields[1], where);
    if (a < 1 || b < 1 || a > static_cast<double>(p) ||
        b > static_cast<double>(p) || a != std::floor(a) || b != std::floor(b)) {
      throw IoError("node index out of range at " + where);
    }
    graph.add_edge(static_cast<std::size_t>(a) - 1,
                   static_cast<std::size_t>(b) - 1);
  }
  return graph;
}

std::string format_matrix(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "\n" + format_samples(m);
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  const std::string text = read_file(path);
  const std::size_t newline = text.find('\n');
  if (newline == std::string::npos) {
    throw IoError("'" + path.string() + "' lacks a size header");
  }
  const double k = parse_double(std::string_view(text).substr(0, newline),
                                path.string() + " header");
  Eigen::MatrixXd m =
      parse_samples(std::string_view(text).substr(newline + 1), path.string());
  if (m.rows() != static_cast<Eigen::Index>(k) || m.cols() != m.rows()) {
    throw IoError("'" + path.string() + "' is not a " +
                  format_double(k) + "x" + format_double(k) + " matrix");
  }
  return m;
}

std::string roc_svg(const std::vector<RocPoint>& envelope, double auc) {
  constexpr double size = 400.0, margin = 40.0;
  const double span = size - 2.0 * margin;
  auto x = [&](double fpr) { return margin + span * fpr; };
  auto y = [&](double tpr) { return size - margin - span * tpr; };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" "
         "viewBox=\"0 0 400 400\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"400\" height=\"400\" fill=\"white\"/>\n";
  svg << "<rect x=\"40\" y=\"40\" width=\"320\" height=\"320\" fill=\"none\" "
         "stroke=\"black\"/>\n";
  svg << "<line x1=\"40\" y1=\"360\" x2=\"360\" y2=\"40\" stroke=\"gray\" "
         "stroke-dasharray=\"4 4\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  // Staircase: move right at the previous TPR, then up.
  double prev_tpr = 0.0;
  bool first = true;
  for (const auto& point : envelope) {
    if (!first) svg << ' ' << format_double(x(point.fpr)) << ',' << format_double(y(prev_tpr));
    svg << (first ? "" : " ") << format_double(x(point.fpr)) << ','
        << format_double(y(point.tpr));
    prev_tpr = point.tpr;
    first = false;
  }
  svg << "\"/>\n";
  svg << "<text x=\"200\" y=\"390\" text-anchor=\"middle\" font-size=\"14\">FPR</text>\n";
  svg << "<text x=\"14\" y=\"200\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 14 200)\">TPR</text>\n";
  svg << "<text x=\"200\" y=\"28\" text-anchor=\"middle\" font-size=\"14\">AUC "
      << format_double(auc) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fglasso::cli

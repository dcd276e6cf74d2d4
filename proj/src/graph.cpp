#include "fglasso/graph.hpp"

#include <algorithm>

#include "fglasso/errors.hpp"

namespace fglasso {

GraphEstimate::GraphEstimate(std::size_t p) : p_(p), adjacency_(p * p, false) {
  for (std::size_t i = 0; i < p; ++i) adjacency_[i * p + i] = true;
}

GraphEstimate::GraphEstimate(std::size_t p, const std::vector<Edge>& edges)
    : GraphEstimate(p) {
  for (const auto& [i, j] : edges) add_edge(i, j);
}

void GraphEstimate::add_edge(std::size_t i, std::size_t j) {
  if (i >= p_ || j >= p_) {
    throw InvalidInput("edge (" + std::to_string(i + 1) + "," +
                       std::to_string(j + 1) + ") outside a graph with " +
                       std::to_string(p_) + " nodes");
  }
  adjacency_[i * p_ + j] = true;
  adjacency_[j * p_ + i] = true;
}

std::vector<GraphEstimate::Edge> GraphEstimate::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < p_; ++i) {
    for (std::size_t j = i + 1; j < p_; ++j) {
      if (adjacent(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t GraphEstimate::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < p_; ++i) {
    for (std::size_t j = i + 1; j < p_; ++j) count += adjacent(i, j) ? 1 : 0;
  }
  return count;
}

GraphEstimate extract_graph(const AdmmSolution& solution,
                            const BlockLayout& layout) {
  if (solution.z.layout() != layout) {
    throw DimensionMismatch("solution and layout disagree");
  }
  GraphEstimate graph(layout.nodes());
  for (std::size_t i = 0; i < layout.nodes(); ++i) {
    for (std::size_t j = i + 1; j < layout.nodes(); ++j) {
      if ((solution.z.block(i, j).array() != 0.0).any()) graph.add_edge(i, j);
    }
  }
  return graph;
}

Rates compare(const GraphEstimate& estimate, const GraphEstimate& truth) {
  if (estimate.nodes() != truth.nodes()) {
    throw DimensionMismatch("graphs have " + std::to_string(estimate.nodes()) +
                            " and " + std::to_string(truth.nodes()) +
                            " nodes");
  }
  std::size_t tp = 0, fp = 0, positives = 0, negatives = 0;
  const std::size_t p = truth.nodes();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const bool truly = truth.adjacent(i, j);
      const bool found = estimate.adjacent(i, j);
      if (truly) {
        ++positives;
        tp += found ? 1 : 0;
      } else {
        ++negatives;
        fp += found ? 1 : 0;
      }
    }
  }
  Rates rates;
  if (positives > 0) rates.tpr = static_cast<double>(tp) / positives;
  if (negatives > 0) rates.fpr = static_cast<double>(fp) / negatives;
  return rates;
}

double envelope_auc(const std::vector<RocPoint>& points,
                    std::vector<RocPoint>* envelope) {
  std::vector<RocPoint> sorted;
  sorted.reserve(points.size() + 2);
  sorted.push_back(RocPoint{});
  sorted.insert(sorted.end(), points.begin(), points.end());
  RocPoint top;
  top.tpr = 1.0;
  top.fpr = 1.0;
  sorted.push_back(top);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RocPoint& a, const RocPoint& b) {
                     return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr);
                   });
  double running = 0.0;
  for (auto& point : sorted) {
    running = std::max(running, point.tpr);
    point.tpr = running;
  }
  double area = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    area += 0.5 * (sorted[i].fpr - sorted[i - 1].fpr) *
            (sorted[i].tpr + sorted[i - 1].tpr);
  }
  if (envelope != nullptr) *envelope = std::move(sorted);
  return area;
}

RocCurve roc_curve(const std::vector<GraphEstimate>& graphs,
                   const std::vector<double>& lambdas,
                   const GraphEstimate& truth) {
  if (graphs.empty()) throw InvalidInput("ROC needs a nonempty path");
  if (graphs.size() != lambdas.size()) {
    throw DimensionMismatch("graph and lambda counts differ");
  }
  RocCurve curve;
  curve.points.reserve(graphs.size());
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const Rates rates = compare(graphs[k], truth);
    curve.points.push_back(
        RocPoint{lambdas[k], rates.tpr, rates.fpr, graphs[k].edge_count()});
  }
  curve.auc = envelope_auc(curve.points, &curve.envelope);
  return curve;
}

RocCurve roc_curve(const std::vector<AdmmSolution>& path,
                   const GraphEstimate& truth) {
  std::vector<GraphEstimate> graphs;
  std::vector<double> lambdas;
  graphs.reserve(path.size());
  for (const auto& solution : path) {
    graphs.push_back(extract_graph(solution, solution.z.layout()));
    lambdas.push_back(solution.lambda);
  }
  return roc_curve(graphs, lambdas, truth);
}

RocCurve mean_roc(const std::vector<RocCurve>& curves) {
  if (curves.empty()) throw InvalidInput("no ROC curves to average");
  const std::size_t length = curves.front().points.size();
  RocCurve mean;
  mean.points.assign(length, RocPoint{});
  for (const auto& curve : curves) {
    if (curve.points.size() != length) {
      throw DimensionMismatch("ROC curves have different path lengths");
    }
    for (std::size_t k = 0; k < length; ++k) {
      mean.points[k].lambda += curve.points[k].lambda;
      mean.points[k].tpr += curve.points[k].tpr;
      mean.points[k].fpr += curve.points[k].fpr;
      mean.points[k].edges += curve.points[k].edges;
    }
  }
  const double count = static_cast<double>(curves.size());
  for (auto& point : mean.points) {
    point.lambda /= count;
    point.tpr /= count;
    point.fpr /= count;
    point.edges /= curves.size();
  }
  mean.auc = envelope_auc(mean.points, &mean.envelope);
  return mean;
}

}  // namespace fglasso

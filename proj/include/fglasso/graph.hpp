#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fglasso/block_matrix.hpp"
#include "fglasso/solver.hpp"

namespace fglasso {

// Undirected graph over p nodes. Every node is adjacent to itself.
class GraphEstimate {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;  // 0-based, first < second

  GraphEstimate() = default;
  explicit GraphEstimate(std::size_t p);
  GraphEstimate(std::size_t p, const std::vector<Edge>& edges);

  std::size_t nodes() const { return p_; }
  bool adjacent(std::size_t i, std::size_t j) const {
    return adjacency_[i * p_ + j];
  }
  void add_edge(std::size_t i, std::size_t j);

  // Off-diagonal edges, sorted lexicographically.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  bool operator==(const GraphEstimate&) const = default;

 private:
  std::size_t p_ = 0;
  std::vector<bool> adjacency_;
};

struct RocPoint {
  double lambda = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  std::size_t edges = 0;
};

struct RocCurve {
  // One point per solution, in path order.
  std::vector<RocPoint> points;
  // FPR-sorted monotone upper envelope including (0,0) and (1,1).
  std::vector<RocPoint> envelope;
  double auc = 0.0;
};

// Edge (i,j) present iff block Z_ij has a nonzero entry.
GraphEstimate extract_graph(const AdmmSolution& solution,
                            const BlockLayout& layout);

struct Rates {
  double tpr = 0.0;
  double fpr = 0.0;
};

// Rates over unordered off-diagonal pairs. An empty denominator yields 0.
Rates compare(const GraphEstimate& estimate, const GraphEstimate& truth);

RocCurve roc_curve(const std::vector<GraphEstimate>& graphs,
                   const std::vector<double>& lambdas,
                   const GraphEstimate& truth);
RocCurve roc_curve(const std::vector<AdmmSolution>& path,
                   const GraphEstimate& truth);

// Trapezoid area under the FPR-sorted running-max envelope of the points
// plus the (0,0) and (1,1) endpoints. Writes the envelope if requested.
double envelope_auc(const std::vector<RocPoint>& points,
                    std::vector<RocPoint>* envelope = nullptr);

// Averages TPR and FPR across replicates at matched path indices. All curves
// must come from paths of the same length.
RocCurve mean_roc(const std::vector<RocCurve>& curves);

}  // namespace fglasso

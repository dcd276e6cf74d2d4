#include "fglasso/block_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fglasso/errors.hpp"

namespace fglasso {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kPoints:
      return "points";
    case Scheme::kCells:
      return "cells";
    case Scheme::kBasis:
      return "basis";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "points") return Scheme::kPoints;
  if (name == "cells") return Scheme::kCells;
  if (name == "basis") return Scheme::kBasis;
  throw InvalidInput("unknown discretization scheme '" + std::string(name) +
                     "' (expected points, cells or basis)");
}

BlockLayout::BlockLayout(std::vector<std::size_t> sizes,
                         std::vector<Scheme> schemes)
    : sizes_(std::move(sizes)), schemes_(std::move(schemes)) {
  if (sizes_.empty()) throw InvalidInput("layout needs at least one node");
  if (schemes_.size() != sizes_.size()) {
    throw DimensionMismatch("layout has " + std::to_string(sizes_.size()) +
                            " sizes but " + std::to_string(schemes_.size()) +
                            " schemes");
  }
  offsets_.reserve(sizes_.size());
  for (std::size_t s : sizes_) {
    if (s == 0) throw InvalidInput("node block sizes must be at least 1");
    offsets_.push_back(total_);
    total_ += s;
  }
}

BlockLayout BlockLayout::uniform(std::size_t p, std::size_t size,
                                 Scheme scheme) {
  return BlockLayout(std::vector<std::size_t>(p, size),
                     std::vector<Scheme>(p, scheme));
}

std::size_t BlockLayout::node_of(std::size_t j) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), j);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

MassMatrix::MassMatrix(const BlockLayout& layout)
    : weights_(static_cast<Eigen::Index>(layout.total())) {
  for (std::size_t i = 0; i < layout.nodes(); ++i) {
    const double w = layout.scheme(i) == Scheme::kBasis
                         ? 1.0
                         : 1.0 / static_cast<double>(layout.size(i));
    weights_.segment(static_cast<Eigen::Index>(layout.offset(i)),
                     static_cast<Eigen::Index>(layout.size(i)))
        .setConstant(w);
  }
}

MassMatrix MassMatrix::identity(const BlockLayout& layout) {
  MassMatrix m;
  m.weights_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(layout.total()));
  return m;
}

Eigen::MatrixXd MassMatrix::half_weighted(const Eigen::MatrixXd& a) const {
  const Eigen::VectorXd s = sqrt_weights();
  return s.asDiagonal() * a * s.asDiagonal();
}

Eigen::MatrixXd MassMatrix::half_unweighted(const Eigen::MatrixXd& a) const {
  const Eigen::VectorXd s = sqrt_weights().cwiseInverse();
  return s.asDiagonal() * a * s.asDiagonal();
}

BlockMatrix::BlockMatrix(BlockLayout layout, Eigen::MatrixXd entries,
                         Symmetry symmetry)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  const auto k = static_cast<Eigen::Index>(layout_.total());
  if (entries_.rows() != k || entries_.cols() != k) {
    throw DimensionMismatch("matrix is " + std::to_string(entries_.rows()) +
                            "x" + std::to_string(entries_.cols()) +
                            " but layout has K=" + std::to_string(k));
  }
  if (symmetry == Symmetry::kSymmetric) {
    if (asymmetry() > kSymmetryTolerance) {
      throw InvalidInput("matrix flagged symmetric is not symmetric (relative "
                         "asymmetry " + std::to_string(asymmetry()) + ")");
    }
    entries_ = (0.5 * (entries_ + entries_.transpose())).eval();
    symmetric_ = true;
  }
}

BlockMatrix BlockMatrix::zero(const BlockLayout& layout) {
  const auto k = static_cast<Eigen::Index>(layout.total());
  return BlockMatrix(layout, Eigen::MatrixXd::Zero(k, k), Symmetry::kSymmetric);
}

BlockMatrix BlockMatrix::identity(const BlockLayout& layout) {
  const auto k = static_cast<Eigen::Index>(layout.total());
  return BlockMatrix(layout, Eigen::MatrixXd::Identity(k, k),
                     Symmetry::kSymmetric);
}

double BlockMatrix::asymmetry() const {
  if (entries_.size() == 0) return 0.0;
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  return (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() / scale;
}

BlockMatrix diag_mask(const BlockMatrix& a) {
  const BlockLayout& layout = a.layout();
  const auto k = static_cast<Eigen::Index>(layout.total());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < layout.nodes(); ++i) {
    const auto off = static_cast<Eigen::Index>(layout.offset(i));
    const auto sz = static_cast<Eigen::Index>(layout.size(i));
    out.block(off, off, sz, sz) = a.entries().block(off, off, sz, sz);
  }
  return BlockMatrix(layout, std::move(out),
                     a.is_symmetric() ? Symmetry::kSymmetric
                                      : Symmetry::kGeneral);
}

namespace {

template <typename Reduce>
double reduce_block_norms(const BlockMatrix& a, const MassMatrix& mass,
                          bool off_diagonal_only, Reduce reduce) {
  const BlockLayout& layout = a.layout();
  const Eigen::MatrixXd weighted = mass.half_weighted(a.entries());
  double acc = 0.0;
  for (std::size_t i = 0; i < layout.nodes(); ++i) {
    for (std::size_t j = 0; j < layout.nodes(); ++j) {
      if (off_diagonal_only && i == j) continue;
      const double norm =
          weighted
              .block(static_cast<Eigen::Index>(layout.offset(i)),
                     static_cast<Eigen::Index>(layout.offset(j)),
                     static_cast<Eigen::Index>(layout.size(i)),
                     static_cast<Eigen::Index>(layout.size(j)))
              .norm();
      acc = reduce(acc, norm);
    }
  }
  return acc;
}

}  // namespace

double block_norm_21(const BlockMatrix& a, const MassMatrix& mass,
                     bool off_diagonal_only) {
  return reduce_block_norms(a, mass, off_diagonal_only,
                            [](double acc, double x) { return acc + x; });
}

double block_norm_2inf(const BlockMatrix& a, const MassMatrix& mass,
                       bool off_diagonal_only) {
  return reduce_block_norms(a, mass, off_diagonal_only,
                            [](double acc, double x) { return std::max(acc, x); });
}

Eigen::MatrixXd block_frobenius_norms(const BlockMatrix& a) {
  const std::size_t p = a.layout().nodes();
  Eigen::MatrixXd norms(static_cast<Eigen::Index>(p),
                        static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      norms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a.block(i, j).norm();
    }
  }
  return norms;
}

double cf_logdet(const BlockMatrix& a, const MassMatrix& mass) {
  Eigen::MatrixXd weighted = mass.half_weighted(a.entries());
  // MA is similar to M^{1/2} A M^{1/2}; decompose the symmetric one.
  weighted = (0.5 * (weighted + weighted.transpose())).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      weighted, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition failed in cf_logdet");
  }
  double sum = 0.0;
  for (const double mu : eig.eigenvalues()) {
    if (1.0 + mu <= 0.0) {
      throw NotPositiveDefinite("I + M^{1/2} A M^{1/2} has eigenvalue " +
                                std::to_string(1.0 + mu));
    }
    sum += std::log1p(mu) - mu;
  }
  return sum;
}

}  // namespace fglasso

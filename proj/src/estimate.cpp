#include "fglasso/estimate.hpp"

#include <cmath>
#include <vector>

#include "fglasso/errors.hpp"

namespace fglasso {

SampleSet::SampleSet(BlockLayout layout, Eigen::MatrixXd data)
    : layout_(std::move(layout)), data_(std::move(data)) {
  if (static_cast<std::size_t>(data_.cols()) != layout_.total()) {
    throw DimensionMismatch("sample matrix has " +
                            std::to_string(data_.cols()) +
                            " columns but layout declares K=" +
                            std::to_string(layout_.total()));
  }
  if (!data_.allFinite()) throw InvalidInput("samples contain non-finite values");
}

BlockMatrix empirical_covariance(const SampleSet& samples) {
  const auto n = samples.data().rows();
  if (n < 2) {
    throw InsufficientSamples("covariance estimation needs n >= 2, got " +
                              std::to_string(n));
  }
  const Eigen::RowVectorXd mean = samples.data().colwise().mean();
  const Eigen::MatrixXd centred = samples.data().rowwise() - mean;
  Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n);
  cov = (0.5 * (cov + cov.transpose())).eval();
  return BlockMatrix(samples.layout(), std::move(cov), Symmetry::kSymmetric);
}

namespace {

// (eps I + S)^{-1/2} for a symmetric PSD block S, eigenvalues floored at 0.
Eigen::MatrixXd inverse_sqrt_block(const Eigen::MatrixXd& s, double epsilon,
                                   std::size_t node) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition failed for diagonal block " +
                std::to_string(node + 1));
  }
  Eigen::VectorXd mu = eig.eigenvalues().cwiseMax(0.0);
  const double top = mu.maxCoeff();
  if (epsilon == 0.0 && (top <= 0.0 || mu.minCoeff() <= 1e-12 * top)) {
    throw SingularDiagonal("diagonal block " + std::to_string(node + 1) +
                           " of the covariance is singular; use epsilon > 0");
  }
  mu = (mu.array() + epsilon).rsqrt().matrix();
  return eig.eigenvectors() * mu.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

CorrelationEstimate regularized_correlation(const BlockMatrix& covariance,
                                            double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput("epsilon must be a finite value >= 0");
  }
  if (!covariance.is_symmetric()) {
    throw InvalidInput("covariance must be symmetric");
  }
  const BlockLayout& layout = covariance.layout();
  const MassMatrix mass(layout);
  const std::size_t p = layout.nodes();
  const auto k = static_cast<Eigen::Index>(layout.total());

  Eigen::MatrixXd r0 = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd normalized = Eigen::MatrixXd::Zero(k, k);

  if (p > 1) {
    const Eigen::MatrixXd weighted = mass.half_weighted(covariance.entries());
    std::vector<Eigen::MatrixXd> inv_sqrt;
    inv_sqrt.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
      const auto off = static_cast<Eigen::Index>(layout.offset(i));
      const auto sz = static_cast<Eigen::Index>(layout.size(i));
      inv_sqrt.push_back(
          inverse_sqrt_block(weighted.block(off, off, sz, sz), epsilon, i));
    }
    const Eigen::VectorXd w = mass.weights();
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const auto oi = static_cast<Eigen::Index>(layout.offset(i));
        const auto oj = static_cast<Eigen::Index>(layout.offset(j));
        const auto si = static_cast<Eigen::Index>(layout.size(i));
        const auto sj = static_cast<Eigen::Index>(layout.size(j));
        // Weights are constant within a block, so M^{1/2} commutes with the
        // block inverse square roots.
        const Eigen::MatrixXd raw =
            inv_sqrt[i] * covariance.entries().block(oi, oj, si, sj) *
            inv_sqrt[j];
        r0.block(oi, oj, si, sj) = raw;
        r0.block(oj, oi, sj, si) = raw.transpose();
        const Eigen::MatrixXd scaled = std::sqrt(w(oi) * w(oj)) * raw;
        normalized.block(oi, oj, si, sj) = scaled;
        normalized.block(oj, oi, sj, si) = scaled.transpose();
      }
    }
  }
  normalized += Eigen::MatrixXd::Identity(k, k);

  return CorrelationEstimate{
      BlockMatrix(layout, std::move(r0), Symmetry::kSymmetric),
      BlockMatrix(layout, std::move(normalized), Symmetry::kSymmetric),
      epsilon};
}

double default_epsilon(const BlockMatrix& covariance, std::size_t n) {
  if (n < 2) {
    throw InsufficientSamples("default epsilon needs n >= 2, got " +
                              std::to_string(n));
  }
  const BlockLayout& layout = covariance.layout();
  const MassMatrix mass(layout);
  // Mean per-node operator trace tr(M_ii^{1/2} C_ii M_ii^{1/2}); for scalar
  // nodes this is the mean diagonal entry.
  const double total_trace =
      covariance.entries().diagonal().cwiseProduct(mass.weights()).sum();
  const double p = static_cast<double>(layout.nodes());
  const double scale = total_trace / p;
  return scale * std::pow(std::log(p) / static_cast<double>(n), 0.25);
}

}  // namespace fglasso

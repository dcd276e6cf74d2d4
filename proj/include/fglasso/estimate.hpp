#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "fglasso/block_matrix.hpp"

namespace fglasso {

// n observations of the discretized multivariate function, one per row.
class SampleSet {
 public:
  SampleSet(BlockLayout layout, Eigen::MatrixXd data);

  const BlockLayout& layout() const { return layout_; }
  const Eigen::MatrixXd& data() const { return data_; }
  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }

 private:
  BlockLayout layout_;
  Eigen::MatrixXd data_;
};

// Mean-centred (1/n) empirical covariance. Throws InsufficientSamples for n < 2.
BlockMatrix empirical_covariance(const SampleSet& samples);

// Output of the correlation step.
struct CorrelationEstimate {
  // Off-diagonal correlation part R0 in the sample coordinates; its diagonal
  // blocks are exactly zero.
  BlockMatrix r0;
  // I_K + M^{1/2} R0 M^{1/2}: the matrix the solver consumes.
  BlockMatrix r;
  double epsilon = 0.0;
};

// Ridge-regularized correlation operator matrix
//   R0 = [eps I + D o CM]^{-1/2} (C - D o C) [eps I + D o MC]^{-1/2},
// evaluated one diagonal block at a time.
CorrelationEstimate regularized_correlation(const BlockMatrix& covariance,
                                            double epsilon);

// eps = s * (log p / n)^{1/4}, with s the mean per-node trace of
// M^{1/2} C M^{1/2}. A stand-in rule; callers may pass their own epsilon.
double default_epsilon(const BlockMatrix& covariance, std::size_t n);

}  // namespace fglasso

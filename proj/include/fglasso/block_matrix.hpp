#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fglasso {

// How a node's function was turned into a finite vector. Point evaluation and
// cell averaging carry quadrature weight 1/K_i; coefficients in an orthonormal
// basis carry weight 1.
enum class Scheme { kPoints, kCells, kBasis };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

// Partition of [0, K) into p consecutive node blocks.
class BlockLayout {
 public:
  BlockLayout() = default;
  BlockLayout(std::vector<std::size_t> sizes, std::vector<Scheme> schemes);

  // p nodes of identical size and scheme.
  static BlockLayout uniform(std::size_t p, std::size_t size, Scheme scheme);

  std::size_t nodes() const { return sizes_.size(); }
  std::size_t total() const { return total_; }
  std::size_t size(std::size_t node) const { return sizes_[node]; }
  std::size_t offset(std::size_t node) const { return offsets_[node]; }
  Scheme scheme(std::size_t node) const { return schemes_[node]; }

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<Scheme>& schemes() const { return schemes_; }

  // Node owning coordinate j.
  std::size_t node_of(std::size_t j) const;

  bool operator==(const BlockLayout&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Scheme> schemes_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

// Diagonal inner-product weights of the discretized space.
class MassMatrix {
 public:
  explicit MassMatrix(const BlockLayout& layout);

  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::VectorXd sqrt_weights() const { return weights_.cwiseSqrt(); }

  // M^{1/2} A M^{1/2}
  Eigen::MatrixXd half_weighted(const Eigen::MatrixXd& a) const;
  // M^{-1/2} A M^{-1/2}
  Eigen::MatrixXd half_unweighted(const Eigen::MatrixXd& a) const;

  // Identity weights over the layout, i.e. the solver's coordinates.
  static MassMatrix identity(const BlockLayout& layout);

 private:
  MassMatrix() = default;
  Eigen::VectorXd weights_;
};

enum class Symmetry { kGeneral, kSymmetric };

// Dense K x K matrix addressed by (node, node) blocks.
class BlockMatrix {
 public:
  using Block = Eigen::Block<Eigen::MatrixXd>;
  using ConstBlock = Eigen::Block<const Eigen::MatrixXd>;

  // Relative tolerance accepted when the symmetric flag is requested.
  static constexpr double kSymmetryTolerance = 1e-12;

  BlockMatrix() = default;
  // With Symmetry::kSymmetric the input is checked against its transpose and
  // replaced by (A + A^T)/2; InvalidInput if it is not symmetric to tolerance.
  BlockMatrix(BlockLayout layout, Eigen::MatrixXd entries,
              Symmetry symmetry = Symmetry::kGeneral);

  static BlockMatrix zero(const BlockLayout& layout);
  static BlockMatrix identity(const BlockLayout& layout);

  const BlockLayout& layout() const { return layout_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  bool is_symmetric() const { return symmetric_; }
  std::size_t dim() const { return layout_.total(); }

  ConstBlock block(std::size_t i, std::size_t j) const {
    return entries_.block(layout_.offset(i), layout_.offset(j), layout_.size(i),
                          layout_.size(j));
  }
  // Mutable view. Writing through it clears the symmetric flag, since the
  // caller may break symmetry.
  Block mutable_block(std::size_t i, std::size_t j) {
    symmetric_ = false;
    return entries_.block(layout_.offset(i), layout_.offset(j), layout_.size(i),
                          layout_.size(j));
  }

  // Largest |A - A^T| entry relative to max(1, max |A|).
  double asymmetry() const;

 private:
  BlockLayout layout_;
  Eigen::MatrixXd entries_;
  bool symmetric_ = false;
};

// D o A: keep entries whose row and column fall in the same node block.
BlockMatrix diag_mask(const BlockMatrix& a);

// Sum (or max) over node pairs of ||M_ii^{1/2} A_ij M_jj^{1/2}||_F.
double block_norm_21(const BlockMatrix& a, const MassMatrix& mass,
                     bool off_diagonal_only);
double block_norm_2inf(const BlockMatrix& a, const MassMatrix& mass,
                       bool off_diagonal_only);

// p x p matrix of block Frobenius norms of the unweighted entries.
Eigen::MatrixXd block_frobenius_norms(const BlockMatrix& a);

// log det_2(I + A) for the operator discretized by A, computed from the
// spectrum of M^{1/2} A M^{1/2} as sum_j [log(1 + mu_j) - mu_j].
// Throws NotPositiveDefinite when some 1 + mu_j <= 0.
double cf_logdet(const BlockMatrix& a, const MassMatrix& mass);

}  // namespace fglasso

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "fglasso/estimate.hpp"
#include "fglasso/graph.hpp"

namespace fglasso {

struct SimConfig {
  int setup = 1;
  std::size_t n = 100;
  std::size_t p = 100;
  std::size_t grid = 30;  // K, points per node
  std::uint64_t seed = 0;
  // Setup 3 measurement noise. Unset means the value that puts the traces of
  // the smooth, rough and noise components in proportion 3:1:2.
  std::optional<double> noise_sd;

  // Throws InvalidConfig.
  void validate() const;
};

struct SimDraw {
  SampleSet samples;
  GraphEstimate truth;
};

// Cell midpoints t_k = (k - 1/2) / K, k = 1..K.
Eigen::VectorXd grid_points(std::size_t k);

// r x K matrix of the first r L2[0,1]-orthonormal Fourier functions on the
// midpoint grid: 1, sqrt2 sin(2 pi t), sqrt2 cos(2 pi t), sqrt2 sin(4 pi t), ...
Eigen::MatrixXd fourier_basis(std::size_t k, std::size_t r);

// Fractional Brownian motion kernel 0.5 (|t|^2H + |s|^2H - |t-s|^2H).
Eigen::MatrixXd fbm_covariance(const Eigen::VectorXd& grid, double hurst);

// Band graph: edge (i,j) iff 0 < |i - j| <= width.
GraphEstimate band_graph(std::size_t p, std::size_t width);
// Cliques on consecutive triplets {3k, 3k+1, 3k+2} (0-based).
GraphEstimate triplet_graph(std::size_t p);

// Zero-mean Gaussian sampler through a symmetric factor of the covariance,
// tolerating semi-definite input (eigenvalues floored at 0). Rejects matrices
// with an eigenvalue below -1e-8 * max|eigenvalue|.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& covariance);
  // Sampler for N(0, Q^{-1}) given a precision matrix Q.
  static GaussianSampler from_precision(const Eigen::MatrixXd& precision);

  std::size_t dim() const { return static_cast<std::size_t>(factor_.rows()); }
  // n x dim matrix of draws.
  Eigen::MatrixXd draw(std::size_t n, std::mt19937_64& rng) const;

 private:
  GaussianSampler() = default;
  Eigen::MatrixXd factor_;  // covariance = factor * factor^T
};

// n x d matrix of independent standard normals, filled row by row.
Eigen::MatrixXd standard_normals(std::size_t n, std::size_t d,
                                 std::mt19937_64& rng);

// Setup 1 score precision over r = 10 Fourier scores per node.
struct Setup1Precision {
  Eigen::MatrixXd precision;  // 10p x 10p
  GraphEstimate truth;
};
inline constexpr std::size_t kSetup1Rank = 10;
Setup1Precision setup1_precision(std::size_t p);

SimDraw simulate_setup1(const SimConfig& config);

// Setup 2 draw together with the innovations Z (same shape as the samples).
struct Setup2Draw {
  SimDraw draw;
  Eigen::MatrixXd innovations;
};
// Multiplication by the indicator of [0, 1/10] and of [9/10, 1].
Eigen::VectorXd restrict_first_tenth(const Eigen::VectorXd& f,
                                     const Eigen::VectorXd& grid);
Eigen::VectorXd restrict_last_tenth(const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& grid);
// Rank of the truncated 1/l^2 innovation spectrum on a K grid.
std::size_t setup2_rank(std::size_t k);
Setup2Draw simulate_setup2_detailed(const SimConfig& config);
SimDraw simulate_setup2(const SimConfig& config);

inline constexpr double kSetup3Hurst = 0.2;
inline constexpr std::size_t kSetup3Rank = 5;

// Per-node population covariance traces (mass-weighted, i.e. operator traces)
// of the three Setup 3 components: 9 Sigma_Z, Sigma_W and the noise.
struct Setup3Components {
  double smooth_eigenvalue = 0.0;  // eigenvalue of Sigma_Z
  double noise_variance = 0.0;
  double smooth_trace = 0.0;
  double rough_trace = 0.0;
  double noise_trace = 0.0;
};
Setup3Components setup3_components(const SimConfig& config);

struct Setup3Draw {
  SimDraw draw;
  Eigen::MatrixXd smooth;  // Z, n x pK
  Eigen::MatrixXd rough;   // W, n x pK
  Eigen::MatrixXd noise;   // n x pK
};
Setup3Draw simulate_setup3_detailed(const SimConfig& config);
SimDraw simulate_setup3(const SimConfig& config);

// Dispatches on config.setup.
SimDraw simulate(const SimConfig& config);

}  // namespace fglasso

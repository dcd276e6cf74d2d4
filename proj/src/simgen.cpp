#include "fglasso/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fglasso/errors.hpp"

namespace fglasso {

using Eigen::Index;

void SimConfig::validate() const {
  if (setup < 1 || setup > 3) {
    throw InvalidConfig("setup must be 1, 2 or 3, got " + std::to_string(setup));
  }
  if (n < 1) throw InvalidConfig("n must be >= 1");
  if (p < 1) throw InvalidConfig("p must be >= 1");
  if (grid < 2) throw InvalidConfig("grid size must be >= 2");
  if (setup == 1) {
    if (grid < kSetup1Rank) {
      throw InvalidConfig("setup 1 needs a grid of at least 10 points");
    }
    if (p < 3) throw InvalidConfig("setup 1 needs p >= 3");
  }
  if (setup == 3 && p % 3 != 0) {
    throw InvalidConfig("p must be divisible by 3");
  }
  if (noise_sd && !(*noise_sd >= 0.0 && std::isfinite(*noise_sd))) {
    throw InvalidConfig("noise sd must be a finite value >= 0");
  }
}

Eigen::VectorXd grid_points(std::size_t k) {
  Eigen::VectorXd t(static_cast<Index>(k));
  for (Index i = 0; i < t.size(); ++i) {
    t(i) = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
  }
  return t;
}

Eigen::MatrixXd fourier_basis(std::size_t k, std::size_t r) {
  if (r < 1 || k < 2) throw InvalidInput("fourier_basis needs r >= 1, K >= 2");
  const Eigen::VectorXd t = grid_points(k);
  Eigen::MatrixXd basis(static_cast<Index>(r), static_cast<Index>(k));
  const double scale = std::numbers::sqrt2;
  for (Index l = 0; l < basis.rows(); ++l) {
    if (l == 0) {
      basis.row(0).setOnes();
      continue;
    }
    const double freq = 2.0 * std::numbers::pi * static_cast<double>((l + 1) / 2);
    for (Index j = 0; j < basis.cols(); ++j) {
      basis(l, j) = (l % 2 == 1) ? scale * std::sin(freq * t(j))
                                 : scale * std::cos(freq * t(j));
    }
  }
  return basis;
}

Eigen::MatrixXd fbm_covariance(const Eigen::VectorXd& grid, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw InvalidInput("Hurst exponent must lie in (0, 1)");
  }
  const double e = 2.0 * hurst;
  const Index k = grid.size();
  Eigen::MatrixXd cov(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const double t = grid(i), s = grid(j);
      cov(i, j) = 0.5 * (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) -
                         std::pow(std::abs(t - s), e));
    }
  }
  return cov;
}

GraphEstimate band_graph(std::size_t p, std::size_t width) {
  GraphEstimate graph(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p && j <= i + width; ++j) graph.add_edge(i, j);
  }
  return graph;
}

GraphEstimate triplet_graph(std::size_t p) {
  GraphEstimate graph(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (i / 3 == j / 3) graph.add_edge(i, j);
    }
  }
  return graph;
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw DimensionMismatch("covariance must be square");
  }
  const Eigen::MatrixXd sym = 0.5 * (covariance + covariance.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition failed in GaussianSampler");
  }
  const Eigen::VectorXd& mu = eig.eigenvalues();
  const double scale = mu.cwiseAbs().maxCoeff();
  if (mu.minCoeff() < -1e-8 * scale) {
    throw NotPositiveDefinite("covariance has eigenvalue " +
                              std::to_string(mu.minCoeff()));
  }
  factor_ = eig.eigenvectors() * mu.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

GaussianSampler GaussianSampler::from_precision(const Eigen::MatrixXd& precision) {
  const Eigen::MatrixXd sym = 0.5 * (precision + precision.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw NotPositiveDefinite("precision matrix is not positive definite");
  }
  GaussianSampler sampler;
  sampler.factor_ = eig.eigenvectors() *
                    eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  return sampler;
}

Eigen::MatrixXd standard_normals(std::size_t n, std::size_t d,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(static_cast<Index>(n), static_cast<Index>(d));
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = normal(rng);
  }
  return out;
}

Eigen::MatrixXd GaussianSampler::draw(std::size_t n, std::mt19937_64& rng) const {
  return standard_normals(n, dim(), rng) * factor_.transpose();
}

Setup1Precision setup1_precision(std::size_t p) {
  if (p < 3) throw InvalidConfig("setup 1 needs p >= 3");
  constexpr auto r = static_cast<Index>(kSetup1Rank);
  const auto dim = static_cast<Index>(p) * r;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  for (Index i = 0; i < static_cast<Index>(p); ++i) {
    for (Index l = 0; l < r; ++l) {
      const double level = static_cast<double>(l + 1) / 10.0;
      q(i * r + l, i * r + l) = level;
      // Only the last five scores are coupled across nodes.
      if (l < 5) continue;
      for (const auto& [lag, factor] : {std::pair{1, 0.4}, std::pair{2, 0.2}}) {
        if (i - lag < 0) continue;
        const Index a = i * r + l;
        const Index b = (i - lag) * r + l;
        q(a, b) = factor * level;
        q(b, a) = factor * level;
      }
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(q);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("setup 1 precision failed to factorize");
  }
  return Setup1Precision{std::move(q), band_graph(p, 2)};
}

namespace {

BlockLayout node_layout(const SimConfig& config) {
  return BlockLayout::uniform(config.p, config.grid, Scheme::kPoints);
}

}  // namespace

SimDraw simulate_setup1(const SimConfig& config) {
  config.validate();
  if (config.setup != 1) throw InvalidConfig("config is not for setup 1");
  Setup1Precision prec = setup1_precision(config.p);
  std::mt19937_64 rng(config.seed);
  const Eigen::MatrixXd scores =
      GaussianSampler::from_precision(prec.precision).draw(config.n, rng);
  const Eigen::MatrixXd basis = fourier_basis(config.grid, kSetup1Rank);
  constexpr auto r = static_cast<Index>(kSetup1Rank);
  const auto k = static_cast<Index>(config.grid);
  Eigen::MatrixXd data(static_cast<Index>(config.n),
                       static_cast<Index>(config.p) * k);
  for (Index i = 0; i < static_cast<Index>(config.p); ++i) {
    data.middleCols(i * k, k) = scores.middleCols(i * r, r) * basis;
  }
  return SimDraw{SampleSet(node_layout(config), std::move(data)),
                 std::move(prec.truth)};
}

Eigen::VectorXd restrict_first_tenth(const Eigen::VectorXd& f,
                                     const Eigen::VectorXd& grid) {
  return (grid.array() <= 0.1).select(f, 0.0);
}

Eigen::VectorXd restrict_last_tenth(const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& grid) {
  return (grid.array() >= 0.9).select(f, 0.0);
}

std::size_t setup2_rank(std::size_t k) {
  // Largest l with 1/l^2 >= 1e-6 is 1000.
  return std::min<std::size_t>(k, 1000);
}

Setup2Draw simulate_setup2_detailed(const SimConfig& config) {
  config.validate();
  if (config.setup != 2) throw InvalidConfig("config is not for setup 2");
  const auto n = static_cast<Index>(config.n);
  const auto p = static_cast<Index>(config.p);
  const auto k = static_cast<Index>(config.grid);
  const auto rank = static_cast<Index>(setup2_rank(config.grid));
  const Eigen::VectorXd grid = grid_points(config.grid);

  // Rows of `loadings` are sqrt(lambda_l) e_l with lambda_l = 1/l^2.
  Eigen::MatrixXd loadings = fourier_basis(config.grid, setup2_rank(config.grid));
  for (Index l = 0; l < rank; ++l) loadings.row(l) /= static_cast<double>(l + 1);

  std::mt19937_64 rng(config.seed);
  const Eigen::MatrixXd xi =
      standard_normals(config.n, config.p * static_cast<std::size_t>(rank), rng);
  Eigen::MatrixXd innovations(n, p * k);
  for (Index j = 0; j < p; ++j) {
    innovations.middleCols(j * k, k) = xi.middleCols(j * rank, rank) * loadings;
  }

  const Eigen::VectorXd first = (grid.array() <= 0.1).cast<double>().matrix();
  const Eigen::VectorXd last = (grid.array() >= 0.9).cast<double>().matrix();
  Eigen::MatrixXd data(n, p * k);
  for (Index j = 0; j < p; ++j) {
    auto xj = data.middleCols(j * k, k);
    xj = innovations.middleCols(j * k, k);
    if (j >= 1) {
      xj += 0.4 * data.middleCols((j - 1) * k, k) * first.asDiagonal();
    }
    if (j >= 2) {
      xj += 0.2 * data.middleCols((j - 2) * k, k) * last.asDiagonal();
    }
  }
  return Setup2Draw{SimDraw{SampleSet(node_layout(config), std::move(data)),
                            band_graph(config.p, 2)},
                    std::move(innovations)};
}

SimDraw simulate_setup2(const SimConfig& config) {
  return simulate_setup2_detailed(config).draw;
}

Setup3Components setup3_components(const SimConfig& config) {
  const Eigen::VectorXd grid = grid_points(config.grid);
  const double k = static_cast<double>(config.grid);
  Setup3Components c;
  c.rough_trace = fbm_covariance(grid, kSetup3Hurst).trace() / k;
  // 9 * 5 * eigenvalue = 3 * rough, noise = 2 * rough.
  c.smooth_eigenvalue = c.rough_trace / 15.0;
  c.noise_variance = config.noise_sd ? (*config.noise_sd) * (*config.noise_sd)
                                     : 2.0 * c.rough_trace;
  const Eigen::MatrixXd basis = fourier_basis(config.grid, kSetup3Rank);
  c.smooth_trace = 9.0 * c.smooth_eigenvalue * basis.squaredNorm() / k;
  c.noise_trace = c.noise_variance;
  return c;
}

Setup3Draw simulate_setup3_detailed(const SimConfig& config) {
  config.validate();
  if (config.setup != 3) throw InvalidConfig("config is not for setup 3");
  const auto n = static_cast<Index>(config.n);
  const auto p = static_cast<Index>(config.p);
  const auto k = static_cast<Index>(config.grid);
  constexpr auto rank = static_cast<Index>(kSetup3Rank);
  const Setup3Components comp = setup3_components(config);

  std::mt19937_64 rng(config.seed);

  const Eigen::MatrixXd loadings =
      std::sqrt(comp.smooth_eigenvalue) * fourier_basis(config.grid, kSetup3Rank);
  const Eigen::MatrixXd xi =
      standard_normals(config.n, config.p * kSetup3Rank, rng);
  Eigen::MatrixXd smooth(n, p * k);
  for (Index j = 0; j < p; ++j) {
    smooth.middleCols(j * k, k) = xi.middleCols(j * rank, rank) * loadings;
  }

  const GaussianSampler fbm(fbm_covariance(grid_points(config.grid), kSetup3Hurst));
  Eigen::MatrixXd rough(n, p * k);
  for (Index t = 0; t < p / 3; ++t) {
    const Eigen::MatrixXd w = fbm.draw(config.n, rng);
    for (Index j = 3 * t; j < 3 * t + 3; ++j) rough.middleCols(j * k, k) = w;
  }

  const Eigen::MatrixXd noise =
      std::sqrt(comp.noise_variance) *
      standard_normals(config.n, config.p * config.grid, rng);

  Eigen::MatrixXd data = 3.0 * smooth + rough + noise;
  return Setup3Draw{SimDraw{SampleSet(node_layout(config), std::move(data)),
                            triplet_graph(config.p)},
                    std::move(smooth), std::move(rough), noise};
}

SimDraw simulate_setup3(const SimConfig& config) {
  return simulate_setup3_detailed(config).draw;
}

SimDraw simulate(const SimConfig& config) {
  config.validate();
  switch (config.setup) {
    case 1:
      return simulate_setup1(config);
    case 2:
      return simulate_setup2(config);
    default:
      return simulate_setup3(config);
  }
}

}  // namespace fglasso

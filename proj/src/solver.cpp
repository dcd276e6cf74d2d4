#include "fglasso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fglasso/errors.hpp"

namespace fglasso {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidConfig("lambda must be a finite value >= 0");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidConfig("rho must be a finite value > 0");
  }
  if (!(tol > 0.0)) throw InvalidConfig("tol must be > 0");
  if (max_iter == 0) throw InvalidConfig("max_iter must be >= 1");
}

namespace {

using Eigen::Index;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

// Eigenvalues of a symmetric matrix, or nullopt if the solver fails.
std::optional<Eigen::VectorXd> eigenvalues(const Eigen::MatrixXd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      symmetrized(a), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::nullopt;
  return eig.eigenvalues();
}

double off_diagonal_penalty(const BlockMatrix& a) {
  const BlockLayout& layout = a.layout();
  double sum = 0.0;
  for (std::size_t i = 0; i < layout.nodes(); ++i) {
    for (std::size_t j = 0; j < layout.nodes(); ++j) {
      if (i != j) sum += a.block(i, j).norm();
    }
  }
  return sum;
}

// Optimality certificates must also fall below this multiple of tol.
constexpr double kCertificateFactor = 10.0;

// Q and Q^{-1} from one eigendecomposition of V = rho (Z - U) - R.
struct QStep {
  Eigen::MatrixXd q;
  Eigen::MatrixXd q_inv;
};

QStep solve_q_step(const Eigen::MatrixXd& v, double rho) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition failed in the Q-update");
  }
  const Eigen::VectorXd& gamma = eig.eigenvalues();
  Eigen::VectorXd q(gamma.size());
  for (Index i = 0; i < gamma.size(); ++i) q(i) = q_eigenvalue(gamma(i), rho);
  const Eigen::MatrixXd& e = eig.eigenvectors();
  QStep step;
  step.q = symmetrized(e * q.asDiagonal() * e.transpose());
  step.q_inv = symmetrized(e * q.cwiseInverse().asDiagonal() * e.transpose());
  return step;
}

// Z-update on A = Q + U: diagonal blocks copied, off-diagonal blocks shrunk.
// Only the upper blocks are thresholded; the lower ones are their transposes
// so Z stays exactly symmetric.
void z_update(const BlockLayout& layout, const Eigen::MatrixXd& a,
              double threshold, Eigen::MatrixXd& z) {
  const std::size_t p = layout.nodes();
  for (std::size_t i = 0; i < p; ++i) {
    const auto oi = static_cast<Index>(layout.offset(i));
    const auto si = static_cast<Index>(layout.size(i));
    z.block(oi, oi, si, si) = a.block(oi, oi, si, si);
    for (std::size_t j = i + 1; j < p; ++j) {
      const auto oj = static_cast<Index>(layout.offset(j));
      const auto sj = static_cast<Index>(layout.size(j));
      const Eigen::MatrixXd shrunk =
          group_soft_threshold(a.block(oi, oj, si, sj), threshold);
      z.block(oi, oj, si, sj) = shrunk;
      z.block(oj, oi, sj, si) = shrunk.transpose();
    }
  }
}

double kkt_from_gradient(const BlockLayout& layout, const Eigen::MatrixXd& grad,
                         const Eigen::MatrixXd& z, double lambda) {
  double worst = 0.0;
  const std::size_t p = layout.nodes();
  for (std::size_t i = 0; i < p; ++i) {
    const auto oi = static_cast<Index>(layout.offset(i));
    const auto si = static_cast<Index>(layout.size(i));
    for (std::size_t j = i; j < p; ++j) {
      const auto oj = static_cast<Index>(layout.offset(j));
      const auto sj = static_cast<Index>(layout.size(j));
      const auto g = grad.block(oi, oj, si, sj);
      double violation = 0.0;
      if (i == j) {
        violation = g.norm();
      } else {
        const auto zb = z.block(oi, oj, si, sj);
        const double znorm = zb.norm();
        if (znorm > 0.0) {
          violation = (g + (lambda / znorm) * zb).norm();
        } else {
          violation = std::max(0.0, g.norm() - lambda);
        }
      }
      worst = std::max(worst, violation);
    }
  }
  return worst;
}

double dual_gap_from_inverse(const BlockLayout& layout,
                             const Eigen::MatrixXd& q_inv,
                             const Eigen::MatrixXd& r, double lambda) {
  double worst = 0.0;
  const std::size_t p = layout.nodes();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) continue;
      const auto oi = static_cast<Index>(layout.offset(i));
      const auto oj = static_cast<Index>(layout.offset(j));
      const auto si = static_cast<Index>(layout.size(i));
      const auto sj = static_cast<Index>(layout.size(j));
      worst = std::max(worst, (q_inv.block(oi, oj, si, sj) -
                               r.block(oi, oj, si, sj))
                                  .norm());
    }
  }
  return std::max(0.0, worst - lambda);
}

Eigen::MatrixXd inverse_of_pd(const BlockMatrix& q) {
  const Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(q.entries()));
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("Q is not positive definite");
  }
  const auto k = static_cast<Index>(q.dim());
  return symmetrized(llt.solve(Eigen::MatrixXd::Identity(k, k)));
}

void require_same_layout(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.layout() != b.layout()) {
    throw DimensionMismatch("matrices are defined over different layouts");
  }
}

}  // namespace

double objective(const BlockMatrix& q, const BlockMatrix& r, double lambda) {
  require_same_layout(q, r);
  const auto mu = eigenvalues(q.entries());
  if (!mu || mu->minCoeff() <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double logdet = mu->array().log().sum();
  const double trace = q.entries().cwiseProduct(r.entries().transpose()).sum();
  return trace - logdet + lambda * off_diagonal_penalty(q);
}

double functional_objective(const BlockMatrix& h, const BlockMatrix& r0,
                            const MassMatrix& mass, double lambda) {
  require_same_layout(h, r0);
  const Eigen::VectorXd& w = mass.weights();
  // tr[M H M R0]
  const double trace = (w.asDiagonal() * h.entries() * w.asDiagonal())
                           .cwiseProduct(r0.entries().transpose())
                           .sum();
  double logdet2 = 0.0;
  try {
    logdet2 = cf_logdet(h, mass);
  } catch (const NotPositiveDefinite&) {
    return std::numeric_limits<double>::infinity();
  }
  return trace - logdet2 + lambda * block_norm_21(h, mass, true);
}

double q_eigenvalue(double gamma, double rho) {
  const double root = std::sqrt(gamma * gamma + 4.0 * rho);
  // Rationalized form for negative gamma avoids cancellation.
  return gamma >= 0.0 ? (gamma + root) / (2.0 * rho) : 2.0 / (root - gamma);
}

BlockMatrix q_update(const BlockMatrix& v, double rho) {
  if (!(rho > 0.0)) throw InvalidInput("rho must be > 0");
  if (v.asymmetry() > BlockMatrix::kSymmetryTolerance) {
    throw InvalidInput("q_update needs a symmetric right-hand side");
  }
  QStep step = solve_q_step(symmetrized(v.entries()), rho);
  return BlockMatrix(v.layout(), std::move(step.q), Symmetry::kSymmetric);
}

Eigen::MatrixXd group_soft_threshold(const Eigen::Ref<const Eigen::MatrixXd>& b,
                                     double t) {
  if (!(t >= 0.0)) throw InvalidInput("threshold must be >= 0");
  const double norm = b.norm();
  if (norm <= t) return Eigen::MatrixXd::Zero(b.rows(), b.cols());
  return (1.0 - t / norm) * b;
}

AdmmSolution admm_solve(const BlockMatrix& r, const SolverConfig& config,
                        const AdmmSolution* warm_start) {
  config.validate();
  if (r.asymmetry() > BlockMatrix::kSymmetryTolerance) {
    throw InvalidInput("R must be symmetric");
  }
  const BlockLayout& layout = r.layout();
  const Eigen::MatrixXd rm = symmetrized(r.entries());
  const double rho = config.rho;
  const double threshold = config.lambda / rho;

  Eigen::MatrixXd z;
  Eigen::MatrixXd u;
  if (warm_start != nullptr) {
    require_same_layout(warm_start->z, r);
    require_same_layout(warm_start->u, r);
    z = warm_start->z.entries();
    u = warm_start->u.entries();
  } else {
    z = diag_mask(BlockMatrix(layout, rm)).entries();
    u = z;
  }

  const auto k = static_cast<Index>(layout.total());
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(k, k);
  Eigen::MatrixXd q_inv = q;
  Eigen::MatrixXd z_prev(k, k);
  AdmmSolution out;
  out.lambda = config.lambda;

  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    QStep step = solve_q_step(symmetrized(rho * (z - u) - rm), rho);
    q = std::move(step.q);
    q_inv = std::move(step.q_inv);

    z_prev.swap(z);
    z.resize(k, k);
    const Eigen::MatrixXd a = symmetrized(q + u);
    z_update(layout, a, threshold, z);
    u = a - z;

    const double q_norm = q.norm();
    out.iterations = it;
    out.primal_residual = (q - z).norm() / q_norm;
    out.dual_residual = rho * (z - z_prev).norm() / q_norm;
    if (out.primal_residual <= config.tol && out.dual_residual <= config.tol &&
        kkt_from_gradient(layout, rm - q_inv, z, config.lambda) <=
            kCertificateFactor * config.tol &&
        dual_gap_from_inverse(layout, q_inv, rm, config.lambda) <=
            kCertificateFactor * config.tol) {
      out.converged = true;
      break;
    }
  }

  out.q = BlockMatrix(layout, std::move(q), Symmetry::kSymmetric);
  out.z = BlockMatrix(layout, std::move(z), Symmetry::kSymmetric);
  out.u = BlockMatrix(layout, symmetrized(u), Symmetry::kSymmetric);
  out.objective = objective(out.q, r, config.lambda);
  out.kkt_gap =
      kkt_from_gradient(layout, rm - q_inv, out.z.entries(), config.lambda);
  out.dual_gap = dual_gap_from_inverse(layout, q_inv, rm, config.lambda);
  return out;
}

double kkt_residual(const AdmmSolution& solution, const BlockMatrix& r,
                    double lambda) {
  require_same_layout(solution.q, r);
  const Eigen::MatrixXd q_inv = inverse_of_pd(solution.q);
  return kkt_from_gradient(r.layout(), r.entries() - q_inv, solution.z.entries(),
                           lambda);
}

double dual_feasibility_gap(const AdmmSolution& solution, const BlockMatrix& r,
                            double lambda) {
  require_same_layout(solution.q, r);
  return dual_gap_from_inverse(r.layout(), inverse_of_pd(solution.q),
                               r.entries(), lambda);
}

double lambda_max(const BlockMatrix& r) {
  const Eigen::MatrixXd norms = block_frobenius_norms(r);
  double top = 0.0;
  for (Index i = 0; i < norms.rows(); ++i) {
    for (Index j = 0; j < norms.cols(); ++j) {
      if (i != j) top = std::max(top, norms(i, j));
    }
  }
  return top;
}

std::vector<double> default_lambda_grid(const BlockMatrix& r,
                                        std::size_t count, double min_ratio) {
  if (count == 0) throw InvalidInput("lambda grid needs at least one value");
  if (!(min_ratio > 0.0 && min_ratio <= 1.0)) {
    throw InvalidInput("lambda_min_ratio must lie in (0, 1]");
  }
  const double top = lambda_max(r);
  if (top <= 0.0) return {0.0};
  if (count == 1) return {top};
  std::vector<double> grid(count);
  const double step = std::log(min_ratio) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = top * std::exp(step * static_cast<double>(i));
  }
  grid.front() = top;
  grid.back() = top * min_ratio;
  return grid;
}

std::vector<AdmmSolution> lambda_path(const BlockMatrix& r,
                                      const std::vector<double>& lambdas,
                                      const SolverConfig& config,
                                      bool warm_start) {
  if (lambdas.empty()) throw InvalidInput("lambda path is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw InvalidInput("lambdas must be >= 0");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) {
      throw InvalidInput("lambdas must be strictly descending");
    }
  }
  std::vector<AdmmSolution> path;
  path.reserve(lambdas.size());
  for (const double lambda : lambdas) {
    SolverConfig step = config;
    step.lambda = lambda;
    const AdmmSolution* seed =
        warm_start && !path.empty() ? &path.back() : nullptr;
    path.push_back(admm_solve(r, step, seed));
  }
  return path;
}

BlockMatrix precision_operator(const BlockMatrix& q, const MassMatrix& mass) {
  const auto k = static_cast<Index>(q.dim());
  Eigen::MatrixXd h =
      mass.half_unweighted(q.entries() - Eigen::MatrixXd::Identity(k, k));
  return BlockMatrix(q.layout(), symmetrized(h), Symmetry::kSymmetric);
}

}  // namespace fglasso

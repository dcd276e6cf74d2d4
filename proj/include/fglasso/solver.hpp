#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fglasso/block_matrix.hpp"

namespace fglasso {

struct SolverConfig {
  double lambda = 0.0;
  double rho = 1.0;
  // Stop once both ||Q - Z||_F / ||Q||_F and rho ||Z - Z_prev||_F / ||Q||_F
  // are <= tol and the KKT residual and dual gap are <= 10 tol.
  double tol = 1e-4;
  std::size_t max_iter = 2000;

  // Throws InvalidConfig when a field is out of range.
  void validate() const;
};

struct AdmmSolution {
  BlockMatrix q;  // symmetric positive definite
  BlockMatrix z;  // carries the group sparsity; zero blocks are exact zeros
  BlockMatrix u;  // scaled dual
  double lambda = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;  // ||Q - Z||_F / ||Q||_F
  double dual_residual = 0.0;    // rho ||Z - Z_prev||_F / ||Q||_F
  double objective = 0.0;
  double kkt_gap = 0.0;
  double dual_gap = 0.0;
};

// tr[QR] - log det Q + lambda * sum_{i != j} ||Q_ij||_F. Returns +inf when Q
// is not positive definite.
double objective(const BlockMatrix& q, const BlockMatrix& r, double lambda);

// Operator-level objective in the sample coordinates,
//   tr[M H M R0] - log det_2(I + H) + lambda ||M^{1/2}(H - D o H)M^{1/2}||_{2,1},
// which stays comparable across grid resolutions. Equals
// objective(Q, R, lambda) - K under Q = I + M^{1/2} H M^{1/2} and
// R = I + M^{1/2} R0 M^{1/2}. Returns +inf outside the domain.
double functional_objective(const BlockMatrix& h, const BlockMatrix& r0,
                            const MassMatrix& mass, double lambda);

// Positive root of rho q - 1/q = gamma.
double q_eigenvalue(double gamma, double rho);

// Solves rho Q - Q^{-1} = V for symmetric V by matching eigenvalues.
BlockMatrix q_update(const BlockMatrix& v, double rho);

// (1 - t / ||B||_F)_+ B; returns an exactly-zero block when ||B||_F <= t.
Eigen::MatrixXd group_soft_threshold(const Eigen::Ref<const Eigen::MatrixXd>& b,
                                     double t);

// ADMM for the penalized log-determinant program. R must be symmetric with
// identity diagonal blocks. A warm start seeds Z and U; otherwise both start
// at D o R. Non-convergence is reported through `converged`, not thrown.
AdmmSolution admm_solve(const BlockMatrix& r, const SolverConfig& config,
                        const AdmmSolution* warm_start = nullptr);

// Largest block-wise violation of R - Q^{-1} + lambda G = 0 with G a
// subgradient of the off-diagonal group penalty; support taken from Z.
double kkt_residual(const AdmmSolution& solution, const BlockMatrix& r,
                    double lambda);

// max(0, ||offdiag(Q^{-1} - R)||_{2,inf} - lambda).
double dual_feasibility_gap(const AdmmSolution& solution, const BlockMatrix& r,
                            double lambda);

// Smallest lambda whose solution is block diagonal: the largest off-diagonal
// block norm of R.
double lambda_max(const BlockMatrix& r);

// `count` log-spaced values from lambda_max(r) down to min_ratio * lambda_max.
std::vector<double> default_lambda_grid(const BlockMatrix& r,
                                        std::size_t count = 30,
                                        double min_ratio = 0.01);

// Solves along a strictly descending lambda sequence, warm starting each
// problem from the previous solution. `config.lambda` is ignored.
std::vector<AdmmSolution> lambda_path(const BlockMatrix& r,
                                      const std::vector<double>& lambdas,
                                      const SolverConfig& config,
                                      bool warm_start = true);

// H = M^{-1/2} (Q - I) M^{-1/2}, the precision operator in sample coordinates.
BlockMatrix precision_operator(const BlockMatrix& q, const MassMatrix& mass);

}  // namespace fglasso

#pragma once

#include <Eigen/Dense>

namespace driverl {

/// Dense convex QP with box bounds, hard rows and softened rows:
///
///   min  0.5 z'Hz + g'z + sum_i (rho1_i sigma_i + 0.5 rho2_i sigma_i^2)
///   s.t. lb <= z <= ub
///        G_hard z <= h_hard
///        G_soft z - sigma <= h_soft,  sigma >= 0
///
/// Infinite entries of lb / ub are ignored. H must be positive semidefinite
/// and positive definite on the null space of the active constraints.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  Eigen::MatrixXd G_hard;
  Eigen::VectorXd h_hard;
  Eigen::MatrixXd G_soft;
  Eigen::VectorXd h_soft;
  Eigen::VectorXd rho1;
  Eigen::VectorXd rho2;

  /// Sizes everything for n variables and no rows; bounds set to +-inf.
  explicit QpProblem(Eigen::Index n = 0);
};

struct QpOptions {
  int max_iterations = 60;
  double tolerance = 1e-6;  ///< KKT residual target
};

enum class QpStatus { solved, max_iter, numerical_error };

struct QpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd sigma;  ///< soft-row slacks
  QpStatus status = QpStatus::numerical_error;
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
};

/// Mehrotra predictor-corrector interior point method. `warm_start` (if
/// non-empty) seeds the primal iterate.
QpResult solve_qp(const QpProblem& problem, const QpOptions& options = {},
                  const Eigen::VectorXd& warm_start = {});

}  // namespace driverl

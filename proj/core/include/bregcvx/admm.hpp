#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bregcvx/divergence.hpp"
#include "bregcvx/trace.hpp"

namespace bregcvx {

/// Row-separable loss over a matrix whose rows live in the simplex.
/// `evaluate` writes one value per row and, when `grad` is non-null, the
/// per-row gradients (same shape as the argument).
struct RowLoss {
  std::function<void(const Eigen::MatrixXd& m, Eigen::VectorXd& values, Eigen::MatrixXd* grad)> evaluate;
};

struct RowStepOptions {
  int max_iter = 500;
  double tol = 1e-8;
};

/// Rows of argmin_M sum_i loss_i(M_i:) + 1/(2 mu) ||M_i: - V_i:||^2 with every
/// row in the simplex. Spectral projected gradient with Armijo backtracking,
/// run independently per row (vectorised across rows). `start` rows must be feasible.
Eigen::MatrixXd admm_row_steps(const RowLoss& loss, const Eigen::MatrixXd& anchor, double mu,
                               const Eigen::MatrixXd& start, const RowStepOptions& options = {});

/// Single-row convenience wrapper; `loss` sees a 1 x t matrix.
Eigen::VectorXd admm_row_step(const RowLoss& loss, const Eigen::VectorXd& anchor, double mu,
                              const RowStepOptions& options = {});

/// D_F(X_i:, (M X)_i:) per row; the Step 1 loss of the jointly convex relaxation.
RowLoss reconstruction_row_loss(const Eigen::MatrixXd& x, const DivergenceFamily& family);

/// Default penalty: twice the reciprocal of the largest curvature of the reconstruction loss.
double automatic_mu(const Eigen::MatrixXd& x, const DivergenceFamily& family);

struct AdmmOptions {
  /// Penalty parameter; a non-positive value selects automatic_mu.
  double mu = 0.0;
  bool adapt_mu = false;
  /// Residual balancing is applied only during the first adapt_iterations sweeps.
  int adapt_iterations = std::numeric_limits<int>::max();
  /// Over-relaxation factor in [1, 2): the spectral step sees rho M + (1 - rho) Z.
  double relaxation = 1.0;
  /// Restarted Nesterov extrapolation of the spectral block and multiplier.
  bool accelerate = true;
  /// Anderson mixing memory; when positive it replaces the Nesterov extrapolation.
  int anderson_memory = 10;
  double tol = 1e-5;
  int max_iter = 1000;
  RowStepOptions row;
  TraceSink trace;
};

struct AdmmState {
  /// Row-simplex block.
  Eigen::MatrixXd m;
  /// Spectral block, in M2.
  Eigen::MatrixXd z;
  Eigen::MatrixXd lambda;
  double mu = 1.0;
  std::vector<double> primal_history;
  std::vector<double> dual_history;
};

struct AdmmResult {
  AdmmState state;
  int iterations = 0;
  double primal = 0;
  double dual = 0;
  bool converged = false;
  /// D_F(X, M X) at the returned row-simplex block.
  double objective = 0;
};

/// Minimises D_F(X, M X) over M1 by splitting row-simplex and spectral (M2)
/// constraints. Stops once max(primal, dual residual) < tol * sqrt(t).
AdmmResult admm_solve(const Eigen::MatrixXd& x, int d, const DivergenceFamily& family,
                      const AdmmOptions& options = {});

}  // namespace bregcvx

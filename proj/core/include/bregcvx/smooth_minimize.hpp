#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace bregcvx {

/// Smooth unconstrained objective. `evaluate` returns f(x) and, when `grad`
/// is non-null, writes the gradient into it.
struct SmoothProblem {
  Eigen::Index dimension = 0;
  std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)> evaluate;
  std::optional<Eigen::VectorXd> warm_start;
};

struct SmoothOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  int memory = 10;
};

struct SmoothResult {
  Eigen::VectorXd x;
  double value = 0;
  double grad_norm = 0;
  int iterations = 0;
  /// False when max_iter ran out (or the line search stalled) before
  /// ||grad|| < tol * (1 + |f|).
  bool converged = false;
};

/// Limited-memory BFGS with Armijo backtracking. Deterministic for a fixed start.
SmoothResult smooth_minimize(const SmoothProblem& problem, const SmoothOptions& options = {});

}  // namespace bregcvx

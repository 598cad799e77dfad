#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bregcvx/omega_norm.hpp"
#include "bregcvx/trace.hpp"

namespace bregcvx {

/// Smooth convex loss over a matrix argument. `evaluate` returns L(T) and
/// writes the gradient when `grad` is non-null.
struct MatrixLoss {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<double(const Eigen::MatrixXd& t, Eigen::MatrixXd* grad)> evaluate;
};

struct GcgOptions {
  /// Stop when the duality-gap estimate falls below tol * max(1, |objective|).
  double tol = 1e-6;
  /// Stop when one iteration lowers the objective by less than this (relative).
  double stall_tol = 1e-12;
  int max_iter = 1000;
  TraceSink trace;
};

/// Iterate of the conditional-gradient loop. `bound` majorises Omega(t).
struct GcgState {
  Eigen::MatrixXd t;
  double bound = 0;
  int iteration = 0;
  /// L(T_k) + alpha/2 * bound_k^2 per iteration.
  std::vector<double> objective_trace;
};

struct GcgResult {
  GcgState state;
  /// L(T) + alpha/2 * Omega^2(T) evaluated at the returned iterate.
  double objective = 0;
  double loss = 0;
  double gap = 0;
  bool converged = false;
};

struct LineSearchResult {
  double a = 1;
  double b = 0;
  double value = 0;
};

/// Minimises phi(a, b) = L(a T + b S) + alpha/2 (a s + b)^2 over a, b >= 0,
/// where S is a unit-norm atom. Never returns a value above min(phi(1,0), phi(0,1)).
LineSearchResult gcg_line_search(const MatrixLoss& loss, const Eigen::MatrixXd& t,
                                 const Eigen::MatrixXd& atom, double bound, double alpha);

/// Generalised conditional gradient for min_T L(T) + alpha/2 * Omega^2(T).
/// Starts from T = 0, bound = 0. Throws DivergedError on non-finite values.
GcgResult gcg_minimize(const MatrixLoss& loss, double alpha, const OmegaNorm& norm,
                       const GcgOptions& options = {});

}  // namespace bregcvx

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bregcvx/clustering.hpp"
#include "bregcvx/models.hpp"

namespace bregcvx {

/// Bregman k-means from `restarts` random assignments; keeps the lowest
/// objective and summarises objective (and accuracy, when labels are given)
/// across restarts. Restart r is seeded with derive_seed(seed, stream, r).
ClusteringResult alternating_hard(const Eigen::MatrixXd& x, const ModelConfig& config,
                                  const std::vector<int>& labels = {});

struct SoftEmResult {
  /// t x d rows in the simplex.
  Eigen::MatrixXd posteriors;
  Eigen::VectorXd q;
  Eigen::MatrixXd centers;
  /// sum_i log sum_j q_j exp(-D_F(x_i, mu_j)) per iteration (nondecreasing).
  std::vector<double> loglik_trace;
  double loglik = 0;
  int iterations = 0;
  RestartSummary loglik_summary;
  RestartSummary soft_accuracy_summary;
  RestartSummary hard_accuracy_summary;
};

/// EM for the Bregman mixture, best log-likelihood over `restarts`.
SoftEmResult soft_em(const Eigen::MatrixXd& x, const ModelConfig& config, const std::vector<int>& labels = {});

/// -sum_i w_{y_i} + t g(w) + sum_i D_F(x_i, mu_{y_i}) at the optimal w and mu for y.
double joint_hard_objective(const Eigen::MatrixXd& x, const Assignment& y, const DivergenceFamily& family);

/// Alternates w = log(n_j / t), mu_j = cluster means and reassignment to
/// argmax_j [w_j - D_F(x_i, mu_j)] until a fixed point.
ClusteringResult joint_hard_reopt(const Eigen::MatrixXd& x, const Assignment& y0, const ModelConfig& config);

}  // namespace bregcvx

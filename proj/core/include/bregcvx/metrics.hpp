#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bregcvx/divergence.hpp"
#include "bregcvx/spectral_geometry.hpp"

namespace bregcvx {

/// Maximum-weight assignment on a rectangular matrix (Hungarian method).
/// Returns row_to_col with -1 for unmatched rows.
std::vector<int> max_weight_matching(const Eigen::MatrixXd& weight);

struct AccuracyResult {
  double value = 0;
  /// matching[j] = label assigned to cluster j, or -1.
  std::vector<int> matching;
};

/// Best accuracy over one-to-one cluster-to-label matchings.
/// Labels are integers in [0, classes); classes is inferred when <= 0.
AccuracyResult matched_accuracy(const Assignment& y, const std::vector<int>& labels, int classes = 0);

/// Expected matched accuracy under a posterior (rows in the simplex, 1e-8).
AccuracyResult soft_accuracy(const Eigen::MatrixXd& posteriors, const std::vector<int>& labels,
                             int classes = 0);

/// argmax_j [log q_j - D_F(x_i, mu_j)], scored by matched_accuracy.
AccuracyResult hard_posterior_accuracy(const Eigen::VectorXd& q, const Eigen::MatrixXd& centers,
                                       const Eigen::MatrixXd& x, const std::vector<int>& labels,
                                       const DivergenceFamily& family, int classes = 0);

/// Per-point argmax_j [log q_j - D_F(x_i, mu_j)].
Assignment map_assignment(const Eigen::VectorXd& q, const Eigen::MatrixXd& centers, const Eigen::MatrixXd& x,
                          const DivergenceFamily& family);

}  // namespace bregcvx

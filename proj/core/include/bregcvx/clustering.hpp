#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bregcvx/spectral_geometry.hpp"

namespace bregcvx {

/// Mean and sample standard deviation of a set of per-restart values.
struct RestartSummary {
  std::vector<double> values;
  double mean = 0;
  double stddev = 0;

  static RestartSummary of(std::vector<double> v);
};

/// A hard clustering with its fitted centres and score.
struct ClusteringResult {
  Assignment y;
  /// Rows are cluster means mu_j (mean-parameter space).
  Eigen::MatrixXd centers;
  double objective = 0;
  std::optional<double> accuracy;
  /// matching[j] = label matched to cluster j, or -1.
  std::vector<int> matching;
  /// Across restarts, when the producer ran several.
  RestartSummary objective_summary;
  RestartSummary accuracy_summary;
  /// Objective after each alternating sweep (nonincreasing).
  std::vector<double> objective_trace;
  /// Log-prior weights w (joint re-optimisation only).
  Eigen::VectorXd log_prior;
};

}  // namespace bregcvx

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bregcvx/clustering.hpp"
#include "bregcvx/divergence.hpp"

namespace bregcvx {

struct KMeansResult {
  Assignment assignment;
  Eigen::MatrixXd centers;
  double objective = 0;
  /// Best restart's objective after each Lloyd iteration.
  std::vector<double> trace;
};

/// Euclidean k-means: k-means++ seeding then Lloyd iterations, best of `restarts`.
/// Restart r uses derive_seed(seed, r).
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed);

struct RoundingResult {
  /// One assignment per k-means restart (each restart seeded independently).
  std::vector<Assignment> per_restart;
  std::vector<double> kmeans_objectives;
  /// Assignment with the lowest k-means objective.
  Assignment best;
  /// Fewer than d numerically nonzero eigenvalues.
  bool degenerate = false;
  Eigen::Index dimensions = 0;
};

/// Spectral rounding: top-d eigenvectors of M, unit-normalised rows, k-means.
RoundingResult spectral_round(const Eigen::MatrixXd& m, int d, int restarts, std::uint64_t seed);

/// Cluster means; empty clusters get a zero row.
Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& x, const Assignment& y);

/// D_F(X, Y Gamma) with Gamma the cluster means (the optimal centres for any Bregman family).
double cond_objective(const Eigen::MatrixXd& x, const Assignment& y, const DivergenceFamily& family);

/// Alternating (Bregman k-means) sweeps started from y0, to a fixed point.
/// The returned objective never exceeds cond_objective(x, y0).
ClusteringResult hard_reopt(const Eigen::MatrixXd& x, const Assignment& y0, const DivergenceFamily& family,
                            int max_sweeps = 1000);

}  // namespace bregcvx

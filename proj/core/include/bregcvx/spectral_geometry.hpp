#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bregcvx {

/// Hard clustering of t points into `clusters` groups; labels[i] in [0, clusters).
struct Assignment {
  std::vector<int> labels;
  int clusters = 0;

  Assignment() = default;
  Assignment(std::vector<int> l, int k);

  /// Builds from a t x d 0/1 matrix with exactly one 1 per row.
  static Assignment from_indicator(const Eigen::MatrixXd& y);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(labels.size()); }
  Eigen::MatrixXd indicator() const;
  std::vector<int> counts() const;
  int nonempty() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Constraint sets for normalized equivalence relaxations.
///   M1: 0 <= M <= I, tr M <= d, rows in the simplex.
///   M2: 0 <= M <= I, tr M <= d, M 1 = 1.
///   M3: 0 <= M <= I, tr M <= d - 1.
enum class SpectralSet { M1, M2, M3 };

std::string to_string(SpectralSet s);

/// M = Y diag(Y'1)^+ Y'. Empty clusters contribute zero blocks.
Eigen::MatrixXd equivalence_from_assignment(const Assignment& y);
Eigen::MatrixXd equivalence_from_assignment(const Eigen::MatrixXd& indicator);

struct MembershipReport {
  bool pass = true;
  /// Worst constraint violation magnitude (0 when everything holds).
  double worst = 0;
  /// Name of the constraint with the worst violation, empty on pass.
  std::string violated;
};

MembershipReport check_membership(const Eigen::MatrixXd& m, SpectralSet set, int d,
                                  double tol = 1e-8);

/// Euclidean projection of sigma onto {mu : 0 <= mu_i <= 1, sum mu <= budget}.
/// mu_i = clip(sigma_i - lambda, 0, 1) with lambda found by an exact scan of
/// the breakpoints {sigma_i, sigma_i - 1}.
Eigen::VectorXd capped_box_simplex_project(const Eigen::VectorXd& sigma, double budget);

/// Euclidean projection onto the probability simplex (sorted-threshold method).
Eigen::VectorXd simplex_project(const Eigen::VectorXd& v);

/// Euclidean projection of a (symmetrised) square matrix onto M2.
Eigen::MatrixXd project_m2(const Eigen::MatrixXd& a, int d);

/// Relative eigenvalue cutoff used for pseudo-inverses and range tests.
inline constexpr double kRankThreshold = 1e-9;

/// tr(T' M^+ T); throws RangeError if a column of T leaves Im(M) by more
/// than `range_tol` (relative to max(1, ||T||_F)).
double pinv_quadratic_form(const Eigen::MatrixXd& m, const Eigen::MatrixXd& t,
                           double range_tol = 1e-6);

/// Centering matrix H = I - 11'/t.
Eigen::MatrixXd centering(Eigen::Index t);

}  // namespace bregcvx

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "bregcvx/error.hpp"
#include "bregcvx/metrics.hpp"
#include "bregcvx/rounding.hpp"
#include "oracles.hpp"

namespace {

using namespace bregcvx;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd blobs(std::mt19937_64& rng, int k, int per, double spread) {
  std::normal_distribution<double> n(0, spread);
  MatrixXd p(k * per, 2);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < per; ++i) {
      p(c * per + i, 0) = 10.0 * c + n(rng);
      p(c * per + i, 1) = 5.0 * (c % 2) + n(rng);
    }
  return p;
}

// ----------------------------------------------------------------- k-means

TEST(KMeans, OneClusterPerPoint) {
  std::mt19937_64 rng(1);
  const MatrixXd p = oracle::random_matrix(rng, 6, 2);
  const KMeansResult r = kmeans(p, 6, 3, 0);
  EXPECT_NEAR(r.objective, 0.0, 1e-24);
  std::vector<int> l = r.assignment.labels;
  std::sort(l.begin(), l.end());
  EXPECT_EQ(l, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}

TEST(KMeans, SeparatedBlobsAndMonotoneTrace) {
  std::mt19937_64 rng(2);
  const MatrixXd p = blobs(rng, 3, 10, 0.3);
  const KMeansResult r = kmeans(p, 3, 5, 11);
  std::vector<int> truth(30);
  for (int i = 0; i < 30; ++i) truth[static_cast<std::size_t>(i)] = i / 10;
  EXPECT_DOUBLE_EQ(matched_accuracy(r.assignment, truth).value, 1.0);
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1] + 1e-12);
  // Objective is the within-cluster sum of squares at the reported centres.
  double ss = 0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    ss += (p.row(i) - r.centers.row(r.assignment.labels[static_cast<std::size_t>(i)])).squaredNorm();
  EXPECT_NEAR(r.objective, ss, 1e-9);
  EXPECT_THROW(kmeans(p, 31, 1, 0), InvalidArgument);
}

TEST(KMeans, DeterministicPerSeed) {
  std::mt19937_64 rng(3);
  const MatrixXd p = oracle::random_matrix(rng, 40, 3);
  const KMeansResult a = kmeans(p, 4, 3, 99), b = kmeans(p, 4, 3, 99);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.objective, b.objective);
}

// ----------------------------------------------------------------- spectral rounding

TEST(SpectralRound, RecoversExactPartition) {
  const std::vector<int> labels = {0, 1, 1, 2, 0, 2, 2, 1};
  const MatrixXd m = equivalence_from_assignment(Assignment(labels, 3));
  const RoundingResult r = spectral_round(m, 3, 4, 5);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.per_restart.size(), 4u);
  for (const Assignment& a : r.per_restart) EXPECT_DOUBLE_EQ(matched_accuracy(a, labels).value, 1.0);
  EXPECT_EQ(matched_accuracy(r.best, labels).value, 1.0);
}

TEST(SpectralRound, AveragingMatrixIsDegenerate) {
  const MatrixXd m = MatrixXd::Constant(6, 6, 1.0 / 6);
  const RoundingResult r = spectral_round(m, 2, 3, 0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.best.size(), 6);
  for (int l : r.best.labels) EXPECT_TRUE(l == 0 || l == 1);
}

TEST(SpectralRound, PermutationEquivariant) {
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1, 1};
  // Noisy relaxed matrix: exact equivalence blended with the averaging matrix.
  const MatrixXd m =
      0.8 * equivalence_from_assignment(Assignment(labels, 2)) + 0.2 * MatrixXd::Constant(7, 7, 1.0 / 7);
  std::vector<Eigen::Index> perm = {3, 6, 0, 5, 1, 4, 2};
  Eigen::PermutationMatrix<Eigen::Dynamic> p(7);
  for (Eigen::Index i = 0; i < 7; ++i) p.indices()[i] = static_cast<int>(perm[static_cast<std::size_t>(i)]);
  const MatrixXd mp = p * m * p.transpose();
  const Assignment a = spectral_round(m, 2, 5, 1).best;
  const Assignment b = spectral_round(mp, 2, 5, 1).best;
  // Row i of M becomes row perm[i] of P M P'; the induced partitions coincide.
  for (Eigen::Index i = 0; i < 7; ++i)
    for (Eigen::Index j = 0; j < 7; ++j) {
      const bool same_a = a.labels[static_cast<std::size_t>(i)] == a.labels[static_cast<std::size_t>(j)];
      const bool same_b = b.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
                          b.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
      EXPECT_EQ(same_a, same_b);
    }
}

// ----------------------------------------------------------------- hard re-optimisation

TEST(HardReopt, OptimalAssignmentIsFixedPoint) {
  MatrixXd x(6, 1);
  x << 0, 0.1, 0.2, 5, 5.1, 5.2;
  const Assignment y({0, 0, 0, 1, 1, 1}, 2);
  const ClusteringResult r = hard_reopt(x, y, DivergenceFamily::euclidean());
  EXPECT_EQ(r.y, y);
  EXPECT_NEAR(r.objective, cond_objective(x, y, DivergenceFamily::euclidean()), 1e-14);
}

TEST(HardReopt, RepairsMisassignedPoint) {
  MatrixXd x(6, 1);
  x << 0, 0.1, 0.2, 5, 5.1, 5.2;
  const Assignment flipped({0, 0, 1, 1, 1, 1}, 2);
  const ClusteringResult r = hard_reopt(x, flipped, DivergenceFamily::euclidean());
  EXPECT_EQ(r.y.labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(HardReopt, NeverIncreasesObjective) {
  std::mt19937_64 rng(7);
  for (const bool bern : {false, true}) {
    const DivergenceFamily fam(bern ? FamilyId::bernoulli : FamilyId::euclidean);
    for (int k = 0; k < 30; ++k) {
      const MatrixXd x = oracle::random_unit_interval(rng, 12, 3);
      std::vector<int> l(12);
      for (int& v : l) v = static_cast<int>(rng() % 3);
      const Assignment y0(l, 3);
      const ClusteringResult r = hard_reopt(x, y0, fam);
      EXPECT_LE(r.objective, cond_objective(x, y0, fam) + 1e-12);
      EXPECT_NEAR(r.objective, oracle::hard_objective(x, r.y.labels, 3, bern), 1e-10);
      for (std::size_t s = 1; s < r.objective_trace.size(); ++s)
        EXPECT_LE(r.objective_trace[s], r.objective_trace[s - 1] + 1e-12);
    }
  }
}

// ----------------------------------------------------------------- matching and accuracy

TEST(Matching, ContingencyExample) {
  // Cluster 0 holds three of class 0 and one of class 1; cluster 1 holds four of class 1.
  const Assignment y({0, 0, 0, 0, 1, 1, 1, 1}, 2);
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1, 1, 1};
  const AccuracyResult r = matched_accuracy(y, labels);
  EXPECT_DOUBLE_EQ(r.value, 7.0 / 8.0);
  EXPECT_EQ(r.matching, (std::vector<int>{0, 1}));
}

TEST(Matching, LabelPermutationInvariant) {
  const Assignment y({2, 2, 0, 0, 1, 1}, 3);
  EXPECT_DOUBLE_EQ(matched_accuracy(y, {0, 0, 1, 1, 2, 2}).value, 1.0);
  EXPECT_THROW(matched_accuracy(y, {0, 1}), ShapeError);
}

TEST(Matching, HungarianAgreesWithEnumeration) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index c = 1 + static_cast<Eigen::Index>(rng() % 6);
    MatrixXd w = oracle::random_unit_interval(rng, r, c, 0, 10);
    if (k % 3 == 0) w = w.array().round();  // ties
    const std::vector<int> m = max_weight_matching(w);
    ASSERT_EQ(static_cast<Eigen::Index>(m.size()), r);
    double total = 0;
    std::vector<int> used;
    for (Eigen::Index i = 0; i < r; ++i) {
      const int j = m[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      total += w(i, j);
      used.push_back(j);
    }
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
    EXPECT_EQ(static_cast<Eigen::Index>(used.size()), std::min(r, c));
    EXPECT_NEAR(total, oracle::brute_force_matching(w), 1e-9);
  }
}

TEST(SoftAccuracy, OneHotAndUniform) {
  const std::vector<int> labels = {0, 1, 1, 2};
  const MatrixXd onehot = Assignment({1, 2, 2, 0}, 3).indicator();
  EXPECT_DOUBLE_EQ(soft_accuracy(onehot, labels).value, 1.0);
  const MatrixXd uniform = MatrixXd::Constant(4, 3, 1.0 / 3);
  EXPECT_NEAR(soft_accuracy(uniform, labels).value, 1.0 / 3, 1e-12);
  MatrixXd bad = uniform;
  bad(0, 0) = 0.9;
  EXPECT_THROW(soft_accuracy(bad, labels), InvalidArgument);
}

TEST(SoftAccuracy, MatchesEnumeratedMatchings) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index t = 10, d = 3;
    MatrixXd p = oracle::random_unit_interval(rng, t, d, 0.01, 1);
    for (Eigen::Index i = 0; i < t; ++i) p.row(i) /= p.row(i).sum();
    std::vector<int> labels(static_cast<std::size_t>(t));
    for (int& l : labels) l = static_cast<int>(rng() % 3);
    MatrixXd w = MatrixXd::Zero(d, 3);
    for (Eigen::Index i = 0; i < t; ++i) w.col(labels[static_cast<std::size_t>(i)]) += p.row(i).transpose();
    EXPECT_NEAR(soft_accuracy(p, labels, 3).value, oracle::brute_force_matching(w) / t, 1e-12);
  }
}

TEST(HardPosteriorAccuracy, PriorAndCentres) {
  MatrixXd x(4, 1), centers(2, 1);
  x << 0, 0.2, 0.9, 1.0;
  centers << 0, 1;
  const std::vector<int> labels = {0, 0, 1, 1};
  const auto fam = DivergenceFamily::euclidean();
  EXPECT_DOUBLE_EQ(hard_posterior_accuracy(VectorXd::Constant(2, 0.5), centers, x, labels, fam).value, 1.0);
  // An overwhelming prior on cluster 1 puts every point there.
  VectorXd q(2);
  q << 1e-300, 1;
  EXPECT_DOUBLE_EQ(hard_posterior_accuracy(q, centers, x, labels, fam).value, 0.5);
  EXPECT_EQ(map_assignment(q, centers, x, fam).labels, (std::vector<int>{1, 1, 1, 1}));
}

}  // namespace

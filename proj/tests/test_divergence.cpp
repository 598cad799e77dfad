#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bregcvx/divergence.hpp"
#include "bregcvx/error.hpp"
#include "oracles.hpp"

namespace {

using bregcvx::DivergenceFamily;
using bregcvx::FamilyId;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(Divergence, EuclideanUnitGap) {
  EXPECT_DOUBLE_EQ(DivergenceFamily::euclidean().divergence(vec({1}), vec({0})), 0.5);
}

TEST(Divergence, BernoulliSelfIsZero) {
  EXPECT_DOUBLE_EQ(DivergenceFamily::bernoulli().divergence(vec({0.5}), vec({0.5})), 0.0);
}

TEST(Divergence, BernoulliHandValue) {
  // x ln(x/y) + (1-x) ln((1-x)/(1-y)) with x = 1/2, y = 1/4.
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(0.5 / 0.75);
  EXPECT_NEAR(DivergenceFamily::bernoulli().divergence(vec({0.5}), vec({0.25})), expected, 1e-14);
  EXPECT_NEAR(expected, 0.5 * std::log(4.0 / 3.0), 1e-14);
}

TEST(Divergence, BernoulliRejectsOutOfDomain) {
  const auto b = DivergenceFamily::bernoulli();
  try {
    b.divergence(vec({0.5, 1.5}), vec({0.5, 0.5}));
    FAIL() << "expected DomainError";
  } catch (const bregcvx::DomainError& e) {
    EXPECT_EQ(e.index(), 1);
  }
  EXPECT_THROW(b.divergence(vec({0.5}), vec({-0.1})), bregcvx::DomainError);
}

TEST(Divergence, BernoulliClampsBoundaryGrazing) {
  const auto b = DivergenceFamily::bernoulli();
  const double v = b.divergence(vec({1.0 + 5e-13}), vec({0.5}));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, std::log(2.0), 1e-9);
}

TEST(Divergence, ShapeMismatchThrows) {
  EXPECT_THROW(DivergenceFamily::euclidean().divergence(vec({1, 2}), vec({1})), bregcvx::ShapeError);
  EXPECT_THROW(DivergenceFamily::euclidean().rowwise_divergence(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 3)),
               bregcvx::ShapeError);
  EXPECT_THROW(DivergenceFamily::euclidean().conjugate_divergence(MatrixXd::Zero(2, 2), MatrixXd::Zero(3, 2)),
               bregcvx::ShapeError);
}

TEST(Divergence, RowwiseExamples) {
  const auto e = DivergenceFamily::euclidean();
  MatrixXd x(2, 1), y = MatrixXd::Zero(2, 1);
  x << 1, 0;
  EXPECT_DOUBLE_EQ(e.rowwise_divergence(x, y), 0.5);
  EXPECT_DOUBLE_EQ(e.rowwise_divergence(x, x), 0.0);

  std::mt19937_64 rng(7);
  const auto b = DivergenceFamily::bernoulli();
  const MatrixXd p = oracle::random_unit_interval(rng, 3, 2), q = oracle::random_unit_interval(rng, 3, 2);
  double sum = 0;
  for (Eigen::Index i = 0; i < 3; ++i) sum += b.divergence(p.row(i).transpose(), q.row(i).transpose());
  EXPECT_NEAR(b.rowwise_divergence(p, q), sum, 1e-14);
  double direct = 0;
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) direct += oracle::bregman(p(i, j), q(i, j), true);
  EXPECT_NEAR(b.rowwise_divergence(p, q), direct, 1e-12);
}

TEST(Divergence, ConjugateExamples) {
  const auto e = DivergenceFamily::euclidean();
  MatrixXd a(1, 1), b(1, 1);
  a << 1;
  b << 0;
  EXPECT_DOUBLE_EQ(e.conjugate_divergence(a, b), 0.5);
  EXPECT_DOUBLE_EQ(e.conjugate_divergence(a, a), 0.0);

  a << 0;
  b << std::log(3.0);
  const double expected = std::log(2.0) - std::log(4.0) + std::log(3.0) * 0.75;
  EXPECT_NEAR(DivergenceFamily::bernoulli().conjugate_divergence(a, b), expected, 1e-14);
  EXPECT_NEAR(expected, 0.13081, 1e-5);
}

TEST(Divergence, ConjugateGradientExamples) {
  std::mt19937_64 rng(11);
  const MatrixXd a = oracle::random_matrix(rng, 3, 2), b = oracle::random_matrix(rng, 3, 2);
  EXPECT_EQ(DivergenceFamily::bernoulli().conjugate_divergence_grad(a, a), MatrixXd::Zero(3, 2));
  EXPECT_LT((DivergenceFamily::euclidean().conjugate_divergence_grad(a, b) - (a - b)).norm(), 1e-15);
}

TEST(Divergence, TransferRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> z(-30, 30), x(1e-6, 1 - 1e-6);
  for (const auto& fam : {DivergenceFamily::euclidean(), DivergenceFamily::bernoulli()}) {
    for (int k = 0; k < 500; ++k) {
      const double zz = fam.id() == FamilyId::bernoulli ? z(rng) / 3 : z(rng);
      EXPECT_NEAR(fam.transfer(fam.inverse_transfer(zz)), zz, 1e-10 * std::max(1.0, std::abs(zz)));
      const double xx = x(rng);
      EXPECT_NEAR(fam.inverse_transfer(fam.transfer(xx)), xx, 1e-10 * std::max(1.0, std::abs(xx)));
    }
  }
}

TEST(Divergence, NonnegativeAndZeroOnlyAtEquality) {
  std::mt19937_64 rng(5);
  for (const auto& fam : {DivergenceFamily::euclidean(), DivergenceFamily::bernoulli()}) {
    for (int k = 0; k < 1000; ++k) {
      const VectorXd p = oracle::random_unit_interval(rng, 3, 1, 0.01, 0.99);
      const VectorXd q = oracle::random_unit_interval(rng, 3, 1, 0.01, 0.99);
      EXPECT_GE(fam.divergence(p, q), 0.0);
      EXPECT_LE(fam.divergence(p, p), 1e-12);
      if ((p - q).norm() > 1e-3) {
        EXPECT_GT(fam.divergence(p, q), 1e-12);
      }
    }
  }
}

TEST(Divergence, ConjugateIdentity) {
  std::mt19937_64 rng(9);
  for (const auto& fam : {DivergenceFamily::euclidean(), DivergenceFamily::bernoulli()}) {
    for (int k = 0; k < 200; ++k) {
      const MatrixXd p = oracle::random_unit_interval(rng, 1, 4, 0.01, 0.99);
      const MatrixXd q = oracle::random_unit_interval(rng, 1, 4, 0.01, 0.99);
      const double d = fam.rowwise_divergence(p, q);
      const double c = fam.conjugate_divergence(fam.transfer(q), fam.transfer(p));
      EXPECT_NEAR(d, c, 1e-10 * std::max(1.0, d));
    }
  }
}

TEST(Divergence, ConjugateGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  for (const auto& fam : {DivergenceFamily::euclidean(), DivergenceFamily::bernoulli()}) {
    for (int k = 0; k < 5; ++k) {
      const MatrixXd a = oracle::random_matrix(rng, 4, 3), b = oracle::random_matrix(rng, 4, 3);
      const MatrixXd fd =
          oracle::finite_difference([&](const MatrixXd& m) { return fam.conjugate_divergence(m, b); }, a);
      EXPECT_LT(oracle::relative_error(fam.conjugate_divergence_grad(a, b), fd), 1e-5);
    }
  }
}

TEST(Divergence, ConvexInFirstArgumentOfConjugate) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(0.01, 0.99);
  for (const auto& fam : {DivergenceFamily::euclidean(), DivergenceFamily::bernoulli()}) {
    for (int k = 0; k < 200; ++k) {
      const MatrixXd a1 = oracle::random_matrix(rng, 2, 3, 3), a2 = oracle::random_matrix(rng, 2, 3, 3);
      const MatrixXd b = oracle::random_matrix(rng, 2, 3, 3);
      const double l = lam(rng);
      EXPECT_LE(fam.conjugate_divergence(l * a1 + (1 - l) * a2, b),
                l * fam.conjugate_divergence(a1, b) + (1 - l) * fam.conjugate_divergence(a2, b) + 1e-10);
    }
  }
}

TEST(Divergence, JointlyConvexMidpoint) {
  std::mt19937_64 rng(19);
  for (const auto& fam : {DivergenceFamily::euclidean(), DivergenceFamily::bernoulli()}) {
    EXPECT_TRUE(fam.jointly_convex());
    for (int k = 0; k < 500; ++k) {
      const VectorXd x1 = oracle::random_unit_interval(rng, 3, 1, 0.01, 0.99);
      const VectorXd x2 = oracle::random_unit_interval(rng, 3, 1, 0.01, 0.99);
      const VectorXd y1 = oracle::random_unit_interval(rng, 3, 1, 0.01, 0.99);
      const VectorXd y2 = oracle::random_unit_interval(rng, 3, 1, 0.01, 0.99);
      EXPECT_LE(fam.divergence(0.5 * (x1 + x2), 0.5 * (y1 + y2)),
                0.5 * fam.divergence(x1, y1) + 0.5 * fam.divergence(x2, y2) + 1e-12);
    }
  }
}

TEST(Divergence, StableAtExtremeArguments) {
  EXPECT_NEAR(bregcvx::softplus(800.0), 800.0, 1e-12);
  EXPECT_NEAR(bregcvx::softplus(-800.0), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(bregcvx::sigmoid(-800.0), 0.0);
  EXPECT_DOUBLE_EQ(bregcvx::sigmoid(800.0), 1.0);
  MatrixXd a(1, 2), b(1, 2);
  a << 700, -700;
  b << -700, 700;
  EXPECT_TRUE(std::isfinite(DivergenceFamily::bernoulli().conjugate_divergence(a, b)));
}

TEST(Divergence, FamilyNames) {
  EXPECT_EQ(bregcvx::family_from_string("linear"), FamilyId::euclidean);
  EXPECT_EQ(bregcvx::family_from_string("sigmoid"), FamilyId::bernoulli);
  EXPECT_EQ(bregcvx::family_from_string("bernoulli"), FamilyId::bernoulli);
  EXPECT_THROW(bregcvx::family_from_string("poisson"), bregcvx::InvalidArgument);
}

TEST(SoftMax, ValueAndGradient) {
  const bregcvx::SoftMaxPotential g(3);
  const VectorXd w = vec({1000, 1000, 1000});
  EXPECT_NEAR(g.value(w), 1000 + std::log(3.0), 1e-10);
  const VectorXd p = g.gradient(vec({0.3, -2, 5}));
  EXPECT_NEAR(p.sum(), 1.0, 1e-15);
  MatrixXd w0(3, 1);
  w0 << 0.3, -2, 5;
  const MatrixXd fd = oracle::finite_difference([&](const MatrixXd& m) { return g.value(m.col(0)); }, w0);
  EXPECT_LT((fd.col(0) - p).norm(), 1e-8);
  EXPECT_NEAR(bregcvx::log_sum_exp(vec({-1000, -1000})), -1000 + std::log(2.0), 1e-10);
}

}  // namespace

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bregcvx/error.hpp"
#include "bregcvx/omega_norm.hpp"
#include "oracles.hpp"

namespace {

using namespace bregcvx;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

VectorXd singular_values(const MatrixXd& t) { return Eigen::JacobiSVD<MatrixXd>(t).singularValues(); }

TEST(OmegaSpectrum, ThreeTwoOne) {
  const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(vec({3, 2, 1}), 3));
  EXPECT_EQ(c.k, 0);
  EXPECT_NEAR(c.value, 18.0, 1e-12);
  EXPECT_LT((c.sigma - vec({1, 2.0 / 3, 1.0 / 3})).norm(), 1e-12);
  EXPECT_NEAR(oracle::omega_squared_grid(vec({3, 2, 1}), 3), 18.0, 1e-6 * 18);
}

TEST(OmegaSpectrum, TwoOne) {
  const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(vec({2, 1}), 2));
  EXPECT_EQ(c.k, 0);
  EXPECT_NEAR(c.value, 9.0, 1e-12);
  EXPECT_LT((c.sigma - vec({2.0 / 3, 1.0 / 3})).norm(), 1e-12);
  EXPECT_NEAR(oracle::omega_squared_dense_grid(2, 1, 2), 9.0, 1e-6);
}

TEST(OmegaSpectrum, LowRankIsFrobenius) {
  const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(vec({4, 1, 0, 0}), 4));
  EXPECT_NEAR(c.value, 17.0, 1e-12);
  EXPECT_NEAR(c.sigma[0], 1.0, 1e-15);
  EXPECT_NEAR(c.sigma[1], 1.0, 1e-15);
  EXPECT_EQ(c.sigma[2], 0.0);
}

TEST(OmegaSpectrum, CapsLeadingValues) {
  // s = (10, 1, 1), d = 3: k = 1 caps the first eigenvalue.
  const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(vec({10, 1, 1}), 3));
  EXPECT_EQ(c.k, 1);
  EXPECT_NEAR(c.value, 100 + 4, 1e-12);
  EXPECT_NEAR(oracle::omega_squared_grid(vec({10, 1, 1}), 3), 104, 1e-6 * 104);
}

TEST(OmegaSpectrum, PadsShortSpectra) {
  const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(vec({2}), 4));
  EXPECT_NEAR(c.value, 4.0, 1e-15);
  EXPECT_EQ(c.sigma.size(), 3);
}

TEST(OmegaSpectrum, RejectsBadInput) {
  EXPECT_THROW(SingularSpectrum(vec({1, 2}), 3), InvalidArgument);
  EXPECT_THROW(SingularSpectrum(vec({2, -1}), 3), InvalidArgument);
  EXPECT_THROW(SingularSpectrum(vec({2, 1}), 1), InvalidArgument);
}

TEST(OmegaSpectrum, CertificateInvariantsAndMonotoneBreakpoint) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index t = 1 + static_cast<Eigen::Index>(rng() % 10);
    const int d = 2 + static_cast<int>(rng() % 5);
    VectorXd s = oracle::random_matrix(rng, t, 1).cwiseAbs();
    if (trial % 5 == 0) s[0] *= 20;  // force capped leading values
    std::sort(s.data(), s.data() + s.size(), std::greater<>());
    const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(s, d));
    EXPECT_LE(c.sigma.sum(), d - 1 + 1e-10);
    EXPECT_LE(c.sigma.maxCoeff(), 1 + 1e-10);
    EXPECT_GE(c.sigma.minCoeff(), 0.0);
    VectorXd padded = VectorXd::Zero(std::max<Eigen::Index>(t, d - 1));
    padded.head(t) = s;
    auto holds = [&](int k) {
      return padded.tail(padded.size() - k).sum() >= (d - 1 - k) * padded[k] - 1e-12 * padded.sum();
    };
    EXPECT_TRUE(holds(c.k));
    for (int k = c.k; k <= d - 2; ++k) EXPECT_TRUE(holds(k)) << "k' = " << k;
    for (int k = 0; k < c.k; ++k) EXPECT_FALSE(padded.tail(padded.size() - k).sum() >= (d - 1 - k) * padded[k]);
    for (int i = 0; i < c.k; ++i) EXPECT_EQ(c.sigma[i], 1.0);
    const double value = oracle::omega_squared_grid(s, d);
    EXPECT_NEAR(c.value, value, 1e-5 * std::max(1.0, value));
  }
}

TEST(OmegaSpectrum, TiesGiveSameValue) {
  const OmegaCertificate c = omega_squared_spectrum(SingularSpectrum(vec({1, 1, 1, 1}), 3));
  EXPECT_NEAR(c.value, 8.0, 1e-12);  // (sum s)^2 / (d-1)
  EXPECT_NEAR(oracle::omega_squared_grid(vec({1, 1, 1, 1}), 3), 8.0, 1e-6 * 8);
}

TEST(Omega, Examples) {
  EXPECT_EQ(omega(MatrixXd::Zero(4, 3), 3), 0.0);
  std::mt19937_64 rng(59);
  const MatrixXd lowrank = oracle::random_matrix(rng, 5, 2) * oracle::random_matrix(rng, 2, 4);
  EXPECT_NEAR(omega(lowrank, 3), lowrank.norm(), 1e-10 * lowrank.norm());
}

TEST(Omega, RandomMatchesDenseSigmaGrid) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    // Rank-2 matrices: the sigma grid over two eigenvalues is exhaustive.
    const MatrixXd t = oracle::random_matrix(rng, 5, 2) * oracle::random_matrix(rng, 2, 4);
    const VectorXd s = singular_values(t);
    const double ref = oracle::omega_squared_dense_grid(s[0], s[1], 2, 200000);
    EXPECT_NEAR(omega(t, 2) * omega(t, 2), ref, 1e-5 * ref);
  }
}

TEST(OmegaDual, Examples) {
  EXPECT_NEAR(omega_dual(MatrixXd::Identity(3, 3), 3), std::sqrt(2.0), 1e-12);
  std::mt19937_64 rng(67);
  const MatrixXd u = oracle::random_orthogonal(rng, 3), v = oracle::random_orthogonal(rng, 3);
  const MatrixXd r = u * vec({5, 3, 1}).asDiagonal() * v.transpose();
  EXPECT_NEAR(omega_dual(r, 2), 5.0, 1e-12);
}

TEST(OmegaDual, SampledDirectionsNeverExceedAndSubgradientAttains) {
  std::mt19937_64 rng(71);
  const MatrixXd r = oracle::random_matrix(rng, 6, 4);
  const double dual = omega_dual(r, 4);
  double best = 0;
  for (int k = 0; k < 10000; ++k) {
    const MatrixXd t = oracle::random_matrix(rng, 6, 4);
    best = std::max(best, (r.array() * t.array()).sum() / omega(t, 4));
  }
  EXPECT_LE(best, dual + 1e-10);
  const MatrixXd s = omega_dual_subgradient(r, 4);
  EXPECT_NEAR((r.array() * s.array()).sum(), dual, 1e-8);
  EXPECT_NEAR(omega(s, 4), 1.0, 1e-8);
}

TEST(OmegaDualSubgradient, Examples) {
  MatrixXd r = MatrixXd::Zero(3, 3);
  r(0, 0) = 2;
  MatrixXd expected = MatrixXd::Zero(3, 3);
  expected(0, 0) = 1;
  EXPECT_LT((omega_dual_subgradient(r, 2) - expected).norm(), 1e-12);

  const MatrixXd s = omega_dual_subgradient(MatrixXd::Identity(3, 3), 3);
  EXPECT_NEAR(omega(s, 3), 1.0, 1e-10);
  EXPECT_NEAR(s.trace(), std::sqrt(2.0), 1e-10);
  EXPECT_THROW(omega_dual_subgradient(MatrixXd::Zero(2, 2), 2), InvalidArgument);
}

TEST(OmegaNormAxioms, HomogeneityTriangleDefiniteness) {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> scalar(0, 3);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 3;
    const MatrixXd a = oracle::random_matrix(rng, 6, 4), b = oracle::random_matrix(rng, 6, 4);
    const double c = scalar(rng);
    EXPECT_NEAR(omega(c * a, d), std::abs(c) * omega(a, d), 1e-10 * std::abs(c) * omega(a, d));
    EXPECT_LE(omega(a + b, d), omega(a, d) + omega(b, d) + 1e-8);
    EXPECT_GT(omega(a, d), 0.0);
    EXPECT_GE(omega(a, d), a.norm() - 1e-10);
  }
}

TEST(OmegaNormAxioms, GeneralisedCauchySchwarz) {
  std::mt19937_64 rng(79);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 3;
    const MatrixXd r = oracle::random_matrix(rng, 5, 3), t = oracle::random_matrix(rng, 5, 3);
    EXPECT_LE((r.array() * t.array()).sum(), omega_dual(r, d) * omega(t, d) + 1e-8);
  }
}

TEST(OmegaNormAxioms, UnitaryInvariance) {
  std::mt19937_64 rng(83);
  for (int k = 0; k < 50; ++k) {
    const MatrixXd t = oracle::random_matrix(rng, 5, 4);
    const MatrixXd u = oracle::random_orthogonal(rng, 5), v = oracle::random_orthogonal(rng, 4);
    EXPECT_NEAR(omega(u * t * v.transpose(), 3), omega(t, 3), 1e-10 * omega(t, 3));
  }
}

TEST(RecoverM, OrthonormalColumnsGiveProjector) {
  std::mt19937_64 rng(89);
  const MatrixXd q = oracle::random_orthogonal(rng, 5).leftCols(2);
  const MatrixXd m = recover_m(q, 3, SpectralSet::M3);
  EXPECT_LT((m - q * q.transpose()).norm(), 1e-10);
  EXPECT_NEAR(pinv_quadratic_form(m, q), 2.0, 1e-10);
}

TEST(RecoverM, EigenvaluesMatchCertificate) {
  std::mt19937_64 rng(97);
  const MatrixXd u = oracle::random_orthogonal(rng, 4), v = oracle::random_orthogonal(rng, 3);
  MatrixXd sv = MatrixXd::Zero(4, 3);
  sv(0, 0) = 3;
  sv(1, 1) = 2;
  sv(2, 2) = 1;
  const MatrixXd m = recover_m(u * sv * v.transpose(), 3, SpectralSet::M3);
  VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues().reverse();
  EXPECT_LT((ev.head(3) - vec({1, 2.0 / 3, 1.0 / 3})).norm(), 1e-10);
  EXPECT_NEAR(ev[3], 0.0, 1e-12);
}

TEST(RecoverM, QuadraticFormEqualsOmegaSquared) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 4;
    const MatrixXd t = oracle::random_matrix(rng, 7, 3);
    const MatrixXd m = recover_m(t, d, SpectralSet::M3);
    EXPECT_TRUE(check_membership(m, SpectralSet::M3, d).pass);
    const double w = omega(t, d);
    EXPECT_NEAR(pinv_quadratic_form(m, t), w * w, 1e-8 * std::max(1.0, w * w));

    const MatrixXd m2 = recover_m(t, d, SpectralSet::M2);
    EXPECT_TRUE(check_membership(m2, SpectralSet::M2, d).pass);
    const OmegaNorm n2(d, NormGeometry::m2);
    EXPECT_NEAR(pinv_quadratic_form(m2, t), n2.squared(t), 1e-8 * std::max(1.0, n2.squared(t)));
  }
  EXPECT_THROW(recover_m(MatrixXd::Zero(3, 2), 2, SpectralSet::M3), InvalidArgument);
}

TEST(OmegaNormGeometry, CentredDecomposition) {
  std::mt19937_64 rng(103);
  for (int k = 0; k < 20; ++k) {
    const MatrixXd t = oracle::random_matrix(rng, 6, 3);
    const OmegaNorm n2(3, NormGeometry::m2), n3(3, NormGeometry::m3);
    const double mean_part = (VectorXd::Ones(6).transpose() * t).squaredNorm() / 6;
    const double centred = omega(centering(6) * t, 3);
    EXPECT_NEAR(n2.squared(t), mean_part + centred * centred, 1e-10 * n2.squared(t));
    EXPECT_NEAR(n3.squared(t), omega(t, 3) * omega(t, 3), 1e-12 * n3.squared(t));
    // Dual pairing and subgradient attainment hold in both geometries.
    for (const OmegaNorm* n : {&n2, &n3}) {
      const MatrixXd r = oracle::random_matrix(rng, 6, 3);
      const MatrixXd s = n->dual_subgradient(r);
      EXPECT_NEAR((r.array() * s.array()).sum(), n->dual(r), 1e-8);
      EXPECT_NEAR(n->value(s), 1.0, 1e-8);
      EXPECT_LE((r.array() * t.array()).sum(), n->dual(r) * n->value(t) + 1e-8);
    }
  }
}

TEST(TopSingularTriplets, MatchesFullDecomposition) {
  std::mt19937_64 rng(107);
  for (const auto& shape : {std::pair<int, int>{8, 3}, {3, 8}, {6, 6}}) {
    const MatrixXd r = oracle::random_matrix(rng, shape.first, shape.second);
    const SingularTriplets top = top_singular_triplets(r, 2);
    const VectorXd full = singular_values(r);
    EXPECT_LT((top.values - full.head(2)).norm(), 1e-10);
    EXPECT_LT((top.u.transpose() * r * top.v - top.values.asDiagonal().toDenseMatrix()).norm(), 1e-9);
  }
}

}  // namespace

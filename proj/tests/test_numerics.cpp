#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "olfact/error.hpp"
#include "olfact/numerics.hpp"
#include "support.hpp"

using namespace olfact;
using olfact::test::gaussian;
using olfact::test::gaussian_vec;

TEST(Svd, IdentityHasUnitSpectrum) {
  const SvdResult r = numerics::svd(Matrix::Identity(3, 3));
  EXPECT_TRUE(r.s.isApprox(Vector::Ones(3)));
  EXPECT_TRUE((r.u * r.s.asDiagonal() * r.vt).isApprox(Matrix::Identity(3, 3)));
}

TEST(Svd, ZeroMatrix) {
  const SvdResult r = numerics::svd(Matrix::Zero(4, 2));
  EXPECT_EQ(r.s.size(), 2);
  EXPECT_EQ(r.s.maxCoeff(), 0.0);
}

TEST(Svd, MatchesGramCharacteristicPolynomial) {
  std::mt19937_64 rng(11);
  const Matrix m = gaussian(5, 3, rng);
  const SvdResult r = numerics::svd(m);
  const auto eig = test::gram_eigenvalues_bisection(m.transpose() * m);
  ASSERT_EQ(eig.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.s(i), std::sqrt(eig[i]), 1e-8);
}

TEST(Svd, ReconstructionOnSeededMatrices) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 50);
  for (int t = 0; t < 100; ++t) {
    const Matrix m = gaussian(dim(rng), dim(rng), rng);
    const SvdResult r = numerics::svd(m);
    const Matrix back = r.u * r.s.asDiagonal() * r.vt;
    EXPECT_LE((back - m).norm(), 1e-10 * m.norm()) << "case " << t;
    const Index p = r.s.size();
    EXPECT_LE((r.u.transpose() * r.u - Matrix::Identity(p, p)).norm(), 1e-10);
    EXPECT_LE((r.vt * r.vt.transpose() - Matrix::Identity(p, p)).norm(), 1e-10);
    for (Index i = 1; i < p; ++i) EXPECT_GE(r.s(i - 1), r.s(i));
  }
}

TEST(Svd, RankDeficientInputsConverge) {
  std::mt19937_64 rng(12);
  for (Index r = 1; r <= 3; ++r) {
    const Matrix m = gaussian(8, r, rng) * gaussian(r, 6, rng);
    const SvdResult s = numerics::svd(m);
    EXPECT_LE((s.u * s.s.asDiagonal() * s.vt - m).norm(), 1e-12 * m.norm());
    EXPECT_EQ(numerics::numerical_rank(s.s), r);
  }
  Matrix line(5, 3);
  for (int i = 0; i < 5; ++i) line.row(i) << i - 2.0, 2.0 * (i - 2.0), 2.0 - i;
  EXPECT_EQ(numerics::numerical_rank(numerics::svd(line).s), 1);
}

TEST(Svd, SignConventionAndDeterminism) {
  std::mt19937_64 rng(3);
  const Matrix m = gaussian(7, 4, rng);
  const SvdResult a = numerics::svd(m);
  const SvdResult b = numerics::svd(m);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.vt, b.vt);
  for (Index j = 0; j < a.u.cols(); ++j) {
    Index first = 0;
    while (std::abs(a.u(first, j)) <= 1e-12) ++first;
    EXPECT_GT(a.u(first, j), 0.0);
  }
}

TEST(Svd, RejectsNonFinite) {
  Matrix m = Matrix::Ones(3, 3);
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(numerics::svd(m), NonFinite);
  m(1, 2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(numerics::svd(m), NonFinite);
}

TEST(Svd, WideMatrixMatchesEigen) {
  std::mt19937_64 rng(5);
  const Matrix m = gaussian(3, 9, rng);
  const Vector ref = Eigen::JacobiSVD<Matrix>(m).singularValues();
  EXPECT_LE((numerics::svd(m).s - ref).norm(), 1e-12);
  EXPECT_NEAR(numerics::spectral_norm(m), ref(0), 1e-12);
  EXPECT_NEAR(numerics::nuclear_norm(m), ref.sum(), 1e-12);
}

TEST(Svt, DiagonalExample) {
  Matrix m = Matrix::Zero(2, 2);
  m.diagonal() << 3.0, 1.0;
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1.0;
  EXPECT_LE((numerics::svt(m, 2.0) - want).norm(), 1e-14);
}

TEST(Svt, ZeroThresholdIsIdentityAndLargeThresholdIsZero) {
  std::mt19937_64 rng(8);
  const Matrix m = gaussian(4, 3, rng);
  EXPECT_LE((numerics::svt(m, 0.0) - m).norm(), 1e-12);
  const double s1 = numerics::spectral_norm(m);
  EXPECT_TRUE(numerics::svt(m, s1).isZero(0.0));
  EXPECT_TRUE(numerics::svt(m, 10 * s1).isZero(0.0));
  EXPECT_THROW(numerics::svt(m, -1.0), InvalidConfig);
}

TEST(Svt, ReportsShrunkNuclearNorm) {
  std::mt19937_64 rng(9);
  const Matrix m = gaussian(5, 5, rng);
  double nn = 0;
  const Matrix z = numerics::svt(m, 0.7, nn);
  EXPECT_NEAR(nn, test::nuclear_norm_ref(z), 1e-10);
}

TEST(Svt, MatchesSubgradientOracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 3; ++t) {
    const Matrix m = gaussian(3, 3, rng);
    const double tau = 0.5 + t * 0.4;
    const Matrix z = numerics::svt(m, tau);
    const Matrix ref = test::svt_subgradient_oracle(m, tau, 200000);
    auto obj = [&](const Matrix& a) {
      return 0.5 * (a - m).squaredNorm() + tau * test::nuclear_norm_ref(a);
    };
    // 1-strong convexity: ||z - ref||^2 <= 2 (F(ref) - F(z)).
    EXPECT_LE(obj(z), obj(ref) + 1e-12);
    EXPECT_LE((z - ref).norm(), 1e-6) << "case " << t;
  }
}

TEST(Prox, GroupExamples) {
  Vector v(2);
  v << 3, -4;
  const Vector x = numerics::prox_nonneg_group(v, 1.0);
  EXPECT_LE((x - Vector::Unit(2, 0) * 2.0).norm(), 1e-15);
  EXPECT_LE((x - test::prox_group_oracle(v, 1.0)).norm(), 1e-8);
  v << -1, -0.5;
  EXPECT_TRUE(numerics::prox_nonneg_group(v, 0.3).isZero(0.0));
  v << 1.5, -2;
  EXPECT_EQ(numerics::prox_nonneg_group(v, 0.0), v.cwiseMax(0.0));
  EXPECT_THROW(numerics::prox_nonneg_group(v, -1.0), InvalidConfig);
}

TEST(Prox, L1AndL2sqExamples) {
  Vector v(2);
  v << 0.5, -2;
  EXPECT_TRUE(numerics::prox_nonneg_l1(v, 1.0).isZero(0.0));
  EXPECT_EQ(numerics::prox_nonneg_l1(v, 0.0), v.cwiseMax(0.0));
  v << 3, 1;
  Vector want(2);
  want << 2.5, 0.5;
  EXPECT_EQ(numerics::prox_nonneg_l1(v, 0.5), want);
  want << 1.5, 0.5;
  EXPECT_LE((numerics::prox_nonneg_l2sq(v, 0.5) - want).norm(), 1e-15);
  EXPECT_THROW(numerics::prox_nonneg_l1(v, -0.1), InvalidConfig);
}

TEST(Prox, GroupNeverWorseThanSimpleCandidates) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> th(0.0, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const Vector v = gaussian_vec(dim(rng), rng);
    const double theta = th(rng);
    const Vector x = numerics::prox_nonneg_group(v, theta);
    EXPECT_GE(x.minCoeff(), 0.0);
    const double f = test::prox_group_objective(x, v, theta);
    EXPECT_LE(f, test::prox_group_objective(v.cwiseMax(0.0), v, theta) + 1e-12);
    EXPECT_LE(f, test::prox_group_objective(Vector::Zero(v.size()), v, theta) + 1e-12);
  }
}

TEST(Prox, GroupMatchesNumericMinimization) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> th(0.0, 2.0);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    const Vector v = gaussian_vec(dim(rng), rng);
    const double theta = th(rng);
    worst = std::max(worst, (numerics::prox_nonneg_group(v, theta) -
                             test::prox_group_oracle(v, theta)).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Pca, CollinearPointsExplainEverything) {
  Matrix p(5, 3);
  for (int i = 0; i < 5; ++i) p.row(i) << i, 2.0 * i, -1.0 * i;
  const auto r = numerics::pca(p, 1);
  EXPECT_NEAR(r.explained_variance_ratio(0), 1.0, 1e-12);
}

TEST(Pca, IdenticalPointsAreDegenerate) {
  Matrix p = Matrix::Ones(4, 3);
  EXPECT_THROW(numerics::pca(p, 1), DegenerateData);
  EXPECT_THROW(numerics::pca(Matrix::Ones(1, 3), 1), InvalidConfig);
}

TEST(Pca, MatchesCenteredSvd) {
  std::mt19937_64 rng(10);
  const Matrix p = gaussian(10, 4, rng);
  const auto r = numerics::pca(p, 2);
  const Matrix c = p.rowwise() - p.colwise().mean();
  Eigen::JacobiSVD<Matrix> s(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  for (int j = 0; j < 2; ++j) {
    // Components are defined up to sign.
    Vector ref = c * s.matrixV().col(j);
    const double sign = ref.dot(r.coords.col(j)) >= 0 ? 1.0 : -1.0;
    EXPECT_LE((r.coords.col(j) - sign * ref).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(r.explained_variance(j), s.singularValues()(j) * s.singularValues()(j) / 9.0,
                1e-10);
  }
  EXPECT_LE((r.components.transpose() * r.components - Matrix::Identity(2, 2)).norm(), 1e-12);
}

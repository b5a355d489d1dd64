#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lfc/linalg.h"
#include "test_oracles.h"

namespace lfc {
namespace {

TEST(SpectralRadius, Identity) {
  EXPECT_NEAR(SpectralRadius(MatrixXd::Identity(4, 4)), 1.0, 1e-14);
}

TEST(SpectralRadius, Diagonal) {
  MatrixXd a = MatrixXd::Zero(2, 2);
  a.diagonal() << 0.3, -0.9;
  EXPECT_NEAR(SpectralRadius(a), 0.9, 1e-14);
}

TEST(SpectralRadius, CompanionOfComplexPair) {
  // z² − z + 0.5 has roots 0.5 ± 0.5i.
  MatrixXd a(2, 2);
  a << 0.0, 1.0, -0.5, 1.0;
  EXPECT_NEAR(SpectralRadius(a), std::sqrt(0.5), 1e-12);
}

TEST(SpectralRadius, MatchesPolynomialRootsOfCompanion) {
  // (z − 0.95)(z + 0.5)(z² + 0.81): largest magnitude 0.95.
  MatrixXd a = MatrixXd::Zero(4, 4);
  // Coefficients of z⁴ + c3 z³ + c2 z² + c1 z + c0.
  const double c3 = -0.45, c2 = -0.475 + 0.81, c1 = 0.81 * -0.45, c0 = 0.81 * -0.475;
  a.topRightCorner(3, 3).setIdentity();
  a.row(3) << -c0, -c1, -c2, -c3;
  EXPECT_NEAR(SpectralRadius(a), 0.95, 1e-10);
}

TEST(SpectralRadius, RejectsNonSquare) {
  EXPECT_THROW(SpectralRadius(MatrixXd::Zero(2, 3)), ValidationError);
}

TEST(PowerIterationBound, BoundsTheRadius) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd a = oracle::Random(5, 5, rng);
    EXPECT_GE(PowerIterationBound(a) * (1.0 + 1e-9), SpectralRadius(a));
  }
}

TEST(DiscreteLyapunovSum, SatisfiesStein) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd a = oracle::RandomStable(4, rng, 0.9);
    const MatrixXd g = oracle::RandomSpd(4, rng);
    const MatrixXd p = DiscreteLyapunovSum(a, g);
    const MatrixXd residual = p - g - a.transpose() * p * a;
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-9 * (1.0 + p.cwiseAbs().maxCoeff()));
  }
}

TEST(DiscreteLyapunovSum, ScalarClosedForm) {
  MatrixXd a(1, 1), g(1, 1);
  a << 0.8;
  g << 2.0;
  EXPECT_NEAR(DiscreteLyapunovSum(a, g)(0, 0), 2.0 / (1.0 - 0.64), 1e-9);
}

TEST(SolveSpd, SolvesAndRejectsIndefinite) {
  MatrixXd mu(2, 2), b(2, 1);
  mu << 4.0, 1.0, 1.0, 3.0;
  b << 1.0, 2.0;
  const MatrixXd x = SolveSpd(mu, b);
  EXPECT_LT((mu * x - b).cwiseAbs().maxCoeff(), 1e-14);
  MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(SolveSpd(bad, b), NumericError);
}

TEST(NumericalRank, AgreesWithRowReduction) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 1 + trial % 4;
    const MatrixXd m = oracle::Random(6, r, rng) * oracle::Random(r, 5, rng);
    EXPECT_EQ(NumericalRank(m), r);
    EXPECT_EQ(NumericalRank(m), oracle::RowReductionRank(m));
  }
}

TEST(IsSymmetricPositiveDefinite, Classifies) {
  EXPECT_TRUE(IsSymmetricPositiveDefinite(MatrixXd::Identity(3, 3)));
  MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  EXPECT_FALSE(IsSymmetricPositiveDefinite(asym));
  EXPECT_FALSE(IsSymmetricPositiveDefinite(MatrixXd::Zero(2, 2)));
}

}  // namespace
}  // namespace lfc

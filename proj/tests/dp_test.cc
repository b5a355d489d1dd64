#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lfc/dp.h"
#include "test_oracles.h"

namespace lfc {
namespace {

TransformedCost ScalarCost(double q, double r, double s) {
  TransformedCost c;
  c.q_w = MatrixXd::Constant(1, 1, q);
  c.r_cross = MatrixXd::Constant(1, 1, r);
  c.s_u = MatrixXd::Constant(1, 1, s);
  return c;
}

TEST(SolveDp, NoStateCostGivesZeroGain) {
  std::mt19937_64 rng(1);
  TransformedCost c;
  c.q_w = MatrixXd::Zero(3, 3);
  c.r_cross = MatrixXd::Zero(1, 3);
  c.s_u = MatrixXd::Identity(1, 1) * 2.0;
  DpTrace trace;
  const GainMatrix g = SolveDp(c, oracle::Random(3, 3, rng), oracle::Random(3, 1, rng), {},
                               &trace);
  EXPECT_EQ(MaxAbs(g.f), 0.0);
  EXPECT_EQ(trace.iterations, 1);
}

TEST(SolveDp, ScalarHistoryMatchesValueIteration) {
  const double theta = 0.9, omega = 0.5;
  const GainMatrix g = SolveDp(ScalarCost(1.0, 0.0, 1.0), MatrixXd::Constant(1, 1, theta),
                               MatrixXd::Constant(1, 1, omega));
  const double ref = oracle::ScalarValueIterationGain(theta, omega, 1.0, 0.0, 1.0);
  EXPECT_NEAR(g.f(0, 0), ref, 1e-6);
  EXPECT_LT(std::abs(theta + omega * g.f(0, 0)), 1.0);
}

TEST(SolveDp, ScalarProblemsWithCrossTerms) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> th(-1.3, 1.3), om(0.2, 1.5), qd(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = th(rng), omega = om(rng), s = qd(rng);
    const double q = qd(rng) + 1.0;
    std::uniform_real_distribution<double> rd(-std::sqrt(q * s), std::sqrt(q * s));
    const double r = rd(rng);  // keeps the stage weight positive definite
    const GainMatrix g = SolveDp(ScalarCost(q, r, s), MatrixXd::Constant(1, 1, theta),
                                 MatrixXd::Constant(1, 1, omega));
    EXPECT_NEAR(g.f(0, 0), oracle::ScalarValueIterationGain(theta, omega, q, r, s), 1e-6)
        << "trial " << trial;
  }
}

TEST(SolveDp, FullInformationMatchesRiccatiLqr) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const int m = 1 + trial % 2;
    DesignPlant plant;
    plant.phi = oracle::Random(n, n, rng);
    plant.delta = oracle::Random(n, m, rng);
    plant.c = MatrixXd::Identity(n, n);
    const MatrixXd qs = oracle::RandomSpd(n, rng), hs = oracle::RandomSpd(m, rng);
    const PredictionForm pred = BuildPrediction(plant, 1);
    const TransformedCost cost = TransformCost(pred, qs, hs);
    const GainMatrix g = SolveDp(pred, cost, {1e-12, 200000});
    const MatrixXd k = oracle::NextStateLqrGain(plant.phi, plant.delta, qs, hs);
    EXPECT_LT(MaxAbs(g.f + k), 1e-6) << "trial " << trial;
  }
}

TEST(SolveDp, TraceIsRecorded) {
  DpTrace trace;
  const GainMatrix g = SolveDp(ScalarCost(1.0, 0.0, 1.0), MatrixXd::Constant(1, 1, 0.9),
                               MatrixXd::Constant(1, 1, 0.5), {}, &trace);
  EXPECT_GT(trace.iterations, 1);
  EXPECT_LT(trace.final_change, 1e-8);
  EXPECT_EQ(static_cast<int>(trace.sigma_trace.size()), trace.iterations + 1);
  EXPECT_GE(trace.min_sigma_eigenvalue, 0.0);
  EXPECT_LT(trace.stationarity_residual, 1e-6);
  EXPECT_EQ(g.provenance, Provenance::kDp);
  EXPECT_NEAR(g.spectral_radius, std::abs(0.9 + 0.5 * g.f(0, 0)), 1e-14);
}

TEST(SolveDp, NonConvergenceCarriesLastIterate) {
  try {
    SolveDp(ScalarCost(1.0, 0.0, 1.0), MatrixXd::Constant(1, 1, 0.9),
            MatrixXd::Constant(1, 1, 0.5), {1e-30, 3});
    FAIL() << "expected non-convergence";
  } catch (const DpNotConvergedError& e) {
    EXPECT_EQ(e.last_gain().rows(), 1);
    EXPECT_TRUE(std::isfinite(e.residual()));
  }
}

TEST(SolveDp, RejectsBadConfigAndShapes) {
  const TransformedCost c = ScalarCost(1.0, 0.0, 1.0);
  const MatrixXd one = MatrixXd::Constant(1, 1, 0.5);
  EXPECT_THROW(SolveDp(c, one, one, {0.0, 10}), ValidationError);
  EXPECT_THROW(SolveDp(c, one, one, {1e-8, 0}), ValidationError);
  EXPECT_THROW(SolveDp(c, MatrixXd::Identity(2, 2), one), ValidationError);
}

}  // namespace
}  // namespace lfc

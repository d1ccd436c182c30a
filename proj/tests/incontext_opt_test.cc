// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
#include "icl/incontext_opt.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "icl/errors.h"

namespace icl {
namespace {

ContextDataset FromSigned(const Mat& z) {
  ContextDataset ds;
  ds.features = z;
  ds.labels.assign(z.rows(), 1);
  return ds;
}

// Direct evaluation with plain exponentials; fine for moderate margins.
double NaiveLoss(const Vec& theta, const ContextDataset& ds) {
  const Mat z = ds.Signed();
  double s = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) s += std::exp(-Dot(theta, z.row(i)));
  return s / ds.n();
}

Vec NaiveGrad(const Vec& theta, const ContextDataset& ds) {
  const Mat z = ds.Signed();
  Vec g(ds.d(), 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    Axpy(-std::exp(-Dot(theta, z.row(i))) / ds.n(), z.row(i), g);
  }
  return g;
}

TEST(IclLoss, ZeroThetaIsOne) {
  const ContextDataset ds = SampleDataset(1, 17, 4, DistSpec::Gaussian(1.0));
  EXPECT_DOUBLE_EQ(IclLoss(Vec(4, 0.0), ds), 1.0);
  const LossEval e = IclEval(Vec(4, 0.0), ds);
  for (double w : e.weights) EXPECT_NEAR(w, 1.0 / 17.0, 1e-16);
}

TEST(IclLoss, HandEvaluated) {
  const ContextDataset ds = FromSigned(Mat{{1, 0}, {0, 2}});
  const Vec theta{1.0, 0.5};
  const double expect = 0.5 * (std::exp(-1.0) + std::exp(-1.0));
  EXPECT_NEAR(IclLoss(theta, ds), expect, 1e-16);
  const LossEval e = IclEval(theta, ds);
  EXPECT_NEAR(e.grad[0], -0.5 * std::exp(-1.0), 1e-16);
  EXPECT_NEAR(e.grad[1], -std::exp(-1.0), 1e-16);
  EXPECT_NEAR(e.weights[0], 0.5, 1e-16);
}

TEST(IclLoss, DecreasesAlongTheTruthProperty) {
  // Every z_i has positive margin under theta_star, so scaling it up lowers the loss.
  const ContextDataset ds = SampleDataset(2, 40, 5, DistSpec::Gaussian(1.0));
  double prev = IclLoss(Vec(5, 0.0), ds);
  for (double c : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double cur = IclLoss(Scaled(*ds.theta_star, c), ds);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(IclEval, MatchesNaiveAndFiniteDifferences) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const ContextDataset ds = SampleDataset(rng, 10 + t, 1 + t % 6, DistSpec::Gaussian(1.0));
    Vec theta(ds.d());
    for (double& v : theta) v = rng.Normal();
    const LossEval e = IclEval(theta, ds);
    EXPECT_NEAR(e.value / NaiveLoss(theta, ds), 1.0, 1e-13);
    const Vec naive = NaiveGrad(theta, ds);
    const Vec fd = FiniteDiffGrad([&](const Vec& x) { return IclLoss(x, ds); }, theta);
    for (std::size_t i = 0; i < ds.d(); ++i) {
      EXPECT_NEAR(e.grad[i], naive[i], 1e-12 * (1 + std::abs(naive[i])));
      EXPECT_NEAR(e.grad[i], fd[i], 1e-6 * (1 + std::abs(fd[i])));
    }
  }
}

TEST(IclEval, GradOverLossIsMinusWeightedMean) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const ContextDataset ds = SampleDataset(rng, 30, 6, DistSpec::Gaussian(1.0));
    Vec theta(6);
    for (double& v : theta) v = 3.0 * rng.Normal();
    const LossEval e = IclEval(theta, ds);
    const Mat z = ds.Signed();
    Vec mean(6, 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      Axpy(e.weights[i], z.row(i), mean);
      wsum += e.weights[i];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(e.grad[i] / e.value, -mean[i], 1e-10);
  }
}

TEST(IclEval, LargeMarginsStayFinite) {
  const ContextDataset ds = FromSigned(Mat{{1000, 0}, {0, 1000}});
  const LossEval e = IclEval(Vec{1.0, 1.0}, ds);
  EXPECT_TRUE(AllFinite(e.weights));
  EXPECT_NEAR(e.weights[0], 0.5, 1e-15);
  const LossEval f = IclEval(Vec{-1.0, -1.0}, ds);
  EXPECT_TRUE(AllFinite(f.weights));
}

// The NGD attention column of the query equals the loss weights.
TEST(IclEval, WeightsMatchAttentionOfNgdLayer) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const ContextDataset ds = SampleDataset(rng, 25, 4, DistSpec::Gaussian(1.0));
    Vec theta(4);
    for (double& v : theta) v = rng.Normal();
    const Mat z = BuildEmbedding(ds, theta).z;
    Mat a1(4, 4), a2(4, 4);
    for (std::size_t i = 0; i < 16; ++i) {
      a1.data()[i] = 0.5 * rng.Normal();
      a2.data()[i] = 0.5 * rng.Normal();
    }
    const Vec att = AttentionColumn(z, BuildNgdParams(0.5, 1.0, a1, a2), 25);
    const Vec w = IclEval(theta, ds).weights;
    for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(att[i], w[i], 1e-12);
  }
}

TEST(NgdRun, MatchesDirectRecursion) {
  const ContextDataset ds = SampleDataset(6, 20, 3, DistSpec::Gaussian(1.0));
  const Vec theta0 = SampleThetaStar(7, 3);
  for (double beta : {0.5, 1.0, 2.0}) {
    const Vec rates{0.5, 0.25, 1.0, 0.5, 0.5};
    const IterateTrace t = NgdRun(theta0, ds, rates, beta);
    ASSERT_EQ(t.layers(), 5u);
    EXPECT_EQ(t.thetas[0], theta0);
    const ContextDataset scaled = ds.Rescaled(beta);
    Vec theta = theta0;
    for (std::size_t l = 0; l < rates.size(); ++l) {
      const Vec g = NaiveGrad(theta, scaled);
      Axpy(-(rates[l] / beta) / NaiveLoss(theta, scaled), g, theta);
      for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t.thetas[l + 1][i], theta[i], 1e-12);
    }
  }
}

TEST(NgdRun, ZeroStepsAndBadArguments) {
  const ContextDataset ds = SampleDataset(8, 5, 2, DistSpec::Gaussian(1.0));
  const IterateTrace t = NgdRun(Vec{0.3, 0.1}, ds, Vec{});
  ASSERT_EQ(t.thetas.size(), 1u);
  EXPECT_THROW(NgdRun(Vec{0.3}, ds, Vec{1.0}), ArgumentError);
  EXPECT_THROW(NgdRun(Vec{0.3, 0.1}, ds, Vec{1.0}, 0.0), ArgumentError);
}

TEST(NgdRun, FirstStepFromZeroIsMeanSignedFeature) {
  const ContextDataset ds = SampleDataset(9, 12, 3, DistSpec::Gaussian(1.0));
  const IterateTrace t = NgdRun(Vec(3, 0.0), ds, Vec{0.7});
  const Mat z = ds.Signed();
  Vec mean(3, 0.0);
  for (std::size_t i = 0; i < 12; ++i) Axpy(0.7 / 12.0, z.row(i), mean);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t.thetas[1][i], mean[i], 1e-15);
}

TEST(NgdRun, NormalizedMarginEventuallyIncreases) {
  const ContextDataset ds = SampleDataset(10, 30, 4, DistSpec::Gaussian(1.0));
  const IterateTrace t = NgdRun(Vec(4, 0.0), ds, Vec(400, 0.5));
  const Mat z = ds.Signed();
  double prev = -1.0;
  for (std::size_t l = 200; l <= 400; l += 50) {
    const double m = MinMargin(Normalized(t.thetas[l]), z);
    EXPECT_GT(m, prev);
    prev = m;
  }
  EXPECT_GT(prev, 0.0);
}

TEST(GdRun, OneStepIsTeacherFormula) {
  const ContextDataset ds = SampleDataset(11, 15, 3, DistSpec::Gaussian(1.0));
  const Vec theta0{0.2, -0.4, 0.1};
  const IterateTrace t = GdRun(theta0, ds, 0.3, 1);
  const Vec g = NaiveGrad(theta0, ds);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t.thetas[1][i], theta0[i] - 0.3 * g[i], 1e-15);
}

TEST(GdRun, ZeroRateIsConstant) {
  const ContextDataset ds = SampleDataset(12, 15, 3, DistSpec::Gaussian(1.0));
  const Vec theta0{0.2, -0.4, 0.1};
  const IterateTrace t = GdRun(theta0, ds, 0.0, 10);
  for (const Vec& th : t.thetas) EXPECT_EQ(th, theta0);
}

TEST(GdRun, OverflowIsNumericError) {
  const ContextDataset ds = FromSigned(Mat{{1, 0}, {0, 1}});
  EXPECT_THROW(GdRun(Vec{-800.0, -800.0}, ds, 1.0, 3), NumericError);
}

TEST(GdRun, SlowerThanNgdTowardsMaxMargin) {
  const ContextDataset ds = SampleDataset(13, 30, 4, DistSpec::Gaussian(1.0));
  const Vec svm = SvmSolve(ds).theta;
  const IterateTrace ngd = NgdRun(Vec(4, 0.0), ds, Vec(300, 0.5));
  const IterateTrace gd = GdRun(Vec(4, 0.0), ds, 0.5, 300);
  // Identical first step: the loss is 1 at the origin.
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ngd.thetas[1][i], gd.thetas[1][i], 1e-15);
  EXPECT_LT(DirectionError(ngd.final_theta(), svm), DirectionError(gd.final_theta(), svm));
}

TEST(SvmSolve, HandExamples) {
  const SvmSolution a = SvmSolveSigned(Mat{{1, 0}, {0, 1}});
  EXPECT_NEAR(a.theta[0], std::numbers::sqrt2 / 2, 1e-8);
  EXPECT_NEAR(a.theta[1], std::numbers::sqrt2 / 2, 1e-8);
  EXPECT_NEAR(a.margin, std::numbers::sqrt2 / 2, 1e-8);

  const SvmSolution b = SvmSolveSigned(Mat{{3, 4}});
  EXPECT_NEAR(b.theta[0], 0.6, 1e-10);
  EXPECT_NEAR(b.theta[1], 0.8, 1e-10);
  EXPECT_NEAR(b.margin, 5.0, 1e-9);

  // The point (2, 2) is dominated by the support set {(1, 0), (0, 1)}.
  const SvmSolution c = SvmSolveSigned(Mat{{1, 0}, {0, 1}, {2, 2}});
  EXPECT_NEAR(c.theta[0], std::numbers::sqrt2 / 2, 1e-8);
  EXPECT_NEAR(c.duals[2], 0.0, 1e-9);
}

TEST(SvmSolve, InseparableThrows) {
  EXPECT_THROW(SvmSolveSigned(Mat{{1, 0}, {-1, 0}}), InfeasibleError);
  EXPECT_THROW(SvmSolveSigned(Mat{{1, 1}, {-2, -2}, {0, 1}}), InfeasibleError);
}

TEST(SvmSolve, AgreesWithBruteForceIn2d) {
  Rng rng(14);
  for (int t = 0; t < 60; ++t) {
    const ContextDataset ds = SampleDataset(rng, 1 + t % 12, 2, DistSpec::Gaussian(1.0));
    const SvmSolution s = SvmSolve(ds);
    const Vec bf = SvmBruteforce2d(ds);
    EXPECT_LT(DirectionError(s.theta, bf), 1e-4) << "trial " << t;
    EXPECT_LE(s.kkt_residual, 1e-8);
  }
}

TEST(SvmSolve, KktAndMarginProperty) {
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const ContextDataset ds = SampleDataset(rng, 20 + t, 2 + t % 5, DistSpec::Gaussian(1.0));
    const SvmSolution s = SvmSolve(ds);
    EXPECT_NEAR(Norm2(s.theta), 1.0, 1e-12);
    const Mat z = ds.Signed();
    EXPECT_NEAR(s.margin, MinMargin(s.theta, z), 1e-12);
    for (double a : s.duals) EXPECT_GE(a, 0.0);
    // The max-margin direction beats the truth's margin.
    EXPECT_GE(s.margin, MinMargin(*ds.theta_star, z) - 1e-9);
    EXPECT_LE(s.kkt_residual, 1e-8);
  }
}

TEST(SvmSolve, RescaleInvariant) {
  const ContextDataset ds = SampleDataset(16, 25, 3, DistSpec::Gaussian(1.0));
  const SvmSolution a = SvmSolve(ds);
  for (double c : {0.01, 3.0, 50.0}) {
    const SvmSolution b = SvmSolve(ds.Rescaled(c));
    EXPECT_LT(DirectionError(b.theta, a.theta), 1e-6);
    EXPECT_NEAR(b.margin, c * a.margin, 1e-6 * c);
  }
}

TEST(SvmBruteforce2d, RequiresTwoDimensions) {
  const ContextDataset ds = SampleDataset(17, 5, 3, DistSpec::Gaussian(1.0));
  EXPECT_THROW(SvmBruteforce2d(ds), ArgumentError);
}

TEST(DirectionError, Examples) {
  EXPECT_DOUBLE_EQ(DirectionError(Vec{2, 0}, Vec{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(DirectionError(Vec{-5, 0}, Vec{1, 0}), 2.0);
  EXPECT_NEAR(DirectionError(Vec{0, 3}, Vec{1, 0}), std::numbers::sqrt2, 1e-15);
  EXPECT_THROW(DirectionError(Vec{1, 0}, Vec{2, 0}), PreconditionError);
  EXPECT_THROW(DirectionError(Vec{0, 0}, Vec{1, 0}), ArgumentError);
}

TEST(MinMargin, Example) {
  EXPECT_DOUBLE_EQ(MinMargin(Vec{1, 0}, Mat{{2, 5}, {-1, 3}}), -1.0);
}

}  // namespace
}  // namespace icl

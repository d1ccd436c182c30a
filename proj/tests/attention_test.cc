// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
#include "icl/attention.h"

#include <cmath>

#include <gtest/gtest.h>

#include "icl/data.h"
#include "icl/errors.h"
#include "icl/incontext_opt.h"

namespace icl {
namespace {

Mat RandomMat(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Mat m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Normal();
  return m;
}

struct Instance {
  ContextDataset ds;
  Vec theta0;
  Mat z0;
};

Instance MakeInstance(std::uint64_t seed, std::size_t n, std::size_t d) {
  Rng rng(seed);
  Instance in{SampleDataset(rng, n, d, DistSpec::Gaussian(1.0)), SampleThetaStar(rng, d), {}};
  in.z0 = BuildEmbedding(in.ds, in.theta0).z;
  return in;
}

Vec MeanSigned(const ContextDataset& ds) {
  const Mat z = ds.Signed();
  Vec m(ds.d(), 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) Axpy(1.0 / ds.n(), z.row(i), m);
  return m;
}

TEST(SaForward, ZeroValueGivesZeroOutput) {
  Rng rng(1);
  const Instance in = MakeInstance(1, 9, 3);
  const AttentionParams p(Mat(6, 6), RandomMat(rng, 6, 6));
  EXPECT_EQ(SaForward(in.z0, p), Mat(6, 10));
}

TEST(SaForward, ZeroKeyQueryAttendsUniformly) {
  Rng rng(2);
  const Instance in = MakeInstance(2, 9, 3);
  Mat z = in.z0;
  // Make every column distinct so uniform averaging is visible everywhere.
  for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] += rng.Normal();
  const AttentionParams p(Mat::Identity(6), Mat(6, 6));
  const Mat out = SaForward(z, p);
  for (std::size_t k = 0; k < 10; ++k) {
    for (std::size_t r = 0; r < 6; ++r) {
      double mean = 0.0;
      for (std::size_t j = 0; j < 9; ++j) mean += z(r, j) / 9.0;
      EXPECT_NEAR(out(r, k), mean, 1e-14);
    }
    const Vec a = AttentionColumn(z, p, k);
    for (double w : a) EXPECT_NEAR(w, 1.0 / 9.0, 1e-15);
  }
}

TEST(SaForward, LastKeyIsExactlyExcluded) {
  Rng rng(3);
  Mat z = RandomMat(rng, 4, 6);
  // An enormous last column would dominate any unmasked softmax.
  for (std::size_t r = 0; r < 4; ++r) z(r, 5) = 1e6;
  const AttentionParams p(Mat::Identity(4), RandomMat(rng, 4, 4, 1e-7));
  const Mat out = SaForward(z, p);
  for (std::size_t k = 0; k < 6; ++k) {
    const Vec a = AttentionColumn(z, p, k);
    ASSERT_EQ(a.size(), 5u);
    double sum = 0.0;
    for (double w : a) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (std::size_t r = 0; r < 4; ++r) {
      double expect = 0.0;
      for (std::size_t j = 0; j < 5; ++j) expect += a[j] * z(r, j);
      EXPECT_NEAR(out(r, k), expect, 1e-9);
      EXPECT_LT(std::abs(out(r, k)), 100.0);
    }
  }
}

TEST(SaForward, NgdParamsFromZeroAddMean) {
  Instance in = MakeInstance(4, 12, 4);
  in.z0 = BuildEmbedding(in.ds, Vec(4, 0.0)).z;
  const Mat out = SaForward(in.z0, BuildNgdParams(1.0, 1.0, 4));
  const Vec mean = MeanSigned(in.ds);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(out(r, 12), 0.0);
    EXPECT_NEAR(out(4 + r, 12), mean[r], 1e-15);
  }
}

TEST(SaForward, ShapeMismatchThrows) {
  const AttentionParams p = AttentionParams::Zero(3);
  EXPECT_THROW(SaForward(Mat(4, 5), p), ArgumentError);
  EXPECT_THROW(AttentionParams(Mat(4, 4), Mat(6, 6)), ArgumentError);
}

TEST(TfForward, EmptyStackIsIdentity) {
  const Instance in = MakeInstance(5, 8, 3);
  const ForwardResult r = TfForward(in.z0, LayerStack::Explicit({}));
  EXPECT_EQ(r.z, in.z0);
  ASSERT_EQ(r.trace.thetas.size(), 1u);
  EXPECT_EQ(r.trace.thetas[0], in.theta0);
}

TEST(TfForward, ZeroValueLayerPassesThrough) {
  Rng rng(6);
  const Instance in = MakeInstance(6, 8, 3);
  const AttentionParams p(Mat(6, 6), RandomMat(rng, 6, 6));
  const ForwardResult r = TfForward(in.z0, LayerStack::Explicit({p}));
  EXPECT_EQ(r.trace.thetas[1], in.theta0);
}

TEST(BuildNgdParams, BlockLayout) {
  const AttentionParams p = BuildNgdParams(1.0, 1.0, 3);
  EXPECT_EQ(p.VBlock(2, 1), Mat::Identity(3));
  EXPECT_EQ(p.WBlock(1, 2), Mat::Identity(3, -1.0));
  for (auto [r, c] : {std::pair{1, 1}, {1, 2}, {2, 2}}) EXPECT_EQ(p.VBlock(r, c), Mat(3, 3));
  for (auto [r, c] : {std::pair{1, 1}, {2, 1}, {2, 2}}) EXPECT_EQ(p.WBlock(r, c), Mat(3, 3));

  Rng rng(7);
  const Mat a1 = RandomMat(rng, 3, 3), a2 = RandomMat(rng, 3, 3);
  const AttentionParams q = BuildNgdParams(0.5, 2.0, a1, a2);
  EXPECT_EQ(q.VBlock(2, 1), Mat::Identity(3, 0.5));
  EXPECT_EQ(q.WBlock(1, 2), Mat::Identity(3, -2.0));
  EXPECT_EQ(q.WBlock(2, 1), a1);
  EXPECT_EQ(q.WBlock(2, 2), a2);
  EXPECT_THROW(BuildNgdParams(0.0, 1.0, 3), ArgumentError);
  EXPECT_THROW(BuildNgdParams(1.0, -1.0, 3), ArgumentError);
}

TEST(TfForward, KeyQueryBlocksA1A2DoNotChangeTrace) {
  const Instance in = MakeInstance(8, 40, 6);
  const std::size_t depth = 10;
  const ForwardResult base = LoopedForward(in.z0, BuildNgdParams(0.5, 1.0, 6), depth);
  Rng rng(9);
  for (int draw = 0; draw < 5; ++draw) {
    const double s = 1.0 / std::sqrt(6.0);
    const AttentionParams p =
        BuildNgdParams(0.5, 1.0, RandomMat(rng, 6, 6, s), RandomMat(rng, 6, 6, s));
    const ForwardResult r = LoopedForward(in.z0, p, depth);
    for (std::size_t l = 0; l <= depth; ++l) {
      for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_NEAR(r.trace.thetas[l][i], base.trace.thetas[l][i], 1e-12);
      }
    }
  }
}

TEST(TfForward, HiddenStateKeepsStructuredForm) {
  Rng rng(10);
  const Instance in = MakeInstance(10, 30, 5);
  const double s = 1.0 / std::sqrt(5.0);
  const AttentionParams p =
      BuildNgdParams(0.7, 1.3, RandomMat(rng, 5, 5, s), RandomMat(rng, 5, 5, s));
  Mat z = in.z0;
  for (int l = 0; l < 12; ++l) {
    z += SaForward(z, p);
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t r = 0; r < 5; ++r) {
        EXPECT_NEAR(z(r, i), in.z0(r, i), 1e-12);          // top block constant
        EXPECT_NEAR(z(5 + r, i), z(5 + r, 0), 1e-12);      // bottom columns equal
      }
    }
    for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(z(r, 30), 0.0);
  }
}

TEST(TfForward, ContextColumnsCarryNgdFromZero) {
  const Instance in = MakeInstance(11, 25, 4);
  const ForwardResult r = LoopedForward(in.z0, BuildNgdParams(0.5, 1.0, 4), 8);
  const IterateTrace zero_run = NgdRun(Vec(4, 0.0), in.ds, Vec(8, 0.5));
  for (std::size_t l = 0; l <= 8; ++l) {
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(r.context_thetas[l][i], zero_run.thetas[l][i], 1e-12);
    }
  }
}

TEST(LoopedForward, BitIdenticalToExplicitStack) {
  Rng rng(12);
  const Instance in = MakeInstance(12, 20, 3);
  const AttentionParams p(RandomMat(rng, 6, 6, 0.3), RandomMat(rng, 6, 6, 0.3));
  const ForwardResult a = LoopedForward(in.z0, p, 6);
  const ForwardResult b = TfForward(in.z0, LayerStack::Explicit(std::vector<AttentionParams>(6, p)));
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.trace.thetas, b.trace.thetas);
  EXPECT_THROW(LoopedForward(in.z0, p, 0), ArgumentError);
}

TEST(LoopedForward, SingleLayerIsResidualPlusAttention) {
  Rng rng(13);
  const Instance in = MakeInstance(13, 10, 2);
  const AttentionParams p(RandomMat(rng, 4, 4), RandomMat(rng, 4, 4));
  EXPECT_EQ(LoopedForward(in.z0, p, 1).z, in.z0 + SaForward(in.z0, p));
}

TEST(ExtractTheta, Examples) {
  const Instance in = MakeInstance(14, 6, 3);
  EXPECT_EQ(ExtractTheta(in.z0, 3, 6), in.theta0);
  EXPECT_EQ(ExtractTheta(Mat(6, 7), 3, 6), Vec(3, 0.0));
  EXPECT_THROW(ExtractTheta(Mat(6, 7), 3, 7), ArgumentError);

  const Instance zero = [] {
    Instance i = MakeInstance(15, 6, 3);
    i.z0 = BuildEmbedding(i.ds, Vec(3, 0.0)).z;
    return i;
  }();
  const ForwardResult r = LoopedForward(zero.z0, BuildNgdParams(0.4, 1.0, 3), 1);
  const Vec mean = MeanSigned(zero.ds);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.trace.thetas[1][i], 0.4 * mean[i], 1e-15);
}

TEST(ExtractCoeffs, ExactPatternAndZero) {
  AttentionParams p = AttentionParams::Zero(4);
  p.SetVBlock(2, 1, Mat::Identity(4, 1.5));
  p.SetWBlock(1, 2, Mat::Identity(4, -0.8));
  const Coefficients c = ExtractCoeffs(p);
  EXPECT_DOUBLE_EQ(c.c1, 1.5);
  EXPECT_DOUBLE_EQ(c.c2, 0.8);
  EXPECT_EQ(c.residuals.zero_blocks(), 0.0);
  EXPECT_EQ(c.residuals.v21_offdiag, 0.0);
  EXPECT_EQ(c.residuals.w12_offdiag, 0.0);
  EXPECT_EQ(c.residuals.v21_diag_var, 0.0);

  const Coefficients z = ExtractCoeffs(AttentionParams::Zero(4));
  EXPECT_EQ(z.c1, 0.0);
  EXPECT_EQ(z.c2, 0.0);
  EXPECT_EQ(z.residuals.zero_blocks(), 0.0);
}

TEST(ExtractCoeffs, ResidualsMeasureOffPattern) {
  AttentionParams p = AttentionParams::Zero(2);
  p.SetVBlock(1, 2, Mat{{3, 0}, {0, 4}});
  p.SetVBlock(2, 1, Mat{{1, 2}, {0, 1}});
  const Coefficients c = ExtractCoeffs(p);
  EXPECT_DOUBLE_EQ(c.residuals.v12, 5.0);
  EXPECT_DOUBLE_EQ(c.residuals.v21_offdiag, 2.0);
  EXPECT_DOUBLE_EQ(c.residuals.zero_blocks(), 5.0);
}

TEST(AttentionParams, BlockViewsAreSlices) {
  Rng rng(16);
  const AttentionParams p(RandomMat(rng, 6, 6), RandomMat(rng, 6, 6));
  EXPECT_EQ(p.VBlock(2, 1), p.v.block(3, 0, 3, 3));
  EXPECT_EQ(p.WBlock(1, 2), p.w.block(0, 3, 3, 3));
  EXPECT_THROW(p.VBlock(3, 1), ArgumentError);
}

}  // namespace
}  // namespace icl

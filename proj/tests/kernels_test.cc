// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
#include "icl/kernels.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "icl/data.h"
#include "icl/errors.h"
#include "icl/incontext_opt.h"
#include "icl/rng.h"

namespace icl::kernels {
namespace {

std::vector<Isa> SimdIsas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (IsaAvailable(isa)) out.push_back(isa);
  }
  return out;
}

std::vector<double> Random(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Normal();
  return v;
}

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(IsaAvailable(Isa::kScalar));
  EXPECT_EQ(Table(Isa::kScalar).isa, Isa::kScalar);
}

TEST(Kernels, UnavailableIsaThrows) {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!IsaAvailable(isa)) {
      EXPECT_THROW(Table(isa), ArgumentError);
    }
  }
}

TEST(Kernels, SimdMatchesScalarReference) {
  const auto isas = SimdIsas();
  if (isas.empty()) GTEST_SKIP() << "no SIMD variant on this CPU";
  Rng rng(21);
  const KernelTable& ref = Table(Isa::kScalar);
  for (Isa isa : isas) {
    const KernelTable& simd = Table(isa);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = Random(rng, n);
      const auto b = Random(rng, n);
      double abs_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(a[i] * b[i]);
      EXPECT_NEAR(simd.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n),
                  1e-15 * (1.0 + abs_sum))
          << IsaName(isa) << " n=" << n;

      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      simd.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1 + std::abs(y1[i])));

      auto s1 = a, s2 = a;
      ref.scale(-1.75, s1.data(), n);
      simd.scale(-1.75, s2.data(), n);
      EXPECT_EQ(s1, s2);

      if (n > 0) {
        EXPECT_EQ(ref.max(a.data(), n), simd.max(a.data(), n));
      }
    }
  }
}

TEST(Kernels, ScopedIsaRestores) {
  const Isa before = Active().isa;
  {
    ScopedIsa scope(Isa::kScalar);
    EXPECT_EQ(Active().isa, Isa::kScalar);
  }
  EXPECT_EQ(Active().isa, before);
}

// A full NGD run agrees across ISAs to rounding.
TEST(Kernels, NgdTraceAgreesAcrossIsas) {
  const auto isas = SimdIsas();
  if (isas.empty()) GTEST_SKIP() << "no SIMD variant on this CPU";
  const ContextDataset ds = SampleDataset(31, 60, 20, DistSpec::Gaussian(1.0));
  const Vec theta0 = SampleThetaStar(32, 20);
  IterateTrace ref;
  {
    ScopedIsa scope(Isa::kScalar);
    ref = NgdRun(theta0, ds, Vec(30, 0.5));
  }
  for (Isa isa : isas) {
    ScopedIsa scope(isa);
    const IterateTrace t = NgdRun(theta0, ds, Vec(30, 0.5));
    for (std::size_t l = 0; l < t.thetas.size(); ++l) {
      for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(t.thetas[l][i], ref.thetas[l][i], 1e-12);
    }
  }
}

}  // namespace
}  // namespace icl::kernels

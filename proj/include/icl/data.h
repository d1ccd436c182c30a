// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

// Context datasets for in-context linear classification: generation from a
// ground-truth direction, the attention input embedding, and CSV ingestion.

#ifndef ICL_DATA_H_
#define ICL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "icl/numerics.h"
#include "icl/rng.h"

namespace icl {

// n labelled points x_i in R^d with y_i in {-1, +1}. When theta_star is set,
// y_i == Sign(<x_i, theta_star>) and ||theta_star|| == 1.
struct ContextDataset {
  Mat features;  // n x d, row i is x_i
  std::vector<int> labels;
  std::optional<Vec> theta_star;

  std::size_t n() const { return features.rows(); }
  std::size_t d() const { return features.cols(); }

  // n x d, row i is z_i = y_i * x_i.
  Mat Signed() const;

  // Copy with every x_i multiplied by c (labels unchanged).
  ContextDataset Rescaled(double c) const;
};

enum class Family { kGaussian, kLaplace, kUniform01 };

std::string_view FamilyName(Family f);
Family ParseFamily(std::string_view name);

// Per-entry distribution of x~, optionally mapped through x = covariance * x~.
// Note that the effective covariance of x is then Sigma Cov(x~) Sigma^T, not
// Sigma itself.
struct DistSpec {
  Family family = Family::kGaussian;
  double scale = 1.0;   // sigma for gaussian, b for laplace; unused for uniform01
  bool center = false;  // uniform01 only: subtract 0.5 so entries have mean 0
  std::optional<Mat> covariance;

  static DistSpec Gaussian(double sigma) { return {Family::kGaussian, sigma, false, {}}; }

  // Throws ArgumentError when scale is not positive or covariance is not a
  // symmetric positive-definite d x d matrix.
  void Validate(std::size_t d) const;
};

// (2d) x (n+1) attention input: columns 1..n carry [z_i; 0], the last column
// carries [0; theta0].
struct EmbeddingMatrix {
  Mat z;
  std::size_t d = 0;
  std::size_t n = 0;
};

// Sign with Sign(0) == +1.
inline int Sign(double v) { return v < 0.0 ? -1 : 1; }

// Uniform on the unit sphere S^{d-1} (normalised isotropic Gaussian).
Vec SampleThetaStar(Rng& rng, std::size_t d);
Vec SampleThetaStar(std::uint64_t seed, std::size_t d);

// A A^T / d + 0.1 I with A_ij ~ N(0, 1).
Mat RandomPdCovariance(Rng& rng, std::size_t d);
Mat RandomPdCovariance(std::uint64_t seed, std::size_t d);

// theta_star is drawn first, then x_1..x_n, then labels by the sign rule.
ContextDataset SampleDataset(Rng& rng, std::size_t n, std::size_t d, const DistSpec& dist);
ContextDataset SampleDataset(std::uint64_t seed, std::size_t n, std::size_t d,
                             const DistSpec& dist);

EmbeddingMatrix BuildEmbedding(const ContextDataset& ds, std::span<const double> theta0);

// The two-layer ReLU map W2 ReLU(W1 [x; y] + b1), b1 = -M 1, that sends the
// concatenated input [x; y] to y * x for ||x||_inf <= M.
struct ConcatEmbedding {
  Mat w1;  // 4d x (d+1)
  Vec b1;  // 4d
  Mat w2;  // d x 4d
};
ConcatEmbedding MakeConcatEmbedding(std::size_t d, double bound);
Vec EmbedConcat(std::span<const double> x, int y, double bound);

// Reads `y,x1,...,xd` rows. Labels must be -1 or 1.
ContextDataset LoadFeaturesCsv(const std::filesystem::path& path);
ContextDataset ParseFeaturesCsv(std::string_view text);

}  // namespace icl

#endif  // ICL_DATA_H_

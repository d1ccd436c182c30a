// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

// Exponential in-context loss L(theta) = (1/n) sum_i exp(-<theta, z_i>), the
// normalized and plain gradient-descent iterations on it, and the
// hard-margin direction they are biased towards.

#ifndef ICL_INCONTEXT_OPT_H_
#define ICL_INCONTEXT_OPT_H_

#include <cstddef>

#include "icl/attention.h"
#include "icl/data.h"
#include "icl/numerics.h"

namespace icl {

struct LossEval {
  double value = 0.0;
  Vec grad;
  // softmax_i(-<theta, z_i>); grad / value == -sum_i weights_i z_i.
  Vec weights;
};

double IclLoss(std::span<const double> theta, const ContextDataset& ds);
LossEval IclEval(std::span<const double> theta, const ContextDataset& ds);

// Same, on precomputed signed features z (n x d).
double IclLossSigned(std::span<const double> theta, const Mat& z);
LossEval IclEvalSigned(std::span<const double> theta, const Mat& z);

// theta_{l+1} = theta_l - (rates_l / beta) grad L~(theta_l) / L~(theta_l) where
// L~ is the loss on {beta x_i, y_i}. The ratio is formed as a softmax-weighted
// mean, never as a quotient of two exponentials.
IterateTrace NgdRun(std::span<const double> theta0, const ContextDataset& ds,
                    std::span<const double> rates, double beta_tilde = 1.0);

// theta_{l+1} = theta_l - alpha grad L(theta_l). Throws NumericError if the
// gradient overflows.
IterateTrace GdRun(std::span<const double> theta0, const ContextDataset& ds, double alpha,
                   std::size_t steps);

struct SvmSolution {
  Vec theta;        // unit direction
  double margin = 0.0;  // min_i <theta, z_i>
  Vec duals;
  double kkt_residual = 0.0;
  std::size_t sweeps = 0;
};

struct SvmOptions {
  double tol = 1e-8;
  std::size_t max_sweeps = 1'000'000;
};

// min ||w||^2 s.t. <w, z_i> >= 1 by cyclic dual coordinate ascent. Throws
// InfeasibleError when the data cannot be separated through the origin.
SvmSolution SvmSolve(const ContextDataset& ds, const SvmOptions& opts = {});
SvmSolution SvmSolveSigned(const Mat& z, const SvmOptions& opts = {});

// Angle scan plus golden-section refinement of min_i <(cos p, sin p), z_i>.
// d must be 2.
Vec SvmBruteforce2d(const ContextDataset& ds, std::size_t grid = 3600,
                    std::size_t refine_passes = 2);

// || theta / ||theta|| - ref ||, in [0, 2].
double DirectionError(std::span<const double> theta, std::span<const double> ref);

// min_i <theta, z_i>
double MinMargin(std::span<const double> theta, const Mat& z);

}  // namespace icl

#endif  // ICL_INCONTEXT_OPT_H_

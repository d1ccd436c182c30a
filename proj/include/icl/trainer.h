// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

// Online training of one attention layer to reproduce a one-step gradient
// descent teacher theta_GD = theta0 - alpha grad L(theta0), with fresh
// Gaussian context datasets and uniform-sphere theta0 every iteration.

#ifndef ICL_TRAINER_H_
#define ICL_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "icl/attention.h"
#include "icl/data.h"
#include "icl/numerics.h"

namespace icl {

struct TrainConfig {
  std::size_t n = 60;
  std::size_t d = 20;
  double alpha = 0.5;    // teacher step size
  double sigma = 1.0;    // feature standard deviation
  double eta = 0.1;      // training step size
  std::size_t batch_k = 400;
  std::size_t iters = 2000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency

  // Throws ArgumentError for non-positive shapes or rates (eta == 0 and
  // iters == 0 are allowed). Returns advisory warnings, e.g. alpha or sigma
  // outside the regime covered by the convergence theory.
  std::vector<std::string> Validate() const;
};

struct BatchItem {
  ContextDataset ds;
  Vec theta0;
};

// Items of iteration `iter`; item k depends only on (seed, iter, k).
std::vector<BatchItem> SampleBatch(const TrainConfig& cfg, std::size_t iter);

// theta0 - alpha grad L(theta0).
Vec TeacherStep(std::span<const double> theta0, const ContextDataset& ds, double alpha);

// Reduced parameterisation: only V21 and W12 are stored, every other block is
// identically zero.
struct TrainState {
  Mat v21;
  Mat w12;

  static TrainState Zero(std::size_t d) { return {Mat(d, d), Mat(d, d)}; }
  AttentionParams ToParams() const;
};

// Mean over the batch of ||theta_1 - theta_GD||^2 where
// theta_1 = theta0 + V21 Z s, s = softmax(Z^T W12 theta0).
double SampleLoss(const TrainState& state, std::span<const BatchItem> batch, double alpha);

struct ReducedGrads {
  Mat v21;
  Mat w12;
  double loss = 0.0;
};

// Exact batch gradient of SampleLoss (closed form, no differentiation
// through generic matrices).
ReducedGrads SampleGrads(const TrainState& state, std::span<const BatchItem> batch,
                         double alpha, std::size_t threads = 0);

// Loss of a full (V, W) pair, evaluated through the generic attention
// forward pass.
double SampleLossFull(const AttentionParams& p, std::span<const BatchItem> batch,
                      double alpha);

struct FullGrads {
  Mat v;
  Mat w;
  double loss = 0.0;
};

// Gradient with respect to every entry of V and W for the one-layer map.
FullGrads SampleGradsFull(const AttentionParams& p, std::span<const BatchItem> batch,
                          double alpha, std::size_t threads = 0);

struct TrainRecord {
  std::size_t iter = 0;
  double loss = 0.0;  // batch loss at the parameters before this update
  double c1 = 0.0;
  double c2 = 0.0;
  double res_v_off = 0.0;
  double res_w_off = 0.0;
  double res_zero_blocks = 0.0;
  double v21_offdiag_ratio = 0.0;
  double w12_offdiag_ratio = 0.0;
  double wall_seconds = 0.0;
};

struct TrainLog {
  std::vector<TrainRecord> records;

  // `iter,loss,c1,c2,res_v_off,res_w_off,res_zero_blocks`, 17 significant
  // digits, one row per iteration.
  std::string ToCsv() const;
};

struct TrainResult {
  TrainState state;
  TrainLog log;
};

TrainResult TrainOnline(const TrainConfig& cfg);

struct FullTrainResult {
  AttentionParams params;
  TrainLog log;
};

TrainResult TrainOnlineFrom(const TrainConfig& cfg, TrainState init);
FullTrainResult TrainFullMatrix(const TrainConfig& cfg);

// (c1, c2) in [0, 2 alpha e^{sigma^2/2}] x [0, 2].
bool CheckInvariantRegion(double c1, double c2, double alpha, double sigma);

// alpha e^{sigma^2 / 2}: the C1 coordinate the trained layer approaches.
double TargetC1(double alpha, double sigma);

struct LinearDecayFit {
  double floor = 0.0;
  double slope = 0.0;  // of log(smoothed loss - floor) per iteration
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t begin = 0;  // fitted iteration range [begin, end)
  std::size_t end = 0;
};

// floor = mean loss over the final 10% of iterations. The loss is smoothed
// with a centred moving average of `window` iterations; the fit runs from the
// start until the smoothed excess first drops below `cutoff` times its
// initial value.
LinearDecayFit FitLinearDecay(const TrainLog& log, std::size_t window = 25,
                              double cutoff = 0.05);

}  // namespace icl

#endif  // ICL_TRAINER_H_

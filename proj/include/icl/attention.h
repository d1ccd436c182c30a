// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

// Single-head masked softmax self-attention over the (2d) x (n+1) embedding,
// its residual L-layer stack, and the block parameterisations under which
// the stack's last-column read-out follows normalized gradient descent.

#ifndef ICL_ATTENTION_H_
#define ICL_ATTENTION_H_

#include <cstddef>
#include <vector>

#include "icl/numerics.h"

namespace icl {

// Value matrix V and merged key-query matrix W, both 2d x 2d. Block (r, c)
// with r, c in {1, 2} is the d x d sub-matrix at rows (r-1)d.., cols (c-1)d..
struct AttentionParams {
  Mat v;
  Mat w;

  AttentionParams() = default;
  AttentionParams(Mat v_in, Mat w_in);
  static AttentionParams Zero(std::size_t d);

  std::size_t d() const { return v.rows() / 2; }

  Mat VBlock(int r, int c) const;
  Mat WBlock(int r, int c) const;
  void SetVBlock(int r, int c, const Mat& b);
  void SetWBlock(int r, int c, const Mat& b);
};

// Ordered layers; a looped stack stores one parameter set applied `depth`
// times.
class LayerStack {
 public:
  static LayerStack Explicit(std::vector<AttentionParams> layers);
  static LayerStack Looped(AttentionParams shared, std::size_t depth);

  std::size_t depth() const { return looped_ ? depth_ : layers_.size(); }
  bool looped() const { return looped_; }
  const AttentionParams& layer(std::size_t l) const {
    return looped_ ? layers_.front() : layers_[l];
  }

 private:
  std::vector<AttentionParams> layers_;
  bool looped_ = false;
  std::size_t depth_ = 0;
};

// theta_0..theta_L read from the last column, with the schedule that
// produced them when known.
struct IterateTrace {
  std::vector<Vec> thetas;
  Vec rates;
  double rescale = 1.0;

  std::size_t layers() const { return thetas.empty() ? 0 : thetas.size() - 1; }
  const Vec& final_theta() const { return thetas.back(); }
};

struct ForwardResult {
  Mat z;
  IterateTrace trace;
  // Bottom block of the first context column after each layer. Under the
  // structured parameterisation every context column carries this same
  // vector: the NGD run started from zero.
  std::vector<Vec> context_thetas;
};

// V Z softmax(Z^T W Z + M). Column k of the attention matrix is the softmax
// of the first n scores of column k; row n+1 (the query key) is exactly 0.
Mat SaForward(const Mat& z, const AttentionParams& p);

// Z_{l+1} = Z_l + SaForward(Z_l, layer_l). Throws ArgumentError on shape
// mismatch.
ForwardResult TfForward(const Mat& z0, const LayerStack& stack);
ForwardResult LoopedForward(const Mat& z0, const AttentionParams& p, std::size_t depth);

// V = [[0, 0], [alpha_tilde I, 0]], W = [[0, -beta_tilde I], [a1, a2]].
AttentionParams BuildNgdParams(double alpha_tilde, double beta_tilde, const Mat& a1,
                               const Mat& a2);
AttentionParams BuildNgdParams(double alpha_tilde, double beta_tilde, std::size_t d);

// Rows d..2d-1 of the last column.
Vec ExtractTheta(const Mat& z, std::size_t d, std::size_t n);

// Attention weights over the n context keys for query column k.
Vec AttentionColumn(const Mat& z, const AttentionParams& p, std::size_t k);

struct PatternResiduals {
  double v11 = 0, v12 = 0, v22 = 0, w11 = 0, w21 = 0, w22 = 0;  // Frobenius
  double v21_offdiag = 0, w12_offdiag = 0;                       // Frobenius
  double v21_diag_var = 0, w12_diag_var = 0;

  // Combined Frobenius norm of the six blocks that should be zero.
  double zero_blocks() const;
};

struct Coefficients {
  double c1 = 0.0;  // mean diagonal of V21
  double c2 = 0.0;  // minus mean diagonal of W12
  PatternResiduals residuals;
};

Coefficients ExtractCoeffs(const AttentionParams& p);

// Residuals of the two trainable blocks alone (the rest taken as zero).
Coefficients ExtractCoeffs(const Mat& v21, const Mat& w12);

}  // namespace icl

#endif  // ICL_ATTENTION_H_

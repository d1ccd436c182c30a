// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/attention.h"

#include <cmath>
#include <string>

#include "icl/errors.h"

namespace icl {

namespace {

void CheckBlockIndex(int r, int c) {
  if (r < 1 || r > 2 || c < 1 || c > 2) throw ArgumentError("block index must be 1 or 2");
}

void CheckShapes(const Mat& z, const AttentionParams& p) {
  if (z.rows() == 0 || z.rows() % 2 != 0 || z.cols() < 2) {
    throw ArgumentError("input must be (2d) x (n+1) with d >= 1, n >= 1");
  }
  if (p.v.rows() != z.rows() || !p.v.square() || p.w.rows() != z.rows() || !p.w.square()) {
    throw ArgumentError("parameters are " + std::to_string(p.v.rows()) + "x" +
                        std::to_string(p.v.cols()) + " but input has " +
                        std::to_string(z.rows()) + " rows");
  }
}

double DiagMean(const Mat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, i);
  return m.rows() ? s / static_cast<double>(m.rows()) : 0.0;
}

double DiagVariance(const Mat& m) {
  const double mean = DiagMean(m);
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += (m(i, i) - mean) * (m(i, i) - mean);
  return m.rows() ? s / static_cast<double>(m.rows()) : 0.0;
}

double OffdiagFrobenius(const Mat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

// Softmax of scores(0..n-1, k) for every column k, written into a (n+1) x
// (n+1) attention matrix whose last row stays zero.
Mat MaskedColumnSoftmax(const Mat& scores) {
  const std::size_t cols = scores.cols();
  const std::size_t n = cols - 1;
  Mat attn(cols, cols);
  Vec column(n);
  for (std::size_t k = 0; k < cols; ++k) {
    for (std::size_t j = 0; j < n; ++j) column[j] = scores(j, k);
    StableSoftmaxInPlace(column);
    for (std::size_t j = 0; j < n; ++j) attn(j, k) = column[j];
  }
  return attn;
}

}  // namespace

AttentionParams::AttentionParams(Mat v_in, Mat w_in) : v(std::move(v_in)), w(std::move(w_in)) {
  if (!v.square() || !w.square() || v.rows() != w.rows() || v.rows() % 2 != 0) {
    throw ArgumentError("V and W must both be 2d x 2d");
  }
}

AttentionParams AttentionParams::Zero(std::size_t d) {
  return AttentionParams(Mat(2 * d, 2 * d), Mat(2 * d, 2 * d));
}

Mat AttentionParams::VBlock(int r, int c) const {
  CheckBlockIndex(r, c);
  return v.block((r - 1) * d(), (c - 1) * d(), d(), d());
}

Mat AttentionParams::WBlock(int r, int c) const {
  CheckBlockIndex(r, c);
  return w.block((r - 1) * d(), (c - 1) * d(), d(), d());
}

void AttentionParams::SetVBlock(int r, int c, const Mat& b) {
  CheckBlockIndex(r, c);
  if (b.rows() != d() || b.cols() != d()) throw ArgumentError("block must be d x d");
  v.set_block((r - 1) * d(), (c - 1) * d(), b);
}

void AttentionParams::SetWBlock(int r, int c, const Mat& b) {
  CheckBlockIndex(r, c);
  if (b.rows() != d() || b.cols() != d()) throw ArgumentError("block must be d x d");
  w.set_block((r - 1) * d(), (c - 1) * d(), b);
}

LayerStack LayerStack::Explicit(std::vector<AttentionParams> layers) {
  LayerStack s;
  s.layers_ = std::move(layers);
  return s;
}

LayerStack LayerStack::Looped(AttentionParams shared, std::size_t depth) {
  LayerStack s;
  s.layers_.push_back(std::move(shared));
  s.looped_ = true;
  s.depth_ = depth;
  return s;
}

Mat SaForward(const Mat& z, const AttentionParams& p) {
  CheckShapes(z, p);
  const Mat scores = MatMul(z.transpose(), MatMul(p.w, z));
  const Mat attn = MaskedColumnSoftmax(scores);
  return MatMul(p.v, MatMul(z, attn));
}

Vec AttentionColumn(const Mat& z, const AttentionParams& p, std::size_t k) {
  CheckShapes(z, p);
  if (k >= z.cols()) throw ArgumentError("query column out of range");
  const Vec wq = MatVec(p.w, z.col(k));
  const Mat zt = z.transpose();
  const std::size_t n = z.cols() - 1;
  Vec s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = Dot(zt.row(j), wq);
  StableSoftmaxInPlace(s);
  return s;
}

ForwardResult TfForward(const Mat& z0, const LayerStack& stack) {
  if (z0.rows() == 0 || z0.rows() % 2 != 0 || z0.cols() < 2) {
    throw ArgumentError("input must be (2d) x (n+1) with d >= 1, n >= 1");
  }
  const std::size_t d = z0.rows() / 2;
  const std::size_t n = z0.cols() - 1;
  ForwardResult out{z0, {}, {}};
  out.trace.thetas.push_back(ExtractTheta(z0, d, n));
  out.context_thetas.push_back(z0.block(d, 0, d, 1).col(0));
  for (std::size_t l = 0; l < stack.depth(); ++l) {
    out.z += SaForward(out.z, stack.layer(l));
    out.trace.thetas.push_back(ExtractTheta(out.z, d, n));
    out.context_thetas.push_back(out.z.block(d, 0, d, 1).col(0));
    if (!AllFinite(out.trace.thetas.back())) {
      throw NumericError("non-finite hidden state after layer " + std::to_string(l + 1), l + 1);
    }
  }
  return out;
}

ForwardResult LoopedForward(const Mat& z0, const AttentionParams& p, std::size_t depth) {
  if (depth == 0) throw ArgumentError("looped depth must be at least 1");
  return TfForward(z0, LayerStack::Looped(p, depth));
}

AttentionParams BuildNgdParams(double alpha_tilde, double beta_tilde, const Mat& a1,
                               const Mat& a2) {
  if (!(alpha_tilde > 0.0) || !(beta_tilde > 0.0)) {
    throw ArgumentError("alpha_tilde and beta_tilde must be positive");
  }
  const std::size_t d = a1.rows();
  if (d == 0 || !a1.square() || a2.rows() != d || !a2.square()) {
    throw ArgumentError("A1 and A2 must be d x d");
  }
  AttentionParams p = AttentionParams::Zero(d);
  p.SetVBlock(2, 1, Mat::Identity(d, alpha_tilde));
  p.SetWBlock(1, 2, Mat::Identity(d, -beta_tilde));
  p.SetWBlock(2, 1, a1);
  p.SetWBlock(2, 2, a2);
  return p;
}

AttentionParams BuildNgdParams(double alpha_tilde, double beta_tilde, std::size_t d) {
  return BuildNgdParams(alpha_tilde, beta_tilde, Mat(d, d), Mat(d, d));
}

Vec ExtractTheta(const Mat& z, std::size_t d, std::size_t n) {
  if (z.rows() != 2 * d || z.cols() != n + 1) {
    throw ArgumentError("expected a " + std::to_string(2 * d) + "x" + std::to_string(n + 1) +
                        " matrix");
  }
  Vec theta(d);
  for (std::size_t r = 0; r < d; ++r) theta[r] = z(d + r, n);
  return theta;
}

double PatternResiduals::zero_blocks() const {
  return std::sqrt(v11 * v11 + v12 * v12 + v22 * v22 + w11 * w11 + w21 * w21 + w22 * w22);
}

Coefficients ExtractCoeffs(const Mat& v21, const Mat& w12) {
  Coefficients c;
  c.c1 = DiagMean(v21);
  c.c2 = -DiagMean(w12);
  c.residuals.v21_offdiag = OffdiagFrobenius(v21);
  c.residuals.w12_offdiag = OffdiagFrobenius(w12);
  c.residuals.v21_diag_var = DiagVariance(v21);
  c.residuals.w12_diag_var = DiagVariance(w12);
  return c;
}

Coefficients ExtractCoeffs(const AttentionParams& p) {
  Coefficients c = ExtractCoeffs(p.VBlock(2, 1), p.WBlock(1, 2));
  c.residuals.v11 = Frobenius(p.VBlock(1, 1));
  c.residuals.v12 = Frobenius(p.VBlock(1, 2));
  c.residuals.v22 = Frobenius(p.VBlock(2, 2));
  c.residuals.w11 = Frobenius(p.WBlock(1, 1));
  c.residuals.w21 = Frobenius(p.WBlock(2, 1));
  c.residuals.w22 = Frobenius(p.WBlock(2, 2));
  return c;
}

}  // namespace icl

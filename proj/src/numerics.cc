// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icl/errors.h"
#include "icl/kernels.h"

namespace icl {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ArgumentError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::Identity(std::size_t n, double scale) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
  return m;
}

Vec Mat::col(std::size_t c) const {
  Vec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Mat::set_col(std::size_t c, std::span<const double> v) {
  if (v.size() != rows_) throw ArgumentError("set_col: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw ArgumentError("block out of range");
  Mat b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r) {
    std::copy_n(data_.data() + (r0 + r) * cols_ + c0, nc, b.data() + r * nc);
  }
  return b;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
    throw ArgumentError("set_block out of range");
  }
  for (std::size_t r = 0; r < b.rows(); ++r) {
    std::copy_n(b.data() + r * b.cols(), b.cols(), data_.data() + (r0 + r) * cols_ + c0);
  }
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Mat& Mat::operator+=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ArgumentError("shape mismatch in +=");
  kernels::Active().axpy(1.0, o.data(), data(), size());
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ArgumentError("shape mismatch in -=");
  kernels::Active().axpy(-1.0, o.data(), data(), size());
  return *this;
}

Mat& Mat::operator*=(double s) {
  kernels::Active().scale(s, data(), size());
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat MatMul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw ArgumentError("MatMul: inner dimensions " + std::to_string(a.cols()) +
                        " vs " + std::to_string(b.rows()));
  }
  const auto& k = kernels::Active();
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.data() + i * c.cols();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip != 0.0) k.axpy(aip, b.data() + p * b.cols(), ci, b.cols());
    }
  }
  return c;
}

Vec MatVec(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ArgumentError("MatVec: dimension mismatch");
  const auto& k = kernels::Active();
  Vec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = k.dot(a.row(i).data(), x.data(), x.size());
  return y;
}

Vec MatTVec(const Mat& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw ArgumentError("MatTVec: dimension mismatch");
  const auto& k = kernels::Active();
  Vec y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] != 0.0) k.axpy(x[i], a.row(i).data(), y.data(), y.size());
  }
  return y;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("Dot: length mismatch");
  return kernels::Active().dot(a.data(), b.data(), a.size());
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ArgumentError("Axpy: length mismatch");
  kernels::Active().axpy(alpha, x.data(), y.data(), x.size());
}

double Norm2(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

double NormInf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vec Normalized(std::span<const double> v) {
  const double norm = Norm2(v);
  if (norm == 0.0 || !std::isfinite(norm)) throw ArgumentError("cannot normalize a zero or non-finite vector");
  return Scaled(v, 1.0 / norm);
}

Vec Scaled(std::span<const double> v, double s) {
  Vec out(v.begin(), v.end());
  kernels::Active().scale(s, out.data(), out.size());
  return out;
}

Vec Sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("Sub: length mismatch");
  Vec out(a.begin(), a.end());
  kernels::Active().axpy(-1.0, b.data(), out.data(), out.size());
  return out;
}

Mat Outer(std::span<const double> a, std::span<const double> b) {
  Mat m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void StableSoftmaxInPlace(std::span<double> v) {
  if (v.empty()) throw ArgumentError("softmax of empty vector");
  const double m = kernels::Active().max(v.data(), v.size());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - m);
    sum += x;
  }
  kernels::Active().scale(1.0 / sum, v.data(), v.size());
}

Vec StableSoftmax(std::span<const double> v) {
  Vec out(v.begin(), v.end());
  StableSoftmaxInPlace(out);
  return out;
}

double LogSumExp(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("logsumexp of empty vector");
  if (v.size() == 1) return v[0];
  const double m = kernels::Active().max(v.data(), v.size());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

Vec FiniteDiffGrad(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite difference step must be positive");
  Vec g(x.size());
  Vec probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("non-finite function value at coordinate " + std::to_string(i), i);
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double Frobenius(const Mat& m) { return Norm2(m.values()); }

double OffdiagRatio(const Mat& m) {
  if (!m.square()) throw ArgumentError("offdiag_ratio needs a square matrix");
  double max_off = 0.0;
  double diag_sum = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i == j) {
        diag_sum += std::abs(m(i, j));
      } else {
        max_off = std::max(max_off, std::abs(m(i, j)));
      }
    }
  }
  const double diag_mean = m.rows() ? diag_sum / static_cast<double>(m.rows()) : 0.0;
  if (diag_mean == 0.0) return std::numeric_limits<double>::infinity();
  return max_off / diag_mean;
}

bool IsSymmetricPositiveDefinite(const Mat& m, double shift) {
  if (!m.square()) return false;
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) return false;
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j) - shift;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

}  // namespace icl

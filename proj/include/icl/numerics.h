// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ICL_NUMERICS_H_
#define ICL_NUMERICS_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace icl {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat Identity(std::size_t n, double scale = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vec col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<const double> values() const { return data_; }

  // Copy of rows [r0, r0+nr) x cols [c0, c0+nc).
  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Mat& b);

  Mat transpose() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  bool operator==(const Mat& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);

// Dispatched dense products.
Mat MatMul(const Mat& a, const Mat& b);
Vec MatVec(const Mat& a, std::span<const double> x);
// a^T x
Vec MatTVec(const Mat& a, std::span<const double> x);

double Dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void Axpy(double alpha, std::span<const double> x, std::span<double> y);
double Norm2(std::span<const double> v);
double NormInf(std::span<const double> v);
Vec Scaled(std::span<const double> v, double s);
// Throws ArgumentError for the zero vector.
Vec Normalized(std::span<const double> v);
Vec Sub(std::span<const double> a, std::span<const double> b);
// a b^T
Mat Outer(std::span<const double> a, std::span<const double> b);

bool AllFinite(std::span<const double> v);

// exp(v - max v) / sum exp(v - max v). Throws ArgumentError on empty input.
Vec StableSoftmax(std::span<const double> v);
void StableSoftmaxInPlace(std::span<double> v);

// log sum exp(v_i), evaluated with the max factored out.
double LogSumExp(std::span<const double> v);

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every i.
// Throws NumericError carrying i when an evaluation is non-finite.
inline constexpr double kDefaultFdStep = 1e-5;
Vec FiniteDiffGrad(const std::function<double(const Vec&)>& f, const Vec& x,
                   double h = kDefaultFdStep);

double Frobenius(const Mat& m);

// max |off-diagonal| / mean |diagonal|; zero for c*I with c != 0, +inf when
// the diagonal is identically zero.
double OffdiagRatio(const Mat& m);

// Cholesky succeeds on m - shift*I (m must be symmetric within 1e-12).
bool IsSymmetricPositiveDefinite(const Mat& m, double shift = 0.0);

}  // namespace icl

#endif  // ICL_NUMERICS_H_

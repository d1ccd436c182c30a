// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/data.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "icl/errors.h"

namespace icl {

Mat ContextDataset::Signed() const {
  Mat z = features;
  for (std::size_t i = 0; i < n(); ++i) {
    if (labels[i] < 0) {
      for (double& v : z.row(i)) v = -v;
    }
  }
  return z;
}

ContextDataset ContextDataset::Rescaled(double c) const {
  ContextDataset out = *this;
  out.features *= c;
  return out;
}

std::string_view FamilyName(Family f) {
  switch (f) {
    case Family::kGaussian:
      return "gaussian";
    case Family::kLaplace:
      return "laplace";
    case Family::kUniform01:
      return "uniform01";
  }
  return "unknown";
}

Family ParseFamily(std::string_view name) {
  for (Family f : {Family::kGaussian, Family::kLaplace, Family::kUniform01}) {
    if (name == FamilyName(f)) return f;
  }
  throw ArgumentError("unknown distribution family '" + std::string(name) + "'");
}

void DistSpec::Validate(std::size_t d) const {
  if (family != Family::kUniform01 && !(scale > 0.0 && std::isfinite(scale))) {
    throw ArgumentError("distribution scale must be positive and finite");
  }
  if (center && family != Family::kUniform01) {
    throw ArgumentError("centering applies to the uniform01 family only");
  }
  if (covariance) {
    if (covariance->rows() != d || covariance->cols() != d) {
      throw ArgumentError("covariance must be d x d");
    }
    if (!IsSymmetricPositiveDefinite(*covariance)) {
      throw ArgumentError("covariance must be symmetric positive definite");
    }
  }
}

Vec SampleThetaStar(Rng& rng, std::size_t d) {
  if (d == 0) throw ArgumentError("dimension must be at least 1");
  Vec v(d);
  double norm = 0.0;
  do {
    for (double& x : v) x = rng.Normal();
    norm = Norm2(v);
  } while (norm == 0.0);
  for (double& x : v) x /= norm;
  return v;
}

Vec SampleThetaStar(std::uint64_t seed, std::size_t d) {
  Rng rng(seed);
  return SampleThetaStar(rng, d);
}

Mat RandomPdCovariance(Rng& rng, std::size_t d) {
  if (d == 0) throw ArgumentError("dimension must be at least 1");
  Mat a(d, d);
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rng.Normal();
  Mat sigma(d, d);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = Dot(a.row(i), a.row(j)) * inv_d;
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
    sigma(i, i) += 0.1;
  }
  return sigma;
}

Mat RandomPdCovariance(std::uint64_t seed, std::size_t d) {
  Rng rng(seed);
  return RandomPdCovariance(rng, d);
}

ContextDataset SampleDataset(Rng& rng, std::size_t n, std::size_t d, const DistSpec& dist) {
  if (n == 0 || d == 0) throw ArgumentError("dataset needs n >= 1 and d >= 1");
  dist.Validate(d);

  ContextDataset ds;
  ds.theta_star = SampleThetaStar(rng, d);
  ds.features = Mat(n, d);
  ds.labels.resize(n);

  Vec raw(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : raw) {
      switch (dist.family) {
        case Family::kGaussian:
          v = dist.scale * rng.Normal();
          break;
        case Family::kLaplace:
          v = rng.Laplace(dist.scale);
          break;
        case Family::kUniform01:
          v = rng.Uniform01() - (dist.center ? 0.5 : 0.0);
          break;
      }
    }
    auto x = ds.features.row(i);
    if (dist.covariance) {
      const Vec mapped = MatVec(*dist.covariance, raw);
      std::copy(mapped.begin(), mapped.end(), x.begin());
    } else {
      std::copy(raw.begin(), raw.end(), x.begin());
    }
    ds.labels[i] = Sign(Dot(x, *ds.theta_star));
  }
  return ds;
}

ContextDataset SampleDataset(std::uint64_t seed, std::size_t n, std::size_t d,
                             const DistSpec& dist) {
  Rng rng(seed);
  return SampleDataset(rng, n, d, dist);
}

EmbeddingMatrix BuildEmbedding(const ContextDataset& ds, std::span<const double> theta0) {
  const std::size_t d = ds.d();
  const std::size_t n = ds.n();
  if (theta0.size() != d) {
    throw ArgumentError("theta0 has dimension " + std::to_string(theta0.size()) +
                        ", dataset has " + std::to_string(d));
  }
  if (ds.labels.size() != n) throw ArgumentError("label count does not match features");
  EmbeddingMatrix e{Mat(2 * d, n + 1), d, n};
  for (std::size_t i = 0; i < n; ++i) {
    const double y = ds.labels[i];
    for (std::size_t r = 0; r < d; ++r) e.z(r, i) = y * ds.features(i, r);
  }
  for (std::size_t r = 0; r < d; ++r) e.z(d + r, n) = theta0[r];
  return e;
}

ConcatEmbedding MakeConcatEmbedding(std::size_t d, double bound) {
  ConcatEmbedding e{Mat(4 * d, d + 1), Vec(4 * d, -bound), Mat(d, 4 * d)};
  // Row blocks of W1: [I, M], [-I, M], [I, -M], [-I, -M].
  const double x_sign[4] = {1.0, -1.0, 1.0, -1.0};
  const double y_coef[4] = {bound, bound, -bound, -bound};
  const double out_sign[4] = {1.0, -1.0, -1.0, 1.0};
  for (std::size_t b = 0; b < 4; ++b) {
    for (std::size_t i = 0; i < d; ++i) {
      e.w1(b * d + i, i) = x_sign[b];
      e.w1(b * d + i, d) = y_coef[b];
      e.w2(i, b * d + i) = out_sign[b];
    }
  }
  return e;
}

Vec EmbedConcat(std::span<const double> x, int y, double bound) {
  if (y != 1 && y != -1) throw ArgumentError("label must be -1 or +1");
  if (!(NormInf(x) <= bound)) {
    throw PreconditionError("||x||_inf exceeds the embedding bound M");
  }
  const std::size_t d = x.size();
  const ConcatEmbedding e = MakeConcatEmbedding(d, bound);
  Vec input(x.begin(), x.end());
  input.push_back(static_cast<double>(y));
  Vec hidden = MatVec(e.w1, input);
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    hidden[i] = std::max(0.0, hidden[i] + e.b1[i]);
  }
  return MatVec(e.w2, hidden);
}

namespace {

std::vector<std::string_view> SplitComma(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double ParseDouble(std::string_view tok, std::size_t line) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("not a finite decimal number: '" + std::string(tok) + "'", line);
  }
  return v;
}

}  // namespace

ContextDataset ParseFeaturesCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("missing header", 1);

  std::string_view header = lines[0];
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto names = SplitComma(header);
  if (names.size() < 2 || names[0] != "y") {
    throw ParseError("header must be y,x1,...,xd", 1);
  }
  const std::size_t d = names.size() - 1;
  for (std::size_t j = 1; j <= d; ++j) {
    if (names[j] != "x" + std::to_string(j)) {
      throw ParseError("header column " + std::to_string(j + 1) + " must be x" +
                           std::to_string(j),
                       1);
    }
  }
  if (lines.size() == 1) throw ParseError("no data rows (empty dataset)", 1);

  ContextDataset ds;
  ds.features = Mat(lines.size() - 1, d);
  ds.labels.resize(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = SplitComma(lines[i]);
    if (fields.size() != d + 1) {
      throw ParseError("expected " + std::to_string(d + 1) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const double y = ParseDouble(fields[0], line_no);
    if (y != 1.0 && y != -1.0) throw ParseError("label must be -1 or 1", line_no);
    ds.labels[i - 1] = static_cast<int>(y);
    for (std::size_t j = 0; j < d; ++j) ds.features(i - 1, j) = ParseDouble(fields[j + 1], line_no);
  }
  return ds;
}

ContextDataset LoadFeaturesCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open feature file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseFeaturesCsv(buf.str());
}

}  // namespace icl

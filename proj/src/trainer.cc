// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/trainer.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "icl/errors.h"
#include "icl/parallel.h"
#include "icl/rng.h"

namespace icl {

namespace {

std::size_t ResolveThreads(std::size_t t) { return t == 0 ? DefaultThreads() : t; }

void CheckBatch(std::span<const BatchItem> batch, std::size_t d) {
  if (batch.empty()) throw ArgumentError("empty training batch");
  for (const auto& item : batch) {
    if (item.ds.d() != d || item.theta0.size() != d) {
      throw ArgumentError("batch item dimension does not match parameters");
    }
  }
}

// theta_GD - theta0 = (alpha / n) sum_i e^{-<z_i, theta0>} z_i, evaluated as
// alpha exp(logsumexp(-<z, theta0>) - ln n) sum_i softmax_i z_i.
Vec TeacherDelta(std::span<const double> theta0, const Mat& z, double alpha) {
  Vec neg = MatVec(z, theta0);
  for (double& v : neg) v = -v;
  const double log_scale = LogSumExp(neg) - std::log(static_cast<double>(z.rows()));
  StableSoftmaxInPlace(neg);
  Vec delta = MatTVec(z, neg);
  const double factor = alpha * std::exp(log_scale);
  if (!std::isfinite(factor)) {
    throw NumericError("teacher term overflows (log scale " + std::to_string(log_scale) + ")");
  }
  for (double& v : delta) v *= factor;
  return delta;
}

struct ReducedTerms {
  double loss = 0.0;
  Vec twice_err;  // 2 (theta_1 - theta_GD)
  Vec attended;   // Z s
  Vec w_dir;      // sum_i g_i z_i, g = dLoss/dscores
};

ReducedTerms ReducedItem(const TrainState& st, const BatchItem& item, double alpha) {
  const Mat z = item.ds.Signed();
  Vec scores = MatVec(z, MatVec(st.w12, item.theta0));
  StableSoftmaxInPlace(scores);
  const Vec& s = scores;
  ReducedTerms t;
  t.attended = MatTVec(z, s);
  const Vec pred = MatVec(st.v21, t.attended);
  const Vec delta = TeacherDelta(item.theta0, z, alpha);
  Vec err = Sub(pred, delta);
  t.loss = Dot(err, err);
  for (double& v : err) v *= 2.0;
  t.twice_err = std::move(err);
  // d loss / d scores_i = s_i (q_i - <s, q>), q = Z^T V21^T 2e.
  const Vec q = MatVec(z, MatTVec(st.v21, t.twice_err));
  const double q_bar = Dot(s, q);
  Vec g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = s[i] * (q[i] - q_bar);
  t.w_dir = MatTVec(z, g);
  return t;
}

struct FullTerms {
  double loss = 0.0;
  Vec twice_err;  // 2d, top half zero
  Vec attended;   // 2d
  Vec w_dir;      // 2d
  Vec query;      // 2d, last embedding column
};

FullTerms FullItem(const AttentionParams& p, const BatchItem& item, double alpha) {
  const std::size_t d = p.d();
  const EmbeddingMatrix emb = BuildEmbedding(item.ds, item.theta0);
  const Mat zt = emb.z.transpose();  // (n+1) x 2d, row j is column j of Z0
  const std::size_t n = emb.n;

  FullTerms t;
  t.query.assign(zt.row(n).begin(), zt.row(n).end());
  const Vec wq = MatVec(p.w, t.query);
  Vec a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = Dot(zt.row(j), wq);
  StableSoftmaxInPlace(a);
  t.attended.assign(2 * d, 0.0);
  for (std::size_t j = 0; j < n; ++j) Axpy(a[j], zt.row(j), t.attended);
  const Vec out = MatVec(p.v, t.attended);

  const Vec delta = TeacherDelta(item.theta0, item.ds.Signed(), alpha);
  t.twice_err.assign(2 * d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    const double e = out[d + r] - delta[r];
    t.loss += e * e;
    t.twice_err[d + r] = 2.0 * e;
  }
  const Vec h = MatTVec(p.v, t.twice_err);
  Vec q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = Dot(zt.row(j), h);
  const double q_bar = Dot(a, q);
  t.w_dir.assign(2 * d, 0.0);
  for (std::size_t j = 0; j < n; ++j) Axpy(a[j] * (q[j] - q_bar), zt.row(j), t.w_dir);
  return t;
}

// acc += scale * a b^T
void AddOuter(Mat& acc, double scale, std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0.0) Axpy(scale * a[i], b, acc.row(i));
  }
}

std::string Fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TrainRecord MakeRecord(std::size_t iter, double loss, const Coefficients& c, const Mat& v21,
                       const Mat& w12, double seconds) {
  TrainRecord r;
  r.iter = iter;
  r.loss = loss;
  r.c1 = c.c1;
  r.c2 = c.c2;
  r.res_v_off = c.residuals.v21_offdiag;
  r.res_w_off = c.residuals.w12_offdiag;
  r.res_zero_blocks = c.residuals.zero_blocks();
  r.v21_offdiag_ratio = OffdiagRatio(v21);
  r.w12_offdiag_ratio = OffdiagRatio(w12);
  r.wall_seconds = seconds;
  return r;
}

}  // namespace

std::vector<std::string> TrainConfig::Validate() const {
  if (n == 0 || d == 0) throw ArgumentError("n and d must be positive");
  if (batch_k == 0) throw ArgumentError("batch_k must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be positive");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ArgumentError("eta must be non-negative");
  std::vector<std::string> warnings;
  if (alpha > 2.0) warnings.push_back("alpha > 2 is outside the regime of the convergence theory");
  if (sigma > 2.0) warnings.push_back("sigma > 2 is outside the regime of the convergence theory");
  return warnings;
}

std::vector<BatchItem> SampleBatch(const TrainConfig& cfg, std::size_t iter) {
  std::vector<BatchItem> batch(cfg.batch_k);
  const DistSpec dist = DistSpec::Gaussian(cfg.sigma);
  ParallelFor(
      cfg.batch_k,
      [&](std::size_t k) {
        Rng rng = Rng::Substream(cfg.seed, {iter, k});
        batch[k].ds = SampleDataset(rng, cfg.n, cfg.d, dist);
        batch[k].theta0 = SampleThetaStar(rng, cfg.d);
      },
      ResolveThreads(cfg.threads));
  return batch;
}

Vec TeacherStep(std::span<const double> theta0, const ContextDataset& ds, double alpha) {
  if (theta0.size() != ds.d()) throw ArgumentError("theta0 dimension mismatch");
  Vec out(theta0.begin(), theta0.end());
  Axpy(1.0, TeacherDelta(theta0, ds.Signed(), alpha), out);
  return out;
}

AttentionParams TrainState::ToParams() const {
  const std::size_t d = v21.rows();
  AttentionParams p = AttentionParams::Zero(d);
  p.SetVBlock(2, 1, v21);
  p.SetWBlock(1, 2, w12);
  return p;
}

double SampleLoss(const TrainState& state, std::span<const BatchItem> batch, double alpha) {
  CheckBatch(batch, state.v21.rows());
  double total = 0.0;
  for (const auto& item : batch) {
    const Mat z = item.ds.Signed();
    const Vec s = StableSoftmax(MatVec(z, MatVec(state.w12, item.theta0)));
    const Vec pred = MatVec(state.v21, MatTVec(z, s));
    const Vec err = Sub(pred, TeacherDelta(item.theta0, z, alpha));
    total += Dot(err, err);
  }
  return total / static_cast<double>(batch.size());
}

ReducedGrads SampleGrads(const TrainState& state, std::span<const BatchItem> batch,
                         double alpha, std::size_t threads) {
  const std::size_t d = state.v21.rows();
  CheckBatch(batch, d);
  std::vector<ReducedTerms> terms(batch.size());
  ParallelFor(
      batch.size(), [&](std::size_t k) { terms[k] = ReducedItem(state, batch[k], alpha); },
      ResolveThreads(threads));

  ReducedGrads g{Mat(d, d), Mat(d, d), 0.0};
  const double inv_k = 1.0 / static_cast<double>(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    g.loss += terms[k].loss;
    AddOuter(g.v21, inv_k, terms[k].twice_err, terms[k].attended);
    AddOuter(g.w12, inv_k, terms[k].w_dir, batch[k].theta0);
  }
  g.loss *= inv_k;
  return g;
}

double SampleLossFull(const AttentionParams& p, std::span<const BatchItem> batch,
                      double alpha) {
  CheckBatch(batch, p.d());
  double total = 0.0;
  for (const auto& item : batch) {
    const EmbeddingMatrix emb = BuildEmbedding(item.ds, item.theta0);
    const Mat z1 = emb.z + SaForward(emb.z, p);
    const Vec theta1 = ExtractTheta(z1, emb.d, emb.n);
    const Vec err = Sub(theta1, TeacherStep(item.theta0, item.ds, alpha));
    total += Dot(err, err);
  }
  return total / static_cast<double>(batch.size());
}

FullGrads SampleGradsFull(const AttentionParams& p, std::span<const BatchItem> batch,
                          double alpha, std::size_t threads) {
  const std::size_t d = p.d();
  CheckBatch(batch, d);
  std::vector<FullTerms> terms(batch.size());
  ParallelFor(
      batch.size(), [&](std::size_t k) { terms[k] = FullItem(p, batch[k], alpha); },
      ResolveThreads(threads));

  FullGrads g{Mat(2 * d, 2 * d), Mat(2 * d, 2 * d), 0.0};
  const double inv_k = 1.0 / static_cast<double>(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    g.loss += terms[k].loss;
    AddOuter(g.v, inv_k, terms[k].twice_err, terms[k].attended);
    AddOuter(g.w, inv_k, terms[k].w_dir, terms[k].query);
  }
  g.loss *= inv_k;
  return g;
}

std::string TrainLog::ToCsv() const {
  std::string out = "iter,loss,c1,c2,res_v_off,res_w_off,res_zero_blocks\n";
  for (const auto& r : records) {
    out += std::to_string(r.iter);
    for (double v : {r.loss, r.c1, r.c2, r.res_v_off, r.res_w_off, r.res_zero_blocks}) {
      out += ',';
      out += Fmt17(v);
    }
    out += '\n';
  }
  return out;
}

TrainResult TrainOnlineFrom(const TrainConfig& cfg, TrainState state) {
  cfg.Validate();
  if (state.v21.rows() != cfg.d || state.w12.rows() != cfg.d) {
    throw ArgumentError("initial state does not match d");
  }
  TrainResult result{std::move(state), {}};
  result.log.records.reserve(cfg.iters);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < cfg.iters; ++t) {
    const auto batch = SampleBatch(cfg, t);
    ReducedGrads g;
    try {
      g = SampleGrads(result.state, batch, cfg.alpha, cfg.threads);
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(t) + ": " + e.what(), t);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.records.push_back(MakeRecord(t, g.loss,
                                            ExtractCoeffs(result.state.v21, result.state.w12),
                                            result.state.v21, result.state.w12, secs));
    result.state.v21 -= cfg.eta * g.v21;
    result.state.w12 -= cfg.eta * g.w12;
    if (!AllFinite(result.state.v21.values()) || !AllFinite(result.state.w12.values())) {
      throw NumericError("parameters diverged at iteration " + std::to_string(t), t);
    }
  }
  return result;
}

TrainResult TrainOnline(const TrainConfig& cfg) {
  return TrainOnlineFrom(cfg, TrainState::Zero(cfg.d));
}

FullTrainResult TrainFullMatrix(const TrainConfig& cfg) {
  cfg.Validate();
  FullTrainResult result{AttentionParams::Zero(cfg.d), {}};
  result.log.records.reserve(cfg.iters);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < cfg.iters; ++t) {
    const auto batch = SampleBatch(cfg, t);
    FullGrads g;
    try {
      g = SampleGradsFull(result.params, batch, cfg.alpha, cfg.threads);
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(t) + ": " + e.what(), t);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.records.push_back(MakeRecord(t, g.loss, ExtractCoeffs(result.params),
                                            result.params.VBlock(2, 1),
                                            result.params.WBlock(1, 2), secs));
    result.params.v -= cfg.eta * g.v;
    result.params.w -= cfg.eta * g.w;
    if (!AllFinite(result.params.v.values()) || !AllFinite(result.params.w.values())) {
      throw NumericError("parameters diverged at iteration " + std::to_string(t), t);
    }
  }
  return result;
}

double TargetC1(double alpha, double sigma) { return alpha * std::exp(sigma * sigma / 2.0); }

bool CheckInvariantRegion(double c1, double c2, double alpha, double sigma) {
  return c1 >= 0.0 && c1 <= 2.0 * TargetC1(alpha, sigma) && c2 >= 0.0 && c2 <= 2.0;
}

LinearDecayFit FitLinearDecay(const TrainLog& log, std::size_t window, double cutoff) {
  const std::size_t count = log.records.size();
  if (count < 20) throw ArgumentError("too few iterations to fit a decay rate");
  LinearDecayFit fit;
  const std::size_t tail = std::max<std::size_t>(1, count / 10);
  for (std::size_t t = count - tail; t < count; ++t) fit.floor += log.records[t].loss;
  fit.floor /= static_cast<double>(tail);

  const std::size_t half = window / 2;
  Vec smooth(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(count, t + half + 1);
    double s = 0.0;
    for (std::size_t u = lo; u < hi; ++u) s += log.records[u].loss;
    smooth[t] = s / static_cast<double>(hi - lo);
  }

  const double initial = smooth[0] - fit.floor;
  if (!(initial > 0.0)) throw NumericError("loss never exceeds its floor; nothing to fit");
  fit.begin = 0;
  fit.end = 0;
  while (fit.end < count && smooth[fit.end] - fit.floor > cutoff * initial) ++fit.end;
  if (fit.end - fit.begin < 3) throw NumericError("decay window too short to fit");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(fit.end - fit.begin);
  for (std::size_t t = fit.begin; t < fit.end; ++t) {
    const double x = static_cast<double>(t);
    const double y = std::log(smooth[t] - fit.floor);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / m;
  const double var_x = sxx - sx * sx / m;
  const double var_y = syy - sy * sy / m;
  fit.slope = cov / var_x;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.r2 = var_y > 0.0 ? cov * cov / (var_x * var_y) : 1.0;
  return fit;
}

}  // namespace icl

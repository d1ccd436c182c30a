// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/incontext_opt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "icl/errors.h"

namespace icl {

namespace {

void CheckTheta(std::span<const double> theta, const Mat& z) {
  if (z.rows() == 0) throw ArgumentError("in-context loss of an empty dataset");
  if (theta.size() != z.cols()) {
    throw ArgumentError("theta has dimension " + std::to_string(theta.size()) +
                        ", features have " + std::to_string(z.cols()));
  }
}

// -<theta, z_i> for every i.
Vec NegMargins(std::span<const double> theta, const Mat& z) {
  Vec m = MatVec(z, theta);
  for (double& v : m) v = -v;
  return m;
}

// sum_i w_i z_i
Vec WeightedMean(std::span<const double> w, const Mat& z) { return MatTVec(z, w); }

}  // namespace

double IclLossSigned(std::span<const double> theta, const Mat& z) {
  CheckTheta(theta, z);
  return std::exp(LogSumExp(NegMargins(theta, z)) - std::log(static_cast<double>(z.rows())));
}

LossEval IclEvalSigned(std::span<const double> theta, const Mat& z) {
  CheckTheta(theta, z);
  LossEval e;
  Vec neg = NegMargins(theta, z);
  e.value = std::exp(LogSumExp(neg) - std::log(static_cast<double>(z.rows())));
  e.weights = StableSoftmax(neg);
  e.grad = WeightedMean(e.weights, z);
  for (double& g : e.grad) g *= -e.value;
  return e;
}

double IclLoss(std::span<const double> theta, const ContextDataset& ds) {
  return IclLossSigned(theta, ds.Signed());
}

LossEval IclEval(std::span<const double> theta, const ContextDataset& ds) {
  return IclEvalSigned(theta, ds.Signed());
}

IterateTrace NgdRun(std::span<const double> theta0, const ContextDataset& ds,
                    std::span<const double> rates, double beta_tilde) {
  if (!(beta_tilde > 0.0)) throw ArgumentError("beta_tilde must be positive");
  const Mat z = ds.Rescaled(beta_tilde).Signed();
  CheckTheta(theta0, z);
  IterateTrace trace;
  trace.rates.assign(rates.begin(), rates.end());
  trace.rescale = beta_tilde;
  trace.thetas.emplace_back(theta0.begin(), theta0.end());
  for (std::size_t l = 0; l < rates.size(); ++l) {
    Vec theta = trace.thetas.back();
    Vec w = StableSoftmax(NegMargins(theta, z));
    // -grad L~ / L~ = sum_i w_i z~_i
    const Vec direction = WeightedMean(w, z);
    Axpy(rates[l] / beta_tilde, direction, theta);
    trace.thetas.push_back(std::move(theta));
  }
  return trace;
}

IterateTrace GdRun(std::span<const double> theta0, const ContextDataset& ds, double alpha,
                   std::size_t steps) {
  const Mat z = ds.Signed();
  CheckTheta(theta0, z);
  IterateTrace trace;
  trace.rates.assign(steps, alpha);
  trace.thetas.emplace_back(theta0.begin(), theta0.end());
  for (std::size_t l = 0; l < steps; ++l) {
    Vec theta = trace.thetas.back();
    const LossEval e = IclEvalSigned(theta, z);
    if (!std::isfinite(e.value) || !AllFinite(e.grad)) {
      throw NumericError("gradient overflow at GD step " + std::to_string(l), l);
    }
    Axpy(-alpha, e.grad, theta);
    trace.thetas.push_back(std::move(theta));
  }
  return trace;
}

double MinMargin(std::span<const double> theta, const Mat& z) {
  const Vec m = MatVec(z, theta);
  return *std::min_element(m.begin(), m.end());
}

SvmSolution SvmSolveSigned(const Mat& z, const SvmOptions& opts) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  if (n == 0 || d == 0) throw ArgumentError("svm of an empty dataset");
  Vec sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = Dot(z.row(i), z.row(i));
    if (sq[i] == 0.0) throw InfeasibleError("zero feature vector cannot reach margin 1");
  }

  SvmSolution sol;
  sol.duals.assign(n, 0.0);
  Vec w(d, 0.0);
  // Norm beyond which the dual is taken to be diverging.
  constexpr double kDivergence = 1e12;

  auto kkt = [&]() {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = Dot(w, z.row(i));
      r = std::max(r, 1.0 - m);
      r = std::max(r, sol.duals[i] * (m - 1.0));
    }
    return r;
  };

  for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const double m = Dot(w, z.row(i));
      const double next = std::max(0.0, sol.duals[i] + (1.0 - m) / sq[i]);
      const double delta = next - sol.duals[i];
      if (delta != 0.0) {
        Axpy(delta, z.row(i), w);
        sol.duals[i] = next;
      }
    }
    sol.sweeps = sweep;
    if (!(Norm2(w) < kDivergence)) {
      throw InfeasibleError("dual coordinate ascent diverged; data not separable");
    }
    sol.kkt_residual = kkt();
    if (sol.kkt_residual < opts.tol) break;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, 1.0 - Dot(w, z.row(i)));
  if (sol.kkt_residual >= opts.tol && worst > std::sqrt(opts.tol)) {
    throw InfeasibleError("primal constraints still violated after " +
                          std::to_string(sol.sweeps) + " sweeps; data not separable");
  }
  const double norm = Norm2(w);
  sol.theta = Scaled(w, 1.0 / norm);
  sol.margin = MinMargin(sol.theta, z);
  return sol;
}

SvmSolution SvmSolve(const ContextDataset& ds, const SvmOptions& opts) {
  return SvmSolveSigned(ds.Signed(), opts);
}

Vec SvmBruteforce2d(const ContextDataset& ds, std::size_t grid, std::size_t refine_passes) {
  if (ds.d() != 2) throw ArgumentError("brute-force max-margin oracle needs d = 2");
  if (ds.n() == 0) throw ArgumentError("empty dataset");
  if (grid < 8) throw ArgumentError("angle grid too coarse");
  const Mat z = ds.Signed();
  auto objective = [&](double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.rows(); ++i) m = std::min(m, c * z(i, 0) + s * z(i, 1));
    return m;
  };

  const double step = 2.0 * std::numbers::pi / static_cast<double>(grid);
  double best_phi = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid; ++k) {
    const double phi = step * static_cast<double>(k);
    const double v = objective(phi);
    if (v > best) {
      best = v;
      best_phi = phi;
    }
  }

  // The objective is a minimum of sinusoids, concave on the arc where it is
  // positive, so golden-section search on the bracketing cell is safe there.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double half_width = step;
  for (std::size_t pass = 0; pass < std::max<std::size_t>(refine_passes, 1); ++pass) {
    double lo = best_phi - half_width;
    double hi = best_phi + half_width;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > 1e-12) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = objective(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = objective(x1);
      }
    }
    const double cand = 0.5 * (lo + hi);
    if (objective(cand) >= best) {
      best = objective(cand);
      best_phi = cand;
    }
    half_width *= 0.5;
  }
  return {std::cos(best_phi), std::sin(best_phi)};
}

double DirectionError(std::span<const double> theta, std::span<const double> ref) {
  if (theta.size() != ref.size()) throw ArgumentError("direction_error: length mismatch");
  const double norm = Norm2(theta);
  if (norm == 0.0) throw ArgumentError("direction of the zero vector is undefined");
  if (std::abs(Norm2(ref) - 1.0) > 1e-9) throw PreconditionError("direction_error: reference is not a unit vector");
  double s = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = theta[i] / norm - ref[i];
    s += diff * diff;
  }
  return std::min(2.0, std::sqrt(s));
}

}  // namespace icl

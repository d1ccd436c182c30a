// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
// The five studies behind the icl_lab subcommands. Each Run* function returns
// structured results; each Cmd* function wraps one into CSV files, a summary
// and an exit code without touching the filesystem.
#ifndef ICL_EXPERIMENTS_H_
#define ICL_EXPERIMENTS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icl/attention.h"
#include "icl/config.h"
#include "icl/numerics.h"
#include "icl/trainer.h"

namespace icl {

inline constexpr int kExitPass = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr double kNgdGapTol = 1e-9;
inline constexpr double kOodGapTol = 1e-8;

struct Report {
  int exit_code = kExitPass;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::string summary;
};

// Writes every file into `dir` (created if missing) plus summary.txt.
void WriteReport(const Report& report, const std::filesystem::path& dir);

// `%.17g`.
std::string FormatReal(double v);

std::string MatToCsv(const Mat& m, const std::string& header = "");
// Square or rectangular numeric CSV; `#` lines are skipped.
Mat ParseMatCsv(std::string_view text);
Mat LoadMatCsv(const std::filesystem::path& path);

// --- verify-ngd -------------------------------------------------------------

struct VerifyNgdResult {
  std::vector<Vec> gaps;  // [trial][layer 0..L]: ||theta_tf - theta_ngd||_inf
  double max_gap = 0.0;
};
// Random dataset, theta0 and A1, A2 per trial. The reference is NGD on the
// dataset rescaled by beta_tilde with rate alpha / beta_tilde.
VerifyNgdResult RunVerifyNgd(const ExperimentConfig& cfg);
Report CmdVerifyNgd(const ExperimentConfig& cfg);

// --- train ------------------------------------------------------------------

struct TrainOutcome {
  TrainResult run;
  double target_c1 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool region_ok = true;  // every logged (c1, c2) inside the invariant region
  double v21_offdiag = 0.0;  // mean over the last 100 iterations
  double w12_offdiag = 0.0;
  std::optional<LinearDecayFit> fit;
  std::optional<FullTrainResult> full;
  std::vector<std::string> warnings;
};
TrainConfig ToTrainConfig(const ExperimentConfig& cfg);
TrainOutcome RunTrain(const ExperimentConfig& cfg);
Report CmdTrain(const ExperimentConfig& cfg);

// --- implicit-bias ----------------------------------------------------------

struct ImplicitBiasRow {
  std::size_t layers = 0;
  double err_svm = 0.0;
  double err_star = 0.0;
  double gap_tf_ngd = 0.0;
};
struct ImplicitBiasResult {
  std::vector<ImplicitBiasRow> rows;
  double slope = 0.0;        // least squares of log err_svm against log L
  double first_ratio = 0.0;  // err_svm at the first depth over the second
  bool strictly_decreasing = true;
  double svm_margin = 0.0;
};
ImplicitBiasResult RunImplicitBias(const ExperimentConfig& cfg);
Report CmdImplicitBias(const ExperimentConfig& cfg);

// --- eval-ood ---------------------------------------------------------------

struct EvalRow {
  std::string family;
  std::size_t layer = 0;
  double err_tf = 0.0;   // mean over datasets, direction error to theta_star
  double err_ngd = 0.0;
  double err_gd = 0.0;
  double gap_tf_ngd = 0.0;  // max over datasets
  double err_svm = 0.0;     // transformer iterate against the max-margin direction
};
struct OodFamilyResult {
  std::string family;
  std::vector<EvalRow> rows;  // layers 0..L
  double svm_err_star = 0.0;  // mean direction error of theta_svm to theta_star
};
struct OodResult {
  double c1 = 0.0;
  double c2 = 0.0;
  bool projected = true;
  std::vector<OodFamilyResult> families;
  double max_gap = 0.0;
};
// `trained` supplies (V21, W12); without it the fixed point
// (alpha e^{sigma^2 / 2}, 1) is used.
OodResult RunEvalOod(const ExperimentConfig& cfg, const std::optional<TrainState>& trained);
Report CmdEvalOod(const ExperimentConfig& cfg);

// --- svm-check --------------------------------------------------------------

struct SvmCheckRow {
  std::size_t n = 0;
  double dir_err = 0.0;
  double kkt = 0.0;
  std::size_t sweeps = 0;
};
struct SvmCheckResult {
  std::vector<SvmCheckRow> rows;
  double max_err = 0.0;
  double max_kkt = 0.0;
};
SvmCheckResult RunSvmCheck(const ExperimentConfig& cfg);
Report CmdSvmCheck(const ExperimentConfig& cfg);

Report RunCommand(const ExperimentConfig& cfg);

}  // namespace icl

#endif  // ICL_EXPERIMENTS_H_

// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
// Experiment configuration: per-command defaults, a flat JSON file layer and
// command-line overrides, validated into one resolved struct.
#ifndef ICL_CONFIG_H_
#define ICL_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icl {

enum class Command { kVerifyNgd, kTrain, kImplicitBias, kEvalOod, kSvmCheck };

std::string_view CommandName(Command c);
// Throws ConfigError for an unknown name.
Command ParseCommand(std::string_view name);

struct ExperimentConfig {
  Command command = Command::kVerifyNgd;
  std::uint64_t seed = 1;
  std::string out;  // output directory; empty means stdout
  std::size_t d = 20;
  std::size_t n = 60;
  std::size_t layers = 30;
  double alpha = 0.5;  // attention rate for NGD commands, teacher step for train
  double sigma = 1.0;
  double eta = 0.1;
  std::size_t batch_k = 400;
  std::size_t iters = 2000;
  std::string dist = "gaussian";  // eval-ood also accepts "all"
  bool center = false;
  double beta_tilde = 1.0;
  std::size_t trials = 20;
  bool project_pattern = true;
  std::string params;  // eval-ood: directory holding v21.csv and w12.csv
  std::vector<std::size_t> depths;  // implicit-bias
  bool full_matrix = false;         // train: also run the unconstrained trainer
  std::size_t threads = 0;

  // Where each key's value came from: "default", "file" or "flag".
  std::map<std::string, std::string> sources;

  // Single-line `# icl_lab <command> {json}` comment. The JSON object holds
  // every key that influences results, so it can be fed back via --config.
  std::string Header() const;
};

// Defaults for `command` with no file and no flags.
ExperimentConfig DefaultConfig(Command command);

// Layers a flat JSON object (`file_json`, may be empty) and string-valued
// flag overrides on top of the command defaults, then validates. Throws
// ConfigError naming the field for unknown keys, type mismatches and
// out-of-range values.
ExperimentConfig ResolveConfig(Command command, std::string_view file_json,
                               const std::map<std::string, std::string>& flags);

// Every accepted key, in header order.
const std::vector<std::string>& ConfigKeys();

}  // namespace icl

#endif  // ICL_CONFIG_H_

// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
// icl_lab: command-line driver for the in-context NGD experiments.
//
// Exit codes: 0 pass, 1 tolerance failure, 2 usage or config error,
// 3 numeric error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "icl/config.h"
#include "icl/errors.h"
#include "icl/experiments.h"

namespace {

struct Flags {
  std::map<std::string, std::string> values;  // key -> raw text
  std::map<std::string, bool> bools;
  std::string config_path;
};

std::string Description(icl::Command c) {
  switch (c) {
    case icl::Command::kVerifyNgd: return "compare the structured transformer with NGD, layer by layer";
    case icl::Command::kTrain: return "train one attention layer against the one-step GD teacher";
    case icl::Command::kImplicitBias: return "direction error to the max-margin solution versus depth";
    case icl::Command::kEvalOod: return "direction error to theta* on shifted feature distributions";
    case icl::Command::kSvmCheck: return "max-margin solver against a 2-d brute-force scan";
  }
  return "";
}

void AddCommonFlags(CLI::App* cmd, Flags& f) {
  struct Opt {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const Opt kOpts[] = {
      {"--seed", "seed", "master RNG seed"},
      {"--out", "out", "output directory (default: CSV to stdout)"},
      {"--d", "d", "feature dimension"},
      {"--n", "n", "context length"},
      {"--layers", "layers", "transformer depth"},
      {"--alpha", "alpha", "NGD rate, or the teacher GD step for train"},
      {"--sigma", "sigma", "feature standard deviation"},
      {"--eta", "eta", "training step size"},
      {"--batch-k", "batch_k", "datasets per training batch"},
      {"--iters", "iters", "training iterations"},
      {"--dist", "dist", "gaussian, laplace, uniform01 (eval-ood also: all)"},
      {"--beta-tilde", "beta_tilde", "score rescale of the structured parameters"},
      {"--trials", "trials", "independent instances"},
      {"--params", "params", "eval-ood: directory with v21.csv and w12.csv"},
      {"--depths", "depths", "implicit-bias: comma-separated depths"},
      {"--threads", "threads", "worker threads (0: all cores)"},
  };
  for (const Opt& o : kOpts) {
    cmd->add_option_function<std::string>(
        o.flag, [&f, key = std::string(o.key)](const std::string& v) { f.values[key] = v; },
        o.help);
  }
  static const Opt kBools[] = {
      {"--center,!--no-center", "center", "uniform01: subtract 0.5 from every entry"},
      {"--project-pattern,!--no-project-pattern", "project_pattern",
       "eval-ood: project trained blocks to scalar multiples of I"},
      {"--full-matrix,!--no-full-matrix", "full_matrix", "train: also run unconstrained training"},
  };
  for (const Opt& o : kBools) {
    cmd->add_flag_function(
        o.flag,
        [&f, key = std::string(o.key)](std::int64_t c) { f.values[key] = c > 0 ? "true" : "false"; },
        o.help);
  }
  cmd->add_option("--config", f.config_path, "flat JSON config; flags take precedence");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw icl::ConfigError("config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-context logistic regression via softmax attention: experiments"};
  app.require_subcommand(1);
  Flags flags;
  for (icl::Command c : {icl::Command::kVerifyNgd, icl::Command::kTrain,
                         icl::Command::kImplicitBias, icl::Command::kEvalOod,
                         icl::Command::kSvmCheck}) {
    AddCommonFlags(app.add_subcommand(std::string(icl::CommandName(c)), Description(c)), flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return icl::kExitUsage;
  }

  try {
    const icl::Command command = icl::ParseCommand(app.get_subcommands().front()->get_name());
    const std::string file = flags.config_path.empty() ? "" : ReadFile(flags.config_path);
    const icl::ExperimentConfig cfg = icl::ResolveConfig(command, file, flags.values);
    const icl::Report report = icl::RunCommand(cfg);
    if (cfg.out.empty()) {
      std::cout << report.files.front().second;
      std::cerr << report.summary;
    } else {
      icl::WriteReport(report, cfg.out);
      std::cout << report.summary;
    }
    return report.exit_code;
  } catch (const icl::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return icl::kExitNumeric;
  } catch (const icl::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return icl::kExitNumeric;
  } catch (const icl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return icl::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return icl::kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return icl::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return icl::kExitNumeric;
  }
}

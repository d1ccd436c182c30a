// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0
#include "icl/config.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <type_traits>
#include <variant>

#include "icl/errors.h"
#include "json.hpp"

namespace icl {
namespace {

using json = nlohmann::json;

// Integer keys share one alternative; the seed is 64-bit on every supported
// target.
static_assert(std::is_same_v<std::uint64_t, std::size_t>);
using Member = std::variant<std::size_t ExperimentConfig::*, double ExperimentConfig::*,
                            bool ExperimentConfig::*,
                            std::string ExperimentConfig::*,
                            std::vector<std::size_t> ExperimentConfig::*>;

struct Field {
  std::string name;
  Member member;
  bool echoed;  // part of the reproducibility header
};

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      {"seed", &ExperimentConfig::seed, true},
      {"out", &ExperimentConfig::out, false},
      {"d", &ExperimentConfig::d, true},
      {"n", &ExperimentConfig::n, true},
      {"layers", &ExperimentConfig::layers, true},
      {"alpha", &ExperimentConfig::alpha, true},
      {"sigma", &ExperimentConfig::sigma, true},
      {"eta", &ExperimentConfig::eta, true},
      {"batch_k", &ExperimentConfig::batch_k, true},
      {"iters", &ExperimentConfig::iters, true},
      {"dist", &ExperimentConfig::dist, true},
      {"center", &ExperimentConfig::center, true},
      {"beta_tilde", &ExperimentConfig::beta_tilde, true},
      {"trials", &ExperimentConfig::trials, true},
      {"project_pattern", &ExperimentConfig::project_pattern, true},
      {"params", &ExperimentConfig::params, true},
      {"depths", &ExperimentConfig::depths, true},
      {"full_matrix", &ExperimentConfig::full_matrix, true},
      {"threads", &ExperimentConfig::threads, false},
  };
  return fields;
}

const Field* FindField(std::string_view name) {
  for (const auto& f : Fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

template <typename T>
T ParseInteger(const std::string& field, std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

double ParseReal(const std::string& field, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(field, "expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

bool ParseBool(const std::string& field, std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(field, "expected true or false, got '" + std::string(s) + "'");
}

std::vector<std::size_t> ParseList(const std::string& field, std::string_view s) {
  std::vector<std::size_t> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(ParseInteger<std::size_t>(field, s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
    if (s.empty()) throw ConfigError(field, "trailing comma");
  }
  return out;
}

std::string JoinList(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

void SetFromString(ExperimentConfig& cfg, const Field& f, const std::string& s) {
  std::visit(
      [&](auto m) {
        using T = std::remove_cvref_t<decltype(cfg.*m)>;
        if constexpr (std::is_same_v<T, std::size_t>) {
          cfg.*m = ParseInteger<T>(f.name, s);
        } else if constexpr (std::is_same_v<T, double>) {
          cfg.*m = ParseReal(f.name, s);
        } else if constexpr (std::is_same_v<T, bool>) {
          cfg.*m = ParseBool(f.name, s);
        } else if constexpr (std::is_same_v<T, std::string>) {
          cfg.*m = s;
        } else {
          cfg.*m = ParseList(f.name, s);
        }
      },
      f.member);
}

void SetFromJson(ExperimentConfig& cfg, const Field& f, const json& v) {
  std::visit(
      [&](auto m) {
        using T = std::remove_cvref_t<decltype(cfg.*m)>;
        if constexpr (std::is_same_v<T, std::size_t>) {
          if (v.is_number_unsigned()) {
            cfg.*m = v.get<T>();
          } else if (v.is_number_integer()) {
            throw ConfigError(f.name, "must be non-negative");
          } else {
            throw ConfigError(f.name, "expected an integer");
          }
        } else if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) throw ConfigError(f.name, "expected a number");
          cfg.*m = v.get<double>();
        } else if constexpr (std::is_same_v<T, bool>) {
          if (!v.is_boolean()) throw ConfigError(f.name, "expected a boolean");
          cfg.*m = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) throw ConfigError(f.name, "expected a string");
          cfg.*m = v.get<std::string>();
        } else {
          if (!v.is_string()) throw ConfigError(f.name, "expected a comma-separated string");
          cfg.*m = ParseList(f.name, v.get<std::string>());
        }
      },
      f.member);
}

json ToJson(const ExperimentConfig& cfg, const Field& f) {
  return std::visit(
      [&](auto m) -> json {
        using T = std::remove_cvref_t<decltype(cfg.*m)>;
        if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
          return JoinList(cfg.*m);
        } else {
          return cfg.*m;
        }
      },
      f.member);
}

void Require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void Validate(const ExperimentConfig& c) {
  constexpr std::size_t kMaxDim = 4096;
  constexpr std::size_t kMaxN = 1'000'000;
  Require(c.d >= 1 && c.d <= kMaxDim, "d", "must be in [1, 4096]");
  Require(c.n >= 1 && c.n <= kMaxN, "n", "must be in [1, 1000000]");
  Require(c.layers <= kMaxN, "layers", "must be at most 1000000");
  Require(std::isfinite(c.alpha) && c.alpha > 0.0, "alpha", "must be positive");
  Require(std::isfinite(c.sigma) && c.sigma > 0.0, "sigma", "must be positive");
  Require(std::isfinite(c.eta) && c.eta >= 0.0, "eta", "must be non-negative");
  Require(c.batch_k >= 1, "batch_k", "must be at least 1");
  Require(std::isfinite(c.beta_tilde) && c.beta_tilde > 0.0, "beta_tilde", "must be positive");
  Require(c.trials >= 1, "trials", "must be at least 1");
  const bool all_ok = c.command == Command::kEvalOod;
  Require(c.dist == "gaussian" || c.dist == "laplace" || c.dist == "uniform01" ||
              (all_ok && c.dist == "all"),
          "dist", all_ok ? "must be gaussian, laplace, uniform01 or all"
                         : "must be gaussian, laplace or uniform01");
  Require(!c.center || c.dist == "uniform01" || c.dist == "all", "center",
          "only applies to the uniform01 family");
  switch (c.command) {
    case Command::kImplicitBias:
      Require(!c.depths.empty(), "depths", "must list at least one depth");
      for (std::size_t i = 0; i < c.depths.size(); ++i) {
        Require(c.depths[i] >= 1, "depths", "depths must be positive");
        Require(i == 0 || c.depths[i] > c.depths[i - 1], "depths",
                "depths must be strictly increasing");
      }
      break;
    case Command::kEvalOod:
      Require(c.layers >= 1, "layers", "must be at least 1");
      break;
    case Command::kSvmCheck:
      Require(c.d == 2, "d", "the brute-force oracle needs d = 2");
      break;
    default:
      break;
  }
}

}  // namespace

std::string_view CommandName(Command c) {
  switch (c) {
    case Command::kVerifyNgd: return "verify-ngd";
    case Command::kTrain: return "train";
    case Command::kImplicitBias: return "implicit-bias";
    case Command::kEvalOod: return "eval-ood";
    case Command::kSvmCheck: return "svm-check";
  }
  return "?";
}

Command ParseCommand(std::string_view name) {
  for (Command c : {Command::kVerifyNgd, Command::kTrain, Command::kImplicitBias,
                    Command::kEvalOod, Command::kSvmCheck}) {
    if (CommandName(c) == name) return c;
  }
  throw ConfigError("command", "unknown subcommand '" + std::string(name) + "'");
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

ExperimentConfig DefaultConfig(Command command) {
  ExperimentConfig c;
  c.command = command;
  switch (command) {
    case Command::kVerifyNgd:
      break;
    case Command::kTrain:
      c.layers = 1;
      c.trials = 1;
      break;
    case Command::kImplicitBias:
      c.n = 40;
      c.d = 5;
      c.depths = {10, 20, 40, 80};
      c.layers = 80;
      c.trials = 1;
      break;
    case Command::kEvalOod:
      c.n = 500;
      c.trials = 10;
      c.dist = "all";
      break;
    case Command::kSvmCheck:
      c.d = 2;
      c.n = 10;
      c.trials = 100;
      break;
  }
  for (const auto& f : Fields()) c.sources[f.name] = "default";
  return c;
}

ExperimentConfig ResolveConfig(Command command, std::string_view file_json,
                               const std::map<std::string, std::string>& flags) {
  ExperimentConfig cfg = DefaultConfig(command);
  if (!file_json.empty()) {
    json doc;
    try {
      doc = json::parse(file_json);
    } catch (const json::parse_error& e) {
      throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      const Field* f = FindField(key);
      if (!f) throw ConfigError(key, "unknown key");
      if (value.is_object() || value.is_array()) {
        throw ConfigError(key, "nested values are not allowed");
      }
      SetFromJson(cfg, *f, value);
      cfg.sources[key] = "file";
    }
  }
  for (const auto& [key, value] : flags) {
    const Field* f = FindField(key);
    if (!f) throw ConfigError(key, "unknown key");
    SetFromString(cfg, *f, value);
    cfg.sources[key] = "flag";
  }
  if (command == Command::kImplicitBias && cfg.sources["depths"] == "default" &&
      cfg.sources["layers"] != "default") {
    // A bare --layers asks for the doubling ladder ending at that depth.
    cfg.depths.clear();
    for (std::size_t l = cfg.layers; l >= 1 && cfg.depths.size() < 4; l /= 2) {
      cfg.depths.insert(cfg.depths.begin(), l);
    }
  }
  Validate(cfg);
  if (command == Command::kImplicitBias) cfg.layers = cfg.depths.back();
  return cfg;
}

std::string ExperimentConfig::Header() const {
  json obj = json::object();
  for (const auto& f : Fields()) {
    if (f.echoed) obj[f.name] = ToJson(*this, f);
  }
  return "# icl_lab " + std::string(CommandName(command)) + " " + obj.dump() + "\n";
}

}  // namespace icl

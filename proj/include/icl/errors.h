// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ICL_ERRORS_H_
#define ICL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icl {

// Bad shapes, empty inputs, out-of-range scalars.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller-side precondition on the data itself was violated (for example a
// feature exceeding the declared infinity-norm bound).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite intermediate or result. `index` is the offending coordinate or
// iteration when one is known, otherwise npos.
class NumericError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit NumericError(const std::string& what, std::size_t index = npos)
      : std::runtime_error(what), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// The hard-margin problem has no solution (data not linearly separable).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace icl

#endif  // ICL_ERRORS_H_

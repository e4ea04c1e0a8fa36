#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace netmon {

/// Bad user-supplied data: malformed files, out-of-range samples, too few points.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value failed validation. `field()` names the offending key.
class ConfigError : public InputError {
 public:
  ConfigError(std::string field, const std::string& what)
      : InputError(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// URL could not be parsed.
class UrlParseError : public InputError {
 public:
  using InputError::InputError;
};

/// An export batch violates its schema (for example a repeated url).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

/// A ratio was requested over an empty population.
class UndefinedFractionError : public InputError {
 public:
  using InputError::InputError;
};

/// An iterative solver stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_iterate, double last_residual)
      : std::runtime_error(what), last_iterate_(last_iterate), last_residual_(last_residual) {}

  double last_iterate() const noexcept { return last_iterate_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_iterate_;
  double last_residual_;
};

}  // namespace netmon

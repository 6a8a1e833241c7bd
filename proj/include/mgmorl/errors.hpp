#pragma once

#include <stdexcept>
#include <string>

namespace mgmorl {

/// Argument outside an operation's domain (negative demand, bad weights, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or incomplete time-series / CSV data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value violating a type invariant. `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mgmorl

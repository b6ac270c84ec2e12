#pragma once

#include <stdexcept>
#include <string>

namespace freqbin {

// Bad numeric input: out-of-range values, non-normalized states, broken
// preconditions of an operation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse, e.g. passing a state expressed in the wrong basis.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Energy conservation cannot be satisfied for the requested wavelengths.
class InfeasibleWavelengthError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// CAR is a ratio to the accidental rate; it is undefined at zero accidentals.
class UndefinedCarError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Normal equations of a fit are singular; no covariance can be reported.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset file. Carries the file line and the offending column/field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& message, int line, std::string field)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", field '" + field + "')"),
        line_(line),
        field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// Invalid configuration file entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line, std::string key)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", key '" + key + "')"),
        line_(line),
        key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace freqbin

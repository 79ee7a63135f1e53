#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridshare {

// Base for everything thrown on purpose by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or an unsupported request. CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Request exceeds a hard capability bound (e.g. exact core check past 16 houses).
class CapabilityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Malformed or inconsistent input data. CLI maps this to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// Parse failure with a 1-based line number for the offending record.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Numerical failure: degenerate series, non-convergent fit, empty curve. Exit code 4.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Model estimation failed; keeps the best objective value seen for diagnostics.
class FitError : public NumericError {
 public:
  FitError(const std::string& what, double best_objective)
      : NumericError(what), best_objective_(best_objective) {}
  double best_objective() const { return best_objective_; }

 private:
  double best_objective_;
};

}  // namespace gridshare

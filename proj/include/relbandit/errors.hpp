#pragma once

#include <stdexcept>
#include <string>

namespace relbandit {

/// Relation graph violates its structural invariants.
class InvalidGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dataset bundle failed validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulated feedback probability fell outside [0, 1]; the user features do
/// not match the catalog.
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown key, malformed value or inconsistent setting in a configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV or TSV input; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace relbandit

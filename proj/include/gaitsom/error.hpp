#pragma once

#include <stdexcept>
#include <string>

namespace gaitsom {

/// Malformed input text (bad number, NaN angle, wrong column count).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}

  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_ = 0;
};

/// Input is well-formed text but violates the dataset schema.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Operation called on an object in the wrong state (e.g. untrained map).
class StateError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace gaitsom

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rrm {

// Malformed or unusable input data (exit code 2 in the CLI).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A numerical routine could not reach its tolerance (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  // Best residual / accumulated error estimate at the point of failure.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace rrm

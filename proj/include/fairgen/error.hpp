#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Training produced a NaN or infinite loss.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairgen

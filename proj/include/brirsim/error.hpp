#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brirsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Setup-file syntax or schema problem. Carries a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary or text container (HRTF set, WAVE file, dataset spec).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Signal analysis could not produce a result (e.g. too little decay range).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace brirsim

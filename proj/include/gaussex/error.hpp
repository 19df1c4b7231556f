#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaussex {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A call violates an operation's preconditions (bad mesh, missing constant, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A model specification is internally inconsistent.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even at the largest jitter of the schedule.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double jitter)
      : Error("matrix is not positive definite (pivot " + std::to_string(pivot) +
              ", jitter " + std::to_string(jitter) + ")"),
        pivot_(pivot),
        jitter_(jitter) {}

  std::size_t pivot() const noexcept { return pivot_; }
  double jitter() const noexcept { return jitter_; }

 private:
  std::size_t pivot_;
  double jitter_;
};

/// Configuration / record file could not be parsed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error(format(line, field, what)), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field, const std::string& what) {
    std::string msg = "parse error";
    if (line > 0) msg += " at line " + std::to_string(line);
    if (!field.empty()) msg += " (field '" + field + "')";
    return msg + ": " + what;
  }

  std::size_t line_;
  std::string field_;
};

}  // namespace gaussex

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperbmc {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed `.kr`, formula, or QCIR text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class ValidationKind {
  kNonTotal,
  kHaltNotAbsorbing,
  kDanglingReference,
  kDuplicate,
  kMissing,
};

/// A structural invariant of a Kripke structure or formula does not hold.
class ValidationError : public Error {
 public:
  ValidationError(ValidationKind kind, std::string subject, const std::string& message)
      : Error(message), kind_(kind), subject_(std::move(subject)) {}

  ValidationKind kind() const noexcept { return kind_; }
  /// Name of the offending state, proposition, or variable.
  const std::string& subject() const noexcept { return subject_; }

 private:
  ValidationKind kind_;
  std::string subject_;
};

/// Brute-force enumeration would exceed its cap.
class ExplosionGuard : public Error {
 public:
  explicit ExplosionGuard(std::size_t count)
      : Error("trace prefix enumeration exceeds cap (" + std::to_string(count) + " prefixes)"),
        count_(count) {}

  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

/// The builtin solver ran into its node budget.
class ResourceLimit : public Error {
 public:
  explicit ResourceLimit(std::size_t nodes)
      : Error("solver node limit exceeded (" + std::to_string(nodes) + " nodes)"), nodes_(nodes) {}

  std::size_t nodes() const noexcept { return nodes_; }

 private:
  std::size_t nodes_;
};

/// Invalid request to the checker (bad bounds, missing models, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Something that should be impossible happened: encoder or solver bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// A decoded witness is not a path of its structure.
class InvalidWitness : public InternalError {
 public:
  using InternalError::InternalError;
};

/// The external solver command could not be started.
class SolverNotFound : public Error {
 public:
  using Error::Error;
};

class Timeout : public Error {
 public:
  explicit Timeout(double seconds)
      : Error("external solver timed out after " + std::to_string(seconds) + " s"), seconds_(seconds) {}
  double seconds() const noexcept { return seconds_; }

 private:
  double seconds_;
};

/// Neither the exit status nor the first output line carried a verdict.
class UnparsableOutput : public Error {
 public:
  explicit UnparsableOutput(std::string head)
      : Error("unparsable solver output: " + head), head_(std::move(head)) {}
  const std::string& head() const noexcept { return head_; }

 private:
  std::string head_;
};

}  // namespace hyperbmc

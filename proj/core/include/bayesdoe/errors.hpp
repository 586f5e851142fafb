#pragma once

#include <stdexcept>
#include <string>

namespace bayesdoe {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: wrong dimension, non-finite value, violated precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// User data failed validation (out-of-bounds rows, bad roles, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Matrix factorization failed even after jitter escalation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A CSV file lacks a required column or has an unusable header.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (CSV cell, JSON document).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Persisted document has an incompatible schema_version.
class MigrationError : public Error {
 public:
  using Error::Error;
};

/// Optimistic-concurrency failure: the persisted revision moved.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& what, long long current_revision)
      : Error(what), current_revision_(current_revision) {}
  long long current_revision() const noexcept { return current_revision_; }

 private:
  long long current_revision_;
};

}  // namespace bayesdoe

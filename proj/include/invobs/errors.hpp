#pragma once

#include <stdexcept>
#include <string>

namespace invobs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live on different groups.
class GroupMismatch : public Error {
 public:
  using Error::Error;
};

/// log() was asked for an element whose rotation angle is within the cut
/// tolerance of pi; exponential coordinates are not meaningful there.
class AtCutLocus : public Error {
 public:
  using Error::Error;
};

class SingularBasis : public Error {
 public:
  using Error::Error;
};

/// The linearized pair (A, C) has an observability matrix of deficient rank.
class NotObservable : public Error {
 public:
  NotObservable(const std::string& what, int rank, int dim)
      : Error(what), rank_(rank), dim_(dim) {}
  int rank() const { return rank_; }
  int dim() const { return dim_; }

 private:
  int rank_;
  int dim_;
};

/// A vector field evaluated to a non-finite value during integration.
class StepRejected : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario file. Carries the 1-based line when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A well-formed input breached a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace invobs

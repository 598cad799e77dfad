#pragma once

#include <stdexcept>
#include <string>

namespace bregcvx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the open domain of a divergence family.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, long index)
      : Error(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// Matrix or vector dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A matrix has columns outside the range of the operator it is paired with.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An iterative solver produced a non-finite value.
class DivergedError : public Error {
 public:
  using Error::Error;
};

/// Malformed input argument (bad assignment row, nonpositive budget, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace bregcvx

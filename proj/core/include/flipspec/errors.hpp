#pragma once

#include <stdexcept>
#include <string>

namespace flipspec {

// Every failure raised by the library derives from Error, so callers that do
// not care about the category can catch a single type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (e.g. theta outside [-pi, pi]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid numeric parameter (gamma outside (1,2), degenerate grid, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Quadrature too coarse for the requested coefficient band.
class AliasingError : public Error {
 public:
  using Error::Error;
};

// Dense materialization refused because of the size guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Vector or matrix length does not match the operator.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Structural precondition violated (odd sizes where even are required, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public Error {
 public:
  using Error::Error;
};

// A preconditioner symbol vanishes where it must be inverted.
class PoleError : public Error {
 public:
  using Error::Error;
};

// Cholesky factorization hit a non-positive pivot.
class NotSpdError : public Error {
 public:
  NotSpdError(const std::string& what, std::size_t pivot_index, double pivot)
      : Error(what), pivot_index_(pivot_index), pivot_(pivot) {}
  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_index_;
  double pivot_;
};

// A circulant eigen-tensor that is not strictly positive.
class IndefiniteError : public Error {
 public:
  using Error::Error;
};

// Krylov operator misbehaves (fails the symmetry probe, unrecoverable breakdown).
class OperatorError : public Error {
 public:
  using Error::Error;
};

}  // namespace flipspec

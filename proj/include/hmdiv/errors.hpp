#pragma once

#include <stdexcept>
#include <string>

namespace hmdiv {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 2 (validation error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A unit index outside [0, N).
class InvalidSubsystem : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Matrix that is not a density matrix (or observable) of the given shape.
class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidHypergraph : public Error {
 public:
  using Error::Error;
};

/// Raised by hermitize_basis when a symmetrized matrix vanishes.
class DegeneratePair : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration or dense construction would exceed a size guard.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance. Not a validation error:
/// the CLI maps it to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmdiv

#pragma once

#include <stdexcept>
#include <string>

namespace palm_forge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands or inputs belong to different groups.
class DomainMismatch : public Error {
 public:
  using Error::Error;
};

/// A displacement table lacks an entry that an operation needs.
class IncompleteTable : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (e.g. non-simple input).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The stored window is too small for the requested read-off; widen it.
class InsufficientWindow : public Error {
 public:
  using Error::Error;
};

/// A functional reaches outside the core sub-window, so boundary
/// truncation would bias the estimate.
class BiasError : public Error {
 public:
  using Error::Error;
};

/// A scenario sanity gate (e.g. sub-linear growth) rejected the run.
class GateFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace palm_forge

#pragma once

#include <stdexcept>
#include <string>

namespace cssdpp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Requested rank exceeds the numerical rank of the data.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A mathematical invariant failed to hold (usually a numerical breakdown).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration or materialization would exceed the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Prescribed diagonal / spectrum targets admit no solution.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampler ran out of attempts.
class RejectionBudgetError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace cssdpp

#pragma once

#include <stdexcept>
#include <string>

namespace alasso {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent caller input: bad dimensions, out-of-range
// parameters, missing or ill-typed config fields.
struct InvalidInputError : Error {
  using Error::Error;
};

// A cosupport of the requested size admits no nonzero signal for the given
// analysis operator (subset redraws exhausted).
struct InfeasibleCosupportError : Error {
  using Error::Error;
};

// Numerical breakdown: factorization failure, non-finite iterates, or a
// linear-solve residual violating its contract.
struct NumericError : Error {
  using Error::Error;
};

// A certification routine needs more trace than was recorded (stride != 1,
// or fewer iterations than the requested window).
struct InsufficientTraceError : Error {
  using Error::Error;
};

// No certified reference solution is available for a check that needs one.
struct ReferenceUnavailableError : Error {
  using Error::Error;
};

// File or serialization problem (unreadable path, unparsable JSON/CSV).
struct IoError : Error {
  using Error::Error;
};

}  // namespace alasso

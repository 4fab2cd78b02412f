#pragma once

#include <stdexcept>
#include <string>

namespace resq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// linalg
struct NonHermitian : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InvalidState : Error { using Error::Error; };

// convex
struct NotSolved : Error { using Error::Error; };
struct MalformedProgram : Error { using Error::Error; };

// resource sets
struct OutOfRange : Error { using Error::Error; };
struct UnknownLabel : Error { using Error::Error; };
struct NotOrthogonal : Error { using Error::Error; };

// measures
struct EmptySet : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct EmptyLadder : Error { using Error::Error; };

// bounds
struct OutOfRegion : Error { using Error::Error; };
struct AssertionFailure : Error { using Error::Error; };

// twirl
struct PreconditionFailed : Error { using Error::Error; };
struct NoComplement : Error { using Error::Error; };
struct NotEigenvector : Error { using Error::Error; };
struct CatalogMiss : Error { using Error::Error; };

}  // namespace resq

#ifndef AMAT_ERRORS_H
#define AMAT_ERRORS_H

#include <stdexcept>
#include <string>

namespace amat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition or argument violation (non-SPD tensor, bad sizes, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

// Mesh fails conformity/orientation checks, or a file does not parse.
struct StructuralError : Error {
  using Error::Error;
};

// Point location failed beyond tolerance.
struct NotFound : Error {
  using Error::Error;
};

// A vertex patch cannot supply enough points for the quadratic fit.
struct InsufficientPatch : Error {
  using Error::Error;
};

// Linear solver did not converge.
struct SolverError : Error {
  using Error::Error;
};

}  // namespace amat

#endif

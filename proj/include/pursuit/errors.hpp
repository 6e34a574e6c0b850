#pragma once

#include <stdexcept>

namespace pursuit {

/// Base class for all pursuit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector lengths disagree (signal vs atom, atom vs atom, ...).
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A candidate atom lies numerically inside the current span.
struct DependentAtom : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct EmptyDecomposition : Error {
  using Error::Error;
};

/// No admissible atom remains for forward selection.
struct Exhausted : Error {
  using Error::Error;
};

/// A backward target cannot be reached under the active constraints.
struct Infeasible : Error {
  using Error::Error;
};

/// The oracle's Gram matrix is numerically singular.
struct IllConditioned : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// Bad configuration or argument values.
struct InvalidArgument : Error {
  using Error::Error;
};

}  // namespace pursuit

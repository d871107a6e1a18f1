#pragma once

#include <stdexcept>
#include <string>

namespace weyl {

// Base class for all structured errors thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A weight was given in a basis that does not belong to the form/root system
// it is paired against.
struct BasisMismatchError : Error {
  using Error::Error;
};

// A custom metric scale failed the rationality requirement.
struct NotRationalMetricError : Error {
  explicit NotRationalMetricError(const std::string& msg)
      : Error("not a rational metric: " + msg) {}
};

// Quotient-formula character evaluation rejected a torus point that sits too
// close to a chamber wall.  `min_wall_distance` is in turns.
struct WallTooCloseError : Error {
  double min_wall_distance;
  double tolerance;
  WallTooCloseError(double dist, double tol)
      : Error("torus point within " + std::to_string(dist) +
              " turns of a chamber wall (tolerance " + std::to_string(tol) +
              "); use the stable or series evaluation instead"),
        min_wall_distance(dist),
        tolerance(tol) {}
};

struct PreconditionError : Error {
  using Error::Error;
};

// An exact-arithmetic identity that must hold by construction failed.  This
// indicates a bug, not a user error.
struct InvariantViolationError : Error {
  using Error::Error;
};

// Series truncation order too small for the requested tolerance.
struct TruncationError : Error {
  int required_order;
  TruncationError(int required, const std::string& msg)
      : Error(msg), required_order(required) {}
};

// Quadrature grid refinement failed to converge.
struct ResolutionError : Error {
  using Error::Error;
};

// Monte-Carlo variance too high for a reliable estimate.
struct SampleSizeError : Error {
  using Error::Error;
};

// A term budget or memory budget was exceeded.
struct ResourceError : Error {
  long long term_count;
  ResourceError(long long count, const std::string& msg)
      : Error(msg), term_count(count) {}
};

}  // namespace weyl

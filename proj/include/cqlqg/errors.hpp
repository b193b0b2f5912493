#pragma once

#include <stdexcept>
#include <string>

namespace cqlqg {

// Base type for every failure the library raises, so callers can catch one thing.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs whose shapes or parities are inconsistent.
struct DimensionError : Error {
  using Error::Error;
};

// A mathematical precondition (symmetry, symplecticity, stabilizing start, ...)
// was violated by an input value of the right shape.
struct PreconditionError : Error {
  using Error::Error;
};

// An operation that needs a Hurwitz matrix received an unstable one.
struct UnstableError : Error {
  UnstableError(const std::string& what, double abscissa)
      : Error(what), spectral_abscissa(abscissa) {}
  double spectral_abscissa;
};

// Random search exhausted its sampling budget without a stabilizing draw.
struct StabilizationError : Error {
  StabilizationError(const std::string& what, long tries)
      : Error(what), tries_used(tries) {}
  long tries_used;
};

// File / format problems in the io layer.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace cqlqg

#pragma once

#include <stdexcept>
#include <string>

namespace edgewise {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct BoundaryWrapError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct CoverageError : Error { using Error::Error; };
struct WrapError : Error { using Error::Error; };
struct RationalizationError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Tail error carries the bound that was exceeded.
struct TailError : Error {
  double bound;
  TailError(const std::string& what, double b) : Error(what), bound(b) {}
};

}  // namespace edgewise

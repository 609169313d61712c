#pragma once

#include <stdexcept>
#include <string>

namespace frameext {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a dense materialization would exceed the configured entry cap.
struct CapExceeded : Error {
  using Error::Error;
};

/// Raised on malformed or mismatched mask files and empty rasterizations.
struct MaskError : Error {
  using Error::Error;
};

/// Raised when the low-rank stage cannot be sized within min(N_omega, N_lambda).
struct SolverError : Error {
  using Error::Error;
};

}  // namespace frameext

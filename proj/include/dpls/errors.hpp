#pragma once

#include <stdexcept>
#include <string>

namespace dpls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad files, mismatched grids, empty regions).
/// The CLI maps it to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configuration that cannot be satisfied (combinatorial guards, infeasible layouts,
/// penalty regimes). The CLI maps it to exit code 3.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// The robust noise scale collapsed to zero. The location estimate is still carried so
/// callers that supply sigma^2 themselves can reuse it.
class DegenerateScaleError : public InputError {
 public:
  DegenerateScaleError(const std::string& what, double mu0) : InputError(what), mu0_(mu0) {}
  double mu0() const noexcept { return mu0_; }

 private:
  double mu0_;
};

}  // namespace dpls

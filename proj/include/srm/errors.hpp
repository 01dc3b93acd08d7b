#pragma once

#include <stdexcept>
#include <string>

namespace srm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejected inputs: bad units, mismatched grids, out-of-range quantum numbers.
struct ValidationError : Error {
  using Error::Error;
};

// Solver or quadrature failures: non-convergence, singular normal equations.
struct NumericalError : Error {
  using Error::Error;
};

// Source dipole too close to the coil wire for the flux integral.
struct SingularConfigError : NumericalError {
  using NumericalError::NumericalError;
};

// Seed-guess heuristics could not find enough structure in the waveform.
struct HeuristicError : Error {
  using Error::Error;
};

}  // namespace srm

#pragma once

#include <stdexcept>
#include <string>

namespace memhom {

/// Invalid user input: bad config file, violated parameter invariant.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mesh construction or validation failure (quality bound, topology, ...).
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Linear solver failure (non-convergence, breakdown).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A "cannot happen" condition; indicates a bug, not bad input.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace memhom

#pragma once

#include <span>

#include "memhom/mat2.hpp"
#include "memhom/mesh.hpp"
#include "memhom/sparse.hpp"

namespace memhom {

/// Bulk and interface material constants. Conductivities and capacities are
/// strictly positive; the interface conductivity beta may be zero (the
/// effective tensor stays positive definite without it).
struct CoefficientSet {
  double lambdaInt = 10.0;
  double lambdaOut = 1.0;
  double sigmaInt = 1.0;
  double sigmaOut = 1.0;
  double alpha = 1.0;
  double beta = 0.1;

  double lambda(Phase p) const { return p == Phase::Interior ? lambdaInt : lambdaOut; }
  double sigma(Phase p) const { return p == Phase::Interior ? sigmaInt : sigmaOut; }
  double lambdaMin() const { return lambdaInt < lambdaOut ? lambdaInt : lambdaOut; }

  void validate() const;
};

/// The matrix + constraint bookkeeping bundle produced by assembly.
struct SparseSystem {
  SparseMatrix matrix;
  ConstraintMap constraints;
};

// P1 bilinear forms, exact quadrature. Gradients of P1 shape functions are
// elementwise constant, so the stiffness entries are exact; mass uses the
// standard consistent (area/12) [[2,1,1],[1,2,1],[1,1,2]] element matrix.
SparseMatrix assembleBulkStiffness(const MeshView& mesh, double lambdaInt,
                                   double lambdaOut);
SparseMatrix assembleBulkMass(const MeshView& mesh, double sigmaInt, double sigmaOut);

/// Stiffness with a constant 2x2 tensor coefficient (phase tags ignored);
/// used by the homogenized problem.
SparseMatrix assembleBulkStiffnessTensor(const MeshView& mesh, const Mat2& tensor);

// Surface forms on the interface polygon. The tangential gradient of the P1
// trace along a straight edge of length L is the finite difference along the
// edge: element stiffness (1/L) [[1,-1],[-1,1]], element mass (L/6) [[2,1],[1,2]].
// Coefficients (beta, eps*alpha, ...) are applied by the caller.
SparseMatrix assembleSurfaceStiffness(std::span<const Vec2> nodes,
                                      std::span<const InterfaceEdge> edges);
SparseMatrix assembleSurfaceMass(std::span<const Vec2> nodes,
                                 std::span<const InterfaceEdge> edges);

inline SparseMatrix assembleSurfaceStiffness(const MeshView& mesh) {
  return assembleSurfaceStiffness(mesh.nodes, mesh.edges);
}
inline SparseMatrix assembleSurfaceMass(const MeshView& mesh) {
  return assembleSurfaceMass(mesh.nodes, mesh.edges);
}

/// Lumped unit-density volume weights (row sums of the P1 mass matrix);
/// these are the weights of the zero-mean constraint.
std::vector<double> lumpedVolumeWeights(const MeshView& mesh);

/// Per-triangle gradient of a P1 nodal field.
Vec2 elementGradient(const MeshView& mesh, int tri, std::span<const double> u);

enum class ConstraintMode { Periodic, Dirichlet, ZeroMean };

ConstraintMap periodicMap(const CellMesh& mesh);
ConstraintMap dirichletMap(const DomainMesh& mesh);

/// Fold the lumped volume weights onto the reduced dofs and attach them as
/// the zero-mean multiplier row.
void attachZeroMean(ConstraintMap& map, const MeshView& mesh);

/// Spec-level convenience: reduce a full system under one constraint mode.
SparseSystem applyConstraints(const SparseSystem& system, ConstraintMode mode,
                              const CellMesh* cell, const DomainMesh* domain);

}  // namespace memhom

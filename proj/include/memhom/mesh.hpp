#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memhom/geometry.hpp"

namespace memhom {

struct Tri {
  std::array<int, 3> v{-1, -1, -1};
  Phase phase = Phase::Exterior;
};

/// Straight interface segment with endpoints on the interface. Oriented so
/// that rotating the tangent (b - a) by -90 degrees gives the stored unit
/// normal, which points into the exterior phase; edges therefore run
/// counterclockwise around an inclusion.
struct InterfaceEdge {
  int a = -1;
  int b = -1;
  Vec2 normal;
};

enum NodeBoundaryBits : std::uint8_t {
  BndLeft = 1,
  BndRight = 2,
  BndBottom = 4,
  BndTop = 8,
};

/// Interface-fitted, phase-tagged triangulation of the unit cell Y with
/// periodic node pairing between opposite faces.
struct CellMesh {
  std::vector<Vec2> nodes;
  std::vector<Tri> tris;
  std::vector<InterfaceEdge> interfaceEdges;
  std::vector<std::uint8_t> nodeBoundary;          // bitmask per node
  std::vector<int> hMate;                          // right-face node -> left-face node
  std::vector<int> vMate;                          // top-face node -> bottom-face node
  std::vector<std::pair<int, int>> periodicPairs;  // slave -> master
  double h = 0.0;                                  // max element diameter
  int gridN = 0;                                   // background lattice resolution
  // Test mode for laminate geometries whose interface touches the cell
  // boundary; skips the clearance and single-loop invariants.
  bool relaxedGeometry = false;
};

/// eps-scaled tiling of a cell mesh over Omega = (0,1)^2 with merged copy
/// faces and Dirichlet tagging of the domain boundary.
struct DomainMesh {
  std::vector<Vec2> nodes;
  std::vector<Tri> tris;
  std::vector<InterfaceEdge> interfaceEdges;
  std::vector<int> dirichletNodes;  // sorted
  std::vector<std::uint8_t> isDirichlet;
  double eps = 1.0;
  int n = 1;
  std::vector<std::array<int, 2>> cellIndexOfTri;
  std::vector<int> cellTriOfTri;    // source cell triangle per triangle
  std::vector<int> cellNodeOfNode;  // source cell node per node
  double h = 0.0;
};

/// Uniform element access over cell and domain meshes for assembly code.
struct MeshView {
  std::span<const Vec2> nodes;
  std::span<const Tri> tris;
  std::span<const InterfaceEdge> edges;

  MeshView(const CellMesh& m) : nodes(m.nodes), tris(m.tris), edges(m.interfaceEdges) {}
  MeshView(const DomainMesh& m) : nodes(m.nodes), tris(m.tris), edges(m.interfaceEdges) {}
};

struct MeshQualityReport {
  double minAngleDeg = 0.0;
  double maxAngleDeg = 0.0;
  double h = 0.0;
  int nodeCount = 0;
  int triCount = 0;
  int interfaceEdgeCount = 0;
  double interfaceLength = 0.0;
  double interiorArea = 0.0;
  double exteriorArea = 0.0;
  double eps = 1.0;
};

struct CellMeshOptions {
  double snapTol = 0.30;      // node-to-interface snap threshold, in units of the grid spacing
  double minAngleDeg = 20.0;  // quality gate
  int smoothingSweeps = 2;
};

/// Build an interface-fitted triangulation of the unit cell: structured
/// background lattice, nodes near the interface snapped onto it, crossed
/// lattice triangles re-split along interface chords.
CellMesh buildCellMesh(const InclusionShape& shape, double hTarget,
                       const CellMeshOptions& opts = {});

/// Plain structured triangulation without an inclusion (all exterior phase).
CellMesh buildEmptyCellMesh(double hTarget);

/// Relaxed-geometry laminate: a vertical stripe (xLeft, xRight) of interior
/// phase whose straight interfaces touch the cell boundary and close into
/// loops only through the periodic identification. Assembly-verification
/// use only.
CellMesh buildLaminateCellMesh(double xLeft, double xRight, double hTarget);

/// n x n copies of the cell mesh scaled by eps = 1/n, with duplicate nodes
/// on shared copy faces merged through the periodic pairing.
DomainMesh tileDomainMesh(const CellMesh& cell, int n);

/// Order interface edges into closed loops (lists of edge indices). Node
/// identification goes through the periodic pairing for cell meshes so that
/// relaxed-geometry loops close across the cell boundary. Throws MeshError
/// on an open loop.
std::vector<std::vector<int>> interfaceLoops(const CellMesh& mesh);
std::vector<std::vector<int>> interfaceLoops(const DomainMesh& mesh);

MeshQualityReport meshQualityReport(const MeshView& mesh, double eps = 1.0);

/// Check all structural invariants; throws MeshError with a description on
/// the first violation. Distance-based checks run only when a shape is given.
void validateCellMesh(const CellMesh& mesh, const InclusionShape* shape);
void validateDomainMesh(const DomainMesh& mesh, const CellMesh& cell,
                        const InclusionShape* shape);

double triangleArea(const Vec2& a, const Vec2& b, const Vec2& c);

// Plain-text serialization. The domain writer accepts an optional nodal
// field column; loaders validate structural invariants before returning.
void saveCellMesh(const std::string& path, const CellMesh& mesh);
CellMesh loadCellMesh(const std::string& path, const InclusionShape* shape);
void saveDomainMesh(const std::string& path, const DomainMesh& mesh,
                    const std::vector<double>* field = nullptr);

}  // namespace memhom

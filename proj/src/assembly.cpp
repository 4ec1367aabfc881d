#include "memhom/assembly.hpp"

#include <cmath>
#include <sstream>

namespace memhom {

void CoefficientSet::validate() const {
  std::ostringstream bad;
  auto positive = [&](double v, const char* key) {
    if (!(v > 0.0)) bad << "coefficients." << key << " must be > 0 (got " << v << "); ";
  };
  positive(lambdaInt, "lambda_int");
  positive(lambdaOut, "lambda_out");
  positive(sigmaInt, "sigma_int");
  positive(sigmaOut, "sigma_out");
  positive(alpha, "alpha");
  if (!(beta >= 0.0)) bad << "coefficients.beta must be >= 0 (got " << beta << "); ";
  const std::string msg = bad.str();
  if (!msg.empty()) throw ConfigError(msg);
}

namespace {

struct ElementGeometry {
  Vec2 grad[3];  // P1 shape gradients
  double area;
};

ElementGeometry elementGeometry(const MeshView& mesh, const Tri& t, int triIndex) {
  const Vec2 &p0 = mesh.nodes[t.v[0]], &p1 = mesh.nodes[t.v[1]], &p2 = mesh.nodes[t.v[2]];
  const double area = triangleArea(p0, p1, p2);
  if (area < 1e-14) {
    throw MeshError("assembly: degenerate triangle " + std::to_string(triIndex) +
                    " (area " + std::to_string(area) + ")");
  }
  auto rot90 = [](Vec2 v) { return Vec2{-v.y, v.x}; };
  ElementGeometry g;
  g.area = area;
  g.grad[0] = rot90(p2 - p1) / (2.0 * area);
  g.grad[1] = rot90(p0 - p2) / (2.0 * area);
  g.grad[2] = rot90(p1 - p0) / (2.0 * area);
  return g;
}

}  // namespace

Vec2 elementGradient(const MeshView& mesh, int tri, std::span<const double> u) {
  const Tri& t = mesh.tris[tri];
  const ElementGeometry g = elementGeometry(mesh, t, tri);
  Vec2 grad{0.0, 0.0};
  for (int k = 0; k < 3; ++k) grad += g.grad[k] * u[t.v[k]];
  return grad;
}

SparseMatrix assembleBulkStiffness(const MeshView& mesh, double lambdaInt,
                                   double lambdaOut) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.tris.size());
  for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti) {
    const Tri& t = mesh.tris[ti];
    const ElementGeometry g = elementGeometry(mesh, t, ti);
    const double lam = t.phase == Phase::Interior ? lambdaInt : lambdaOut;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trip.push_back({t.v[i], t.v[j], lam * g.area * g.grad[i].dot(g.grad[j])});
      }
    }
  }
  return SparseMatrix::fromTriplets(static_cast<int>(mesh.nodes.size()), std::move(trip));
}

SparseMatrix assembleBulkStiffnessTensor(const MeshView& mesh, const Mat2& tensor) {
  // Symmetrize so the assembled matrix is symmetric regardless of roundoff
  // in the input tensor.
  Mat2 a = tensor;
  const double off = 0.5 * (tensor(0, 1) + tensor(1, 0));
  a(0, 1) = a(1, 0) = off;
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.tris.size());
  for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti) {
    const Tri& t = mesh.tris[ti];
    const ElementGeometry g = elementGeometry(mesh, t, ti);
    for (int i = 0; i < 3; ++i) {
      const Vec2 agi = a.apply(g.grad[i]);
      for (int j = 0; j < 3; ++j) {
        trip.push_back({t.v[i], t.v[j], g.area * agi.dot(g.grad[j])});
      }
    }
  }
  return SparseMatrix::fromTriplets(static_cast<int>(mesh.nodes.size()), std::move(trip));
}

SparseMatrix assembleBulkMass(const MeshView& mesh, double sigmaInt, double sigmaOut) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.tris.size());
  for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti) {
    const Tri& t = mesh.tris[ti];
    const ElementGeometry g = elementGeometry(mesh, t, ti);
    const double sig = t.phase == Phase::Interior ? sigmaInt : sigmaOut;
    const double base = sig * g.area / 12.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trip.push_back({t.v[i], t.v[j], base * (i == j ? 2.0 : 1.0)});
      }
    }
  }
  return SparseMatrix::fromTriplets(static_cast<int>(mesh.nodes.size()), std::move(trip));
}

SparseMatrix assembleSurfaceStiffness(std::span<const Vec2> nodes,
                                      std::span<const InterfaceEdge> edges) {
  std::vector<Triplet> trip;
  trip.reserve(4 * edges.size());
  for (const InterfaceEdge& e : edges) {
    const double len = (nodes[e.b] - nodes[e.a]).norm();
    if (len < 1e-14) throw MeshError("assembly: zero-length interface edge");
    const double w = 1.0 / len;
    trip.push_back({e.a, e.a, w});
    trip.push_back({e.b, e.b, w});
    trip.push_back({e.a, e.b, -w});
    trip.push_back({e.b, e.a, -w});
  }
  return SparseMatrix::fromTriplets(static_cast<int>(nodes.size()), std::move(trip));
}

SparseMatrix assembleSurfaceMass(std::span<const Vec2> nodes,
                                 std::span<const InterfaceEdge> edges) {
  std::vector<Triplet> trip;
  trip.reserve(4 * edges.size());
  for (const InterfaceEdge& e : edges) {
    const double len = (nodes[e.b] - nodes[e.a]).norm();
    if (len < 1e-14) throw MeshError("assembly: zero-length interface edge");
    trip.push_back({e.a, e.a, len / 3.0});
    trip.push_back({e.b, e.b, len / 3.0});
    trip.push_back({e.a, e.b, len / 6.0});
    trip.push_back({e.b, e.a, len / 6.0});
  }
  return SparseMatrix::fromTriplets(static_cast<int>(nodes.size()), std::move(trip));
}

std::vector<double> lumpedVolumeWeights(const MeshView& mesh) {
  std::vector<double> w(mesh.nodes.size(), 0.0);
  for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti) {
    const Tri& t = mesh.tris[ti];
    const double third =
        triangleArea(mesh.nodes[t.v[0]], mesh.nodes[t.v[1]], mesh.nodes[t.v[2]]) / 3.0;
    for (int k = 0; k < 3; ++k) w[t.v[k]] += third;
  }
  return w;
}

ConstraintMap periodicMap(const CellMesh& mesh) {
  return ConstraintMap::periodic(static_cast<int>(mesh.nodes.size()), mesh.periodicPairs);
}

ConstraintMap dirichletMap(const DomainMesh& mesh) {
  return ConstraintMap::dirichlet(static_cast<int>(mesh.nodes.size()), mesh.dirichletNodes);
}

void attachZeroMean(ConstraintMap& map, const MeshView& mesh) {
  map.meanWeights = map.reduceVectorSum(lumpedVolumeWeights(mesh));
}

SparseSystem applyConstraints(const SparseSystem& system, ConstraintMode mode,
                              const CellMesh* cell, const DomainMesh* domain) {
  switch (mode) {
    case ConstraintMode::Periodic: {
      if (cell == nullptr) throw InternalError("applyConstraints: periodic mode needs a cell mesh");
      ConstraintMap map = periodicMap(*cell);
      return {map.reduceMatrix(system.matrix), std::move(map)};
    }
    case ConstraintMode::Dirichlet: {
      if (domain == nullptr) {
        throw InternalError("applyConstraints: dirichlet mode needs a domain mesh");
      }
      ConstraintMap map = dirichletMap(*domain);
      return {map.reduceMatrix(system.matrix), std::move(map)};
    }
    case ConstraintMode::ZeroMean: {
      SparseSystem out = system;
      if (cell != nullptr) {
        attachZeroMean(out.constraints, MeshView(*cell));
      } else if (domain != nullptr) {
        attachZeroMean(out.constraints, MeshView(*domain));
      } else {
        throw InternalError("applyConstraints: zero-mean mode needs a mesh");
      }
      return out;
    }
  }
  throw InternalError("applyConstraints: unknown mode");
}

}  // namespace memhom

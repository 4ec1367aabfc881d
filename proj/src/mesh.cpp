#include "memhom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

namespace memhom {

namespace {

constexpr double kPi = std::numbers::pi;

struct PairHash {
  std::size_t operator()(const std::pair<int, int>& p) const {
    return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^
                                  static_cast<unsigned>(p.second));
  }
};

int latticeId(int n, int i, int j) { return j * (n + 1) + i; }

/// Structured lattice with union-jack diagonals (direction alternating with
/// cell parity), which is mirror-symmetric about the cell center for even n.
void buildLattice(int n, CellMesh& mesh) {
  mesh.gridN = n;
  mesh.nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  mesh.nodeBoundary.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      std::uint8_t b = 0;
      if (i == 0) b |= BndLeft;
      if (i == n) b |= BndRight;
      if (j == 0) b |= BndBottom;
      if (j == n) b |= BndTop;
      mesh.nodeBoundary[latticeId(n, i, j)] = b;
    }
  }
  mesh.tris.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = latticeId(n, i, j);
      const int b = latticeId(n, i + 1, j);
      const int c = latticeId(n, i + 1, j + 1);
      const int d = latticeId(n, i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.tris.push_back({{a, b, c}, Phase::Exterior});
        mesh.tris.push_back({{a, c, d}, Phase::Exterior});
      } else {
        mesh.tris.push_back({{a, b, d}, Phase::Exterior});
        mesh.tris.push_back({{b, c, d}, Phase::Exterior});
      }
    }
  }
}

void buildPeriodicMaps(int n, CellMesh& mesh) {
  const int numNodes = static_cast<int>(mesh.nodes.size());
  mesh.hMate.assign(numNodes, -1);
  mesh.vMate.assign(numNodes, -1);
  for (int j = 0; j <= n; ++j) mesh.hMate[latticeId(n, n, j)] = latticeId(n, 0, j);
  for (int i = 0; i <= n; ++i) mesh.vMate[latticeId(n, i, n)] = latticeId(n, i, 0);
  mesh.periodicPairs.clear();
  for (int v = 0; v < numNodes; ++v) {
    int m = v;
    if (mesh.hMate[m] >= 0) m = mesh.hMate[m];
    if (mesh.vMate[m] >= 0) m = mesh.vMate[m];
    if (m != v) mesh.periodicPairs.emplace_back(v, m);
  }
}

int gridCountForTarget(double hTarget) {
  if (!(hTarget > 0.0) || !(hTarget < 0.5)) {
    throw ConfigError("h_target must lie in (0, 0.5), got " + std::to_string(hTarget));
  }
  int n = static_cast<int>(std::ceil(1.0 / hTarget - 1e-12));
  if (n % 2 != 0) ++n;
  return n;
}

double maxDiameter(const CellMesh& mesh) {
  double h = 0.0;
  for (const Tri& t : mesh.tris) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 d = mesh.nodes[t.v[k]] - mesh.nodes[t.v[(k + 1) % 3]];
      h = std::max(h, d.norm());
    }
  }
  return h;
}

double minAngleOf(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  auto angle = [](double opp, double s1, double s2) {
    double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    cosv = std::clamp(cosv, -1.0, 1.0);
    return std::acos(cosv);
  };
  return std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)}) * 180.0 / kPi;
}

/// Cut-mesh scaffolding for one inclusion. Level values are kept in lattice
/// units; when the circle center sits exactly on a lattice node the offsets
/// are integers, so snap and crossing decisions are bitwise identical for
/// all mirror images of a node and the cut topology inherits the symmetry
/// of the geometry.
struct Cutter {
  const InclusionShape& shape;
  int n;
  double g;
  double rho;             // radius in lattice units
  bool centered;          // circle center on a lattice node
  int ci = 0, cj = 0;     // center lattice indices if centered
  double cx, cy;          // center lattice coordinates otherwise

  Cutter(const InclusionShape& s, int n_) : shape(s), n(n_), g(1.0 / n_) {
    rho = s.radius() * n;
    const double fx = s.center().x * n, fy = s.center().y * n;
    ci = static_cast<int>(std::lround(fx));
    cj = static_cast<int>(std::lround(fy));
    centered = std::abs(fx - ci) < 1e-12 && std::abs(fy - cj) < 1e-12;
    cx = fx;
    cy = fy;
  }

  double level(int i, int j) const {
    if (centered) {
      const long long di = i - ci, dj = j - cj;
      return std::sqrt(static_cast<double>(di * di + dj * dj)) - rho;
    }
    const double dx = i - cx, dy = j - cy;
    return std::sqrt(dx * dx + dy * dy) - rho;
  }

  Vec2 offset(int i, int j) const {
    if (centered) return {static_cast<double>(i - ci), static_cast<double>(j - cj)};
    return {i - cx, j - cy};
  }

  Vec2 toPhysical(Vec2 off) const {
    return {shape.center().x + g * off.x, shape.center().y + g * off.y};
  }

  /// Radial projection of a lattice node onto the circle.
  Vec2 snapPoint(int i, int j) const {
    const Vec2 u = offset(i, j);
    const double len = std::sqrt(u.squaredNorm());
    return toPhysical(u * (rho / len));
  }

  /// Intersection of lattice edge (i0,j0)-(i1,j1) with the circle; the
  /// endpoints carry strictly opposite level signs, so exactly one root of
  /// the quadratic lies inside the edge.
  Vec2 crossingPoint(int i0, int j0, int i1, int j1) const {
    const Vec2 A = offset(i0, j0);
    const Vec2 D = offset(i1, j1) - A;
    const double a = D.squaredNorm();
    const double b = 2.0 * A.dot(D);
    const double c = A.squaredNorm() - rho * rho;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
      throw InternalError("crossingPoint: no real intersection on a sign-change edge");
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double t1 = q / a;
    double t2 = (q != 0.0) ? c / q : std::numeric_limits<double>::infinity();
    double t;
    const bool ok1 = t1 > 0.0 && t1 < 1.0;
    const bool ok2 = t2 > 0.0 && t2 < 1.0;
    if (ok1 == ok2) {
      throw InternalError("crossingPoint: expected exactly one root inside the edge");
    }
    t = ok1 ? t1 : t2;
    return toPhysical(A + D * t);
  }
};

}  // namespace

double triangleArea(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * (b - a).cross(c - a);
}

CellMesh buildEmptyCellMesh(double hTarget) {
  const int n = gridCountForTarget(hTarget);
  CellMesh mesh;
  buildLattice(n, mesh);
  buildPeriodicMaps(n, mesh);
  mesh.h = maxDiameter(mesh);
  return mesh;
}

CellMesh buildLaminateCellMesh(double xLeft, double xRight, double hTarget) {
  if (!(0.0 < xLeft && xLeft < xRight && xRight < 1.0)) {
    throw ConfigError("laminate stripe bounds must satisfy 0 < xLeft < xRight < 1");
  }
  int n = gridCountForTarget(hTarget);
  // Align the stripe interfaces with lattice columns.
  auto misaligned = [&](double x) {
    const double f = x * n;
    return std::abs(f - std::lround(f)) > 1e-9;
  };
  while ((misaligned(xLeft) || misaligned(xRight)) && n < 4096) n += 2;
  if (misaligned(xLeft) || misaligned(xRight)) {
    throw ConfigError("laminate stripe bounds cannot be aligned with the lattice");
  }
  const int iL = static_cast<int>(std::lround(xLeft * n));
  const int iR = static_cast<int>(std::lround(xRight * n));

  CellMesh mesh;
  buildLattice(n, mesh);
  buildPeriodicMaps(n, mesh);
  mesh.relaxedGeometry = true;
  for (Tri& t : mesh.tris) {
    Vec2 c = (mesh.nodes[t.v[0]] + mesh.nodes[t.v[1]] + mesh.nodes[t.v[2]]) / 3.0;
    t.phase = (c.x > xLeft && c.x < xRight) ? Phase::Interior : Phase::Exterior;
  }
  // Right interface runs upward (normal +e1 into the exterior), left one
  // downward (normal -e1).
  for (int j = 0; j < n; ++j) {
    mesh.interfaceEdges.push_back(
        {latticeId(n, iR, j), latticeId(n, iR, j + 1), {1.0, 0.0}});
    mesh.interfaceEdges.push_back(
        {latticeId(n, iL, j + 1), latticeId(n, iL, j), {-1.0, 0.0}});
  }
  mesh.h = maxDiameter(mesh);
  return mesh;
}

CellMesh buildCellMesh(const InclusionShape& shape, double hTarget,
                       const CellMeshOptions& opts) {
  const int n = gridCountForTarget(hTarget);
  const double g = 1.0 / n;
  if (g > shape.radius() / 2.0) {
    std::ostringstream msg;
    msg << "buildCellMesh: grid spacing " << g << " too coarse to resolve an "
        << "inclusion of radius " << shape.radius() << " (need h <= radius/2)";
    throw MeshError(msg.str());
  }

  CellMesh mesh;
  buildLattice(n, mesh);
  const Cutter cut(shape, n);

  // Node signs: 0 marks nodes snapped onto the interface. Boundary nodes
  // are never snapped.
  std::vector<int> sign(mesh.nodes.size(), 0);
  std::vector<std::uint8_t> snapped(mesh.nodes.size(), 0);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const int id = latticeId(n, i, j);
      const double lv = cut.level(i, j);
      const bool interior = i > 0 && i < n && j > 0 && j < n;
      if (interior && std::abs(lv) < opts.snapTol) {
        snapped[id] = 1;
        sign[id] = 0;
        mesh.nodes[id] = cut.snapPoint(i, j);
      } else {
        sign[id] = lv < 0.0 ? -1 : 1;
      }
    }
  }

  // Crossing points on lattice edges with strictly opposite signs, shared
  // between the two adjacent triangles.
  std::unordered_map<std::pair<int, int>, int, PairHash> crossings;
  auto latticeIJ = [&](int id) { return std::pair<int, int>(id % (n + 1), id / (n + 1)); };
  auto crossingNode = [&](int u, int v) {
    auto key = std::minmax(u, v);
    auto it = crossings.find(key);
    if (it != crossings.end()) return it->second;
    auto [iu, ju] = latticeIJ(u);
    auto [iv, jv] = latticeIJ(v);
    const int id = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(cut.crossingPoint(iu, ju, iv, jv));
    mesh.nodeBoundary.push_back(0);
    sign.push_back(0);
    snapped.push_back(0);
    crossings.emplace(key, id);
    return id;
  };

  std::vector<Tri> outTris;
  outTris.reserve(mesh.tris.size() + 4 * n);
  std::vector<std::pair<int, int>> chords;  // unoriented interface segments
  // Chords between two snapped nodes are interface edges only when the two
  // adjacent triangles lie in different phases.
  std::map<std::pair<int, int>, std::pair<bool, bool>> zeroZero;

  auto pushTri = [&](int a, int b, int c, Phase ph) {
    if (triangleArea(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]) <= 0.0) {
      throw InternalError("buildCellMesh: produced a non-CCW sub-triangle");
    }
    outTris.push_back({{a, b, c}, ph});
  };

  auto quadDiagonalQuality = [&](int a, int b, int c, int d) {
    // min angle over the two triangles of the split (a,b,c) + (a,c,d)
    return std::min(minAngleOf(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]),
                    minAngleOf(mesh.nodes[a], mesh.nodes[c], mesh.nodes[d]));
  };

  for (const Tri& t : mesh.tris) {
    int s[3] = {sign[t.v[0]], sign[t.v[1]], sign[t.v[2]]};
    int pos = 0, neg = 0, zero = 0;
    for (int k = 0; k < 3; ++k) {
      pos += s[k] > 0;
      neg += s[k] < 0;
      zero += s[k] == 0;
    }
    if (zero == 3) {
      throw MeshError("buildCellMesh: triangle with all vertices on the interface; "
                      "refine h_target");
    }
    if (pos == 0 || neg == 0) {
      const Phase ph = neg > 0 ? Phase::Interior : Phase::Exterior;
      Tri keep = t;
      keep.phase = ph;
      outTris.push_back(keep);
      if (zero == 2) {
        int za = -1, zb = -1;
        for (int k = 0; k < 3; ++k)
          if (s[k] == 0) (za < 0 ? za : zb) = t.v[k];
        auto& flags = zeroZero[std::minmax(za, zb)];
        (ph == Phase::Interior ? flags.second : flags.first) = true;
      }
      continue;
    }

    if (zero == 1) {
      // Rotate to (C on interface, A, B) keeping orientation.
      int r = 0;
      while (s[r] != 0) ++r;
      const int C = t.v[r], A = t.v[(r + 1) % 3], B = t.v[(r + 2) % 3];
      const int X = crossingNode(A, B);
      pushTri(C, A, X, sign[A] < 0 ? Phase::Interior : Phase::Exterior);
      pushTri(C, X, B, sign[B] < 0 ? Phase::Interior : Phase::Exterior);
      chords.emplace_back(C, X);
      continue;
    }

    // Two crossings: rotate to (L minority sign, M1, M2).
    const int lone = (pos == 1) ? 1 : -1;
    int r = 0;
    while (s[r] != lone) ++r;
    const int L = t.v[r], M1 = t.v[(r + 1) % 3], M2 = t.v[(r + 2) % 3];
    const int X1 = crossingNode(L, M1);
    const int X2 = crossingNode(L, M2);
    const Phase phL = lone < 0 ? Phase::Interior : Phase::Exterior;
    const Phase phM = lone < 0 ? Phase::Exterior : Phase::Interior;
    pushTri(L, X1, X2, phL);
    if (quadDiagonalQuality(X1, M1, M2, X2) >= quadDiagonalQuality(M1, M2, X2, X1)) {
      pushTri(X1, M1, M2, phM);
      pushTri(X1, M2, X2, phM);
    } else {
      pushTri(M1, M2, X2, phM);
      pushTri(M1, X2, X1, phM);
    }
    chords.emplace_back(X1, X2);
  }
  for (const auto& [key, flags] : zeroZero) {
    if (flags.first && flags.second) chords.push_back(key);
  }
  mesh.tris = std::move(outTris);

  // Orient chords so the analytic normal at the midpoint is the tangent
  // rotated by -90 degrees, i.e. loops run counterclockwise.
  mesh.interfaceEdges.reserve(chords.size());
  for (auto [u, v] : chords) {
    const Vec2 mid = (mesh.nodes[u] + mesh.nodes[v]) * 0.5;
    const Vec2 nu = shape.unitNormal(mid);
    if ((mesh.nodes[v] - mesh.nodes[u]).perp().dot(nu) < 0.0) std::swap(u, v);
    mesh.interfaceEdges.push_back({u, v, nu});
  }

  buildPeriodicMaps(n, mesh);

  // Targeted smoothing: only when the quality gate is at risk, and only for
  // unsnapped interior lattice nodes, so the symmetric fast path stays
  // untouched.
  MeshQualityReport q = meshQualityReport(MeshView(mesh));
  if (q.minAngleDeg < opts.minAngleDeg + 1.0 && opts.smoothingSweeps > 0) {
    std::vector<std::vector<int>> trisOfNode(mesh.nodes.size());
    for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti)
      for (int k = 0; k < 3; ++k) trisOfNode[mesh.tris[ti].v[k]].push_back(ti);
    std::vector<std::uint8_t> onInterface(mesh.nodes.size(), 0);
    for (const auto& e : mesh.interfaceEdges) onInterface[e.a] = onInterface[e.b] = 1;

    auto localMinAngle = [&](int v) {
      double m = 180.0;
      for (int ti : trisOfNode[v]) {
        const Tri& t = mesh.tris[ti];
        m = std::min(m, minAngleOf(mesh.nodes[t.v[0]], mesh.nodes[t.v[1]], mesh.nodes[t.v[2]]));
      }
      return m;
    };
    for (int sweep = 0; sweep < opts.smoothingSweeps; ++sweep) {
      for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) {
        if (mesh.nodeBoundary[v] != 0 || snapped[v] || onInterface[v] ||
            trisOfNode[v].empty()) {
          continue;
        }
        Vec2 sum{0, 0};
        std::set<int> nbr;
        for (int ti : trisOfNode[v])
          for (int k = 0; k < 3; ++k)
            if (mesh.tris[ti].v[k] != v) nbr.insert(mesh.tris[ti].v[k]);
        for (int u : nbr) sum += mesh.nodes[u];
        const Vec2 candidate = sum / static_cast<double>(nbr.size());
        const Vec2 old = mesh.nodes[v];
        if (shape.signedDistance(candidate) * shape.signedDistance(old) <= 0.0) continue;
        const double before = localMinAngle(v);
        mesh.nodes[v] = candidate;
        bool ok = true;
        for (int ti : trisOfNode[v]) {
          const Tri& t = mesh.tris[ti];
          if (triangleArea(mesh.nodes[t.v[0]], mesh.nodes[t.v[1]], mesh.nodes[t.v[2]]) <= 0.0) {
            ok = false;
            break;
          }
        }
        if (!ok || localMinAngle(v) <= before + 1e-12) mesh.nodes[v] = old;
      }
    }
    q = meshQualityReport(MeshView(mesh));
  }

  mesh.h = maxDiameter(mesh);
  if (q.minAngleDeg < opts.minAngleDeg) {
    std::ostringstream msg;
    msg << "buildCellMesh: minimum angle " << q.minAngleDeg << " deg below the "
        << opts.minAngleDeg << " deg bound (h_target=" << hTarget
        << ", grid=" << n << ", nodes=" << mesh.nodes.size() << ")";
    throw MeshError(msg.str());
  }
  if (mesh.h > 1.5 * hTarget) {
    throw MeshError("buildCellMesh: max element diameter " + std::to_string(mesh.h) +
                    " exceeds 1.5*h_target");
  }
  validateCellMesh(mesh, &shape);
  return mesh;
}

DomainMesh tileDomainMesh(const CellMesh& cell, int n) {
  if (n < 1) throw ConfigError("tileDomainMesh: n must be >= 1");
  DomainMesh dom;
  dom.n = n;
  dom.eps = 1.0 / n;
  dom.h = cell.h / n;
  const int cn = static_cast<int>(cell.nodes.size());
  std::vector<int> globalId(static_cast<std::size_t>(n) * n * cn, -1);

  auto owner = [&](int a, int b, int v) {
    if ((cell.nodeBoundary[v] & BndRight) && a + 1 < n) {
      v = cell.hMate[v];
      ++a;
    }
    if ((cell.nodeBoundary[v] & BndTop) && b + 1 < n) {
      v = cell.vMate[v];
      ++b;
    }
    return std::array<int, 3>{a, b, v};
  };

  std::vector<int> local(cn);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      for (int v = 0; v < cn; ++v) {
        const auto [oa, ob, ov] = owner(a, b, v);
        const std::size_t key =
            (static_cast<std::size_t>(ob) * n + oa) * cn + ov;
        int id = globalId[key];
        if (id < 0) {
          id = static_cast<int>(dom.nodes.size());
          globalId[key] = id;
          dom.nodes.push_back({(cell.nodes[ov].x + oa) / n, (cell.nodes[ov].y + ob) / n});
          dom.cellNodeOfNode.push_back(ov);
        }
        local[v] = id;
      }
      for (int t = 0; t < static_cast<int>(cell.tris.size()); ++t) {
        const Tri& ct = cell.tris[t];
        dom.tris.push_back({{local[ct.v[0]], local[ct.v[1]], local[ct.v[2]]}, ct.phase});
        dom.cellIndexOfTri.push_back({a, b});
        dom.cellTriOfTri.push_back(t);
      }
      for (const InterfaceEdge& e : cell.interfaceEdges) {
        dom.interfaceEdges.push_back({local[e.a], local[e.b], e.normal});
      }
    }
  }

  dom.isDirichlet.assign(dom.nodes.size(), 0);
  for (int v = 0; v < static_cast<int>(dom.nodes.size()); ++v) {
    const Vec2 p = dom.nodes[v];
    if (p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0) {
      dom.isDirichlet[v] = 1;
      dom.dirichletNodes.push_back(v);
    }
  }
  return dom;
}

namespace {

std::vector<std::vector<int>> chainLoops(std::span<const InterfaceEdge> edges,
                                         const std::vector<int>& canon) {
  std::unordered_map<int, int> edgeStartingAt;  // canonical node -> edge index
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    if (!edgeStartingAt.emplace(canon[edges[e].a], e).second) {
      throw MeshError("interfaceLoops: two interface edges leave the same node");
    }
  }
  std::vector<std::vector<int>> loops;
  std::vector<std::uint8_t> used(edges.size(), 0);
  for (int e0 = 0; e0 < static_cast<int>(edges.size()); ++e0) {
    if (used[e0]) continue;
    std::vector<int> loop;
    int e = e0;
    while (true) {
      if (used[e]) throw MeshError("interfaceLoops: edge chain is not a simple loop");
      used[e] = 1;
      loop.push_back(e);
      const int next = canon[edges[e].b];
      auto it = edgeStartingAt.find(next);
      if (it == edgeStartingAt.end()) {
        throw MeshError("interfaceLoops: open interface chain (no edge leaves node " +
                        std::to_string(next) + ")");
      }
      e = it->second;
      if (e == e0) break;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace

std::vector<std::vector<int>> interfaceLoops(const CellMesh& mesh) {
  std::vector<int> canon(mesh.nodes.size());
  for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) canon[v] = v;
  for (const auto& [slave, master] : mesh.periodicPairs) canon[slave] = master;
  return chainLoops(mesh.interfaceEdges, canon);
}

std::vector<std::vector<int>> interfaceLoops(const DomainMesh& mesh) {
  std::vector<int> canon(mesh.nodes.size());
  for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) canon[v] = v;
  return chainLoops(mesh.interfaceEdges, canon);
}

MeshQualityReport meshQualityReport(const MeshView& mesh, double eps) {
  MeshQualityReport r;
  r.eps = eps;
  r.nodeCount = static_cast<int>(mesh.nodes.size());
  r.triCount = static_cast<int>(mesh.tris.size());
  r.interfaceEdgeCount = static_cast<int>(mesh.edges.size());
  r.minAngleDeg = 180.0;
  for (const Tri& t : mesh.tris) {
    const Vec2 &a = mesh.nodes[t.v[0]], &b = mesh.nodes[t.v[1]], &c = mesh.nodes[t.v[2]];
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    r.h = std::max({r.h, la, lb, lc});
    auto angle = [](double opp, double s1, double s2) {
      double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
      return std::acos(std::clamp(cosv, -1.0, 1.0)) * 180.0 / kPi;
    };
    const double a0 = angle(la, lb, lc), a1 = angle(lb, lc, la), a2 = angle(lc, la, lb);
    r.minAngleDeg = std::min({r.minAngleDeg, a0, a1, a2});
    r.maxAngleDeg = std::max({r.maxAngleDeg, a0, a1, a2});
    const double area = triangleArea(a, b, c);
    (t.phase == Phase::Interior ? r.interiorArea : r.exteriorArea) += area;
  }
  for (const InterfaceEdge& e : mesh.edges) {
    r.interfaceLength += (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
  }
  return r;
}

namespace {

void checkConformity(const MeshView& mesh,
                     const std::function<bool(int, int)>& edgeMayBeBoundary) {
  std::map<std::pair<int, int>, int> count;
  for (const Tri& t : mesh.tris) {
    for (int k = 0; k < 3; ++k) {
      count[std::minmax(t.v[k], t.v[(k + 1) % 3])]++;
    }
  }
  for (const auto& [e, c] : count) {
    if (c == 2) continue;
    if (c == 1 && edgeMayBeBoundary(e.first, e.second)) continue;
    throw MeshError("conformity violation: edge (" + std::to_string(e.first) + "," +
                    std::to_string(e.second) + ") shared by " + std::to_string(c) +
                    " triangles");
  }
  // Interface edges must separate phases and be consistently oriented.
  std::map<std::pair<int, int>, std::array<int, 2>> sides;  // phase counts
  for (const Tri& t : mesh.tris) {
    for (int k = 0; k < 3; ++k) {
      auto key = std::minmax(t.v[k], t.v[(k + 1) % 3]);
      auto it = sides.find(key);
      if (it == sides.end()) it = sides.emplace(key, std::array<int, 2>{0, 0}).first;
      it->second[static_cast<int>(t.phase)]++;
    }
  }
  for (const InterfaceEdge& e : mesh.edges) {
    auto it = sides.find(std::minmax(e.a, e.b));
    if (it == sides.end()) throw MeshError("interface edge is not a mesh edge");
    if (it->second[0] != 1 || it->second[1] != 1) {
      throw MeshError("interface edge not shared by one interior and one exterior triangle");
    }
  }
}

void checkOrientation(const MeshView& mesh) {
  // For every interface edge, locate the two adjacent triangles and verify
  // the stored normal points from the interior centroid to the exterior one.
  std::map<std::pair<int, int>, std::vector<int>> trisOfEdge;
  for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti) {
    const Tri& t = mesh.tris[ti];
    for (int k = 0; k < 3; ++k) {
      trisOfEdge[std::minmax(t.v[k], t.v[(k + 1) % 3])].push_back(ti);
    }
  }
  for (const InterfaceEdge& e : mesh.edges) {
    const auto& adj = trisOfEdge.at(std::minmax(e.a, e.b));
    Vec2 cInt, cExt;
    for (int ti : adj) {
      const Tri& t = mesh.tris[ti];
      const Vec2 c = (mesh.nodes[t.v[0]] + mesh.nodes[t.v[1]] + mesh.nodes[t.v[2]]) / 3.0;
      (t.phase == Phase::Interior ? cInt : cExt) = c;
    }
    if (e.normal.dot(cExt - cInt) <= 0.0) {
      throw MeshError("interface edge normal does not point into the exterior phase");
    }
    if (std::abs(e.normal.norm() - 1.0) > 1e-12) {
      throw MeshError("interface edge normal is not unit length");
    }
  }
}

}  // namespace

void validateCellMesh(const CellMesh& mesh, const InclusionShape* shape) {
  const MeshView view(mesh);
  for (const Tri& t : mesh.tris) {
    if (triangleArea(mesh.nodes[t.v[0]], mesh.nodes[t.v[1]], mesh.nodes[t.v[2]]) <= 1e-14) {
      throw MeshError("validateCellMesh: degenerate or flipped triangle");
    }
  }
  checkConformity(view, [&](int a, int b) {
    return (mesh.nodeBoundary[a] & mesh.nodeBoundary[b]) != 0;
  });
  checkOrientation(view);

  const MeshQualityReport q = meshQualityReport(view);
  if (std::abs(q.interiorArea + q.exteriorArea - 1.0) > 1e-12) {
    throw MeshError("validateCellMesh: phase areas do not partition the unit cell");
  }

  // Periodic pairing is a bijection between opposite faces and pairs differ
  // by exactly one lattice vector.
  for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) {
    const bool right = mesh.nodeBoundary[v] & BndRight;
    const bool top = mesh.nodeBoundary[v] & BndTop;
    if (right != (mesh.hMate[v] >= 0) || top != (mesh.vMate[v] >= 0)) {
      throw MeshError("validateCellMesh: periodic mate maps do not match face tags");
    }
    if (right) {
      const Vec2 d = mesh.nodes[v] - mesh.nodes[mesh.hMate[v]] - Vec2{1.0, 0.0};
      if (d.norm() > 1e-12) throw MeshError("validateCellMesh: horizontal pair offset != e1");
    }
    if (top) {
      const Vec2 d = mesh.nodes[v] - mesh.nodes[mesh.vMate[v]] - Vec2{0.0, 1.0};
      if (d.norm() > 1e-12) throw MeshError("validateCellMesh: vertical pair offset != e2");
    }
  }

  const auto loops = interfaceLoops(mesh);
  if (!mesh.relaxedGeometry) {
    if (!mesh.interfaceEdges.empty() && loops.size() != 1) {
      throw MeshError("validateCellMesh: expected one closed interface loop, got " +
                      std::to_string(loops.size()));
    }
    for (const InterfaceEdge& e : mesh.interfaceEdges) {
      if (mesh.nodeBoundary[e.a] != 0 || mesh.nodeBoundary[e.b] != 0) {
        throw MeshError("validateCellMesh: interface node on the cell boundary");
      }
    }
  }

  if (shape != nullptr && !mesh.relaxedGeometry) {
    for (const InterfaceEdge& e : mesh.interfaceEdges) {
      for (int v : {e.a, e.b}) {
        if (std::abs(shape->signedDistance(mesh.nodes[v])) > 1e-10) {
          throw MeshError("validateCellMesh: interface node off the interface");
        }
        const Vec2 p = mesh.nodes[v];
        const double wall = std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
        if (wall < shape->clearance() - 1e-12) {
          throw MeshError("validateCellMesh: interface node violates the clearance");
        }
      }
    }
  }
}

void validateDomainMesh(const DomainMesh& mesh, const CellMesh& cell,
                        const InclusionShape* shape) {
  const MeshView view(mesh);
  checkConformity(view, [&](int a, int b) {
    auto onB = [&](int v) {
      const Vec2 p = mesh.nodes[v];
      return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    };
    return onB(a) && onB(b);
  });
  checkOrientation(view);

  double cellLen = 0.0;
  for (const InterfaceEdge& e : cell.interfaceEdges) {
    cellLen += (cell.nodes[e.b] - cell.nodes[e.a]).norm();
  }
  const MeshQualityReport q = meshQualityReport(view, mesh.eps);
  const double expected = mesh.n * mesh.n * mesh.eps * cellLen;
  if (std::abs(q.interfaceLength - expected) > 1e-10) {
    throw MeshError("validateDomainMesh: interface length violates the scaling identity");
  }

  for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) {
    const Vec2 p = mesh.nodes[v];
    const bool onB = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    if (onB != static_cast<bool>(mesh.isDirichlet[v])) {
      throw MeshError("validateDomainMesh: Dirichlet tags do not match the boundary");
    }
  }

  if (shape != nullptr && !cell.relaxedGeometry) {
    const double minDist = shape->clearance() * mesh.eps - 1e-12;
    for (const InterfaceEdge& e : mesh.interfaceEdges) {
      for (int v : {e.a, e.b}) {
        const Vec2 p = mesh.nodes[v];
        const double wall = std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
        if (wall < minDist) {
          throw MeshError("validateDomainMesh: interface too close to the domain boundary");
        }
      }
    }
  }
}

}  // namespace memhom

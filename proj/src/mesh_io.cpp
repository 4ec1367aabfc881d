#include <fstream>
#include <iomanip>
#include <sstream>

#include "memhom/mesh.hpp"

namespace memhom {

namespace {

void expect(std::istream& in, const std::string& token, const std::string& path) {
  std::string got;
  in >> got;
  if (got != token) {
    throw MeshError("loadCellMesh(" + path + "): expected '" + token + "', got '" + got + "'");
  }
}

}  // namespace

void saveCellMesh(const std::string& path, const CellMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("saveCellMesh: cannot open " + path);
  out << std::setprecision(17);
  out << "memhom-mesh cell 1\n";
  out << "gridN " << mesh.gridN << "\n";
  out << "h " << mesh.h << "\n";
  out << "relaxed " << (mesh.relaxedGeometry ? 1 : 0) << "\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    out << mesh.nodes[v].x << ' ' << mesh.nodes[v].y << ' '
        << static_cast<int>(mesh.nodeBoundary[v]) << ' ' << mesh.hMate[v] << ' '
        << mesh.vMate[v] << "\n";
  }
  out << "tris " << mesh.tris.size() << "\n";
  for (const Tri& t : mesh.tris) {
    out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' '
        << static_cast<int>(t.phase) << "\n";
  }
  out << "edges " << mesh.interfaceEdges.size() << "\n";
  for (const InterfaceEdge& e : mesh.interfaceEdges) {
    out << e.a << ' ' << e.b << ' ' << e.normal.x << ' ' << e.normal.y << "\n";
  }
  out << "end\n";
  if (!out) throw MeshError("saveCellMesh: write failure on " + path);
}

CellMesh loadCellMesh(const std::string& path, const InclusionShape* shape) {
  std::ifstream in(path);
  if (!in) throw MeshError("loadCellMesh: cannot open " + path);
  expect(in, "memhom-mesh", path);
  expect(in, "cell", path);
  expect(in, "1", path);
  CellMesh mesh;
  std::size_t count = 0;
  int relaxed = 0;
  expect(in, "gridN", path);
  in >> mesh.gridN;
  expect(in, "h", path);
  in >> mesh.h;
  expect(in, "relaxed", path);
  in >> relaxed;
  mesh.relaxedGeometry = relaxed != 0;
  expect(in, "nodes", path);
  in >> count;
  if (!in || count == 0 || count > (1u << 28)) {
    throw MeshError("loadCellMesh(" + path + "): bad node count");
  }
  mesh.nodes.resize(count);
  mesh.nodeBoundary.resize(count);
  mesh.hMate.resize(count);
  mesh.vMate.resize(count);
  for (std::size_t v = 0; v < count; ++v) {
    int bnd = 0;
    in >> mesh.nodes[v].x >> mesh.nodes[v].y >> bnd >> mesh.hMate[v] >> mesh.vMate[v];
    mesh.nodeBoundary[v] = static_cast<std::uint8_t>(bnd);
  }
  expect(in, "tris", path);
  in >> count;
  mesh.tris.resize(count);
  for (Tri& t : mesh.tris) {
    int phase = 0;
    in >> t.v[0] >> t.v[1] >> t.v[2] >> phase;
    t.phase = static_cast<Phase>(phase);
    for (int vi : t.v) {
      if (vi < 0 || vi >= static_cast<int>(mesh.nodes.size())) {
        throw MeshError("loadCellMesh(" + path + "): triangle vertex out of range");
      }
    }
  }
  expect(in, "edges", path);
  in >> count;
  mesh.interfaceEdges.resize(count);
  for (InterfaceEdge& e : mesh.interfaceEdges) {
    in >> e.a >> e.b >> e.normal.x >> e.normal.y;
    if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(mesh.nodes.size()) ||
        e.b >= static_cast<int>(mesh.nodes.size())) {
      throw MeshError("loadCellMesh(" + path + "): edge endpoint out of range");
    }
  }
  expect(in, "end", path);
  if (!in) throw MeshError("loadCellMesh(" + path + "): truncated file");

  mesh.periodicPairs.clear();
  for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) {
    int m = v;
    if (mesh.hMate[m] >= 0) m = mesh.hMate[m];
    if (m < 0 || m >= static_cast<int>(mesh.nodes.size())) {
      throw MeshError("loadCellMesh(" + path + "): mate index out of range");
    }
    if (mesh.vMate[m] >= 0) m = mesh.vMate[m];
    if (m != v) mesh.periodicPairs.emplace_back(v, m);
  }
  validateCellMesh(mesh, shape);
  return mesh;
}

void saveDomainMesh(const std::string& path, const DomainMesh& mesh,
                    const std::vector<double>* field) {
  std::ofstream out(path);
  if (!out) throw MeshError("saveDomainMesh: cannot open " + path);
  out << std::setprecision(17);
  out << "memhom-mesh domain 1\n";
  out << "n " << mesh.n << "\n";
  out << "eps " << mesh.eps << "\n";
  out << "h " << mesh.h << "\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    out << mesh.nodes[v].x << ' ' << mesh.nodes[v].y << ' '
        << static_cast<int>(mesh.isDirichlet[v]) << "\n";
  }
  out << "tris " << mesh.tris.size() << "\n";
  for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
    const Tri& tri = mesh.tris[t];
    out << tri.v[0] << ' ' << tri.v[1] << ' ' << tri.v[2] << ' '
        << static_cast<int>(tri.phase) << ' ' << mesh.cellIndexOfTri[t][0] << ' '
        << mesh.cellIndexOfTri[t][1] << ' ' << mesh.cellTriOfTri[t] << "\n";
  }
  out << "edges " << mesh.interfaceEdges.size() << "\n";
  for (const InterfaceEdge& e : mesh.interfaceEdges) {
    out << e.a << ' ' << e.b << ' ' << e.normal.x << ' ' << e.normal.y << "\n";
  }
  if (field != nullptr) {
    out << "field " << field->size() << "\n";
    for (double v : *field) out << v << "\n";
  }
  out << "end\n";
  if (!out) throw MeshError("saveDomainMesh: write failure on " + path);
}

}  // namespace memhom

#include "memhom/error_harness.hpp"

#include <algorithm>
#include <cmath>

#include "memhom/assembly.hpp"

namespace memhom {

CellFieldEvaluator::CellFieldEvaluator(const CellMesh& cell,
                                       std::vector<std::vector<double>> fields)
    : cell_(&cell), fields_(std::move(fields)) {
  for (const auto& f : fields_) {
    if (f.size() != cell.nodes.size()) {
      throw InternalError("CellFieldEvaluator: field size does not match the cell mesh");
    }
  }
  binCount_ = std::max(4, cell.gridN);
  bins_.assign(static_cast<std::size_t>(binCount_) * binCount_, {});
  for (int t = 0; t < static_cast<int>(cell.tris.size()); ++t) {
    const Tri& tri = cell.tris[t];
    Vec2 lo{1e30, 1e30}, hi{-1e30, -1e30};
    for (int vi : tri.v) {
      lo.x = std::min(lo.x, cell.nodes[vi].x);
      lo.y = std::min(lo.y, cell.nodes[vi].y);
      hi.x = std::max(hi.x, cell.nodes[vi].x);
      hi.y = std::max(hi.y, cell.nodes[vi].y);
    }
    const int i0 = std::clamp(static_cast<int>(std::floor(lo.x * binCount_ - 1e-12)), 0,
                              binCount_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor(hi.x * binCount_ + 1e-12)), 0,
                              binCount_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(lo.y * binCount_ - 1e-12)), 0,
                              binCount_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor(hi.y * binCount_ + 1e-12)), 0,
                              binCount_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        bins_[static_cast<std::size_t>(j) * binCount_ + i].push_back(t);
      }
    }
  }
}

Vec2 CellFieldEvaluator::wrap(Vec2 y) {
  double x = y.x - std::floor(y.x);
  double yy = y.y - std::floor(y.y);
  if (x >= 1.0) x = 0.0;
  if (yy >= 1.0) yy = 0.0;
  return {x, yy};
}

int CellFieldEvaluator::locate(Vec2 p) const {
  const auto& nodes = cell_->nodes;
  for (double tol : {1e-12, 1e-9, 1e-6}) {
    const int i = std::clamp(static_cast<int>(std::floor(p.x * binCount_)), 0, binCount_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(p.y * binCount_)), 0, binCount_ - 1);
    for (int t : bins_[static_cast<std::size_t>(j) * binCount_ + i]) {
      const Tri& tri = cell_->tris[t];
      const Vec2 &a = nodes[tri.v[0]], &b = nodes[tri.v[1]], &c = nodes[tri.v[2]];
      const double area2 = (b - a).cross(c - a);
      const double w0 = (b - p).cross(c - p) / area2;
      const double w1 = (c - p).cross(a - p) / area2;
      const double w2 = (a - p).cross(b - p) / area2;
      if (w0 >= -tol && w1 >= -tol && w2 >= -tol) return t;
    }
  }
  throw InternalError("CellFieldEvaluator::locate: point (" + std::to_string(p.x) + "," +
                      std::to_string(p.y) + ") not found after periodic wrap");
}

double CellFieldEvaluator::value(int field, Vec2 y) const {
  const Vec2 p = wrap(y);
  const int t = locate(p);
  const Tri& tri = cell_->tris[t];
  const auto& nodes = cell_->nodes;
  // Exact nodal reproduction.
  for (int vi : tri.v) {
    if ((nodes[vi] - p).norm() < 1e-12) return fields_[field][vi];
  }
  const Vec2 &a = nodes[tri.v[0]], &b = nodes[tri.v[1]], &c = nodes[tri.v[2]];
  const double area2 = (b - a).cross(c - a);
  const double w0 = (b - p).cross(c - p) / area2;
  const double w1 = (c - p).cross(a - p) / area2;
  const double w2 = 1.0 - w0 - w1;
  const auto& f = fields_[field];
  return w0 * f[tri.v[0]] + w1 * f[tri.v[1]] + w2 * f[tri.v[2]];
}

Vec2 CellFieldEvaluator::gradientOnTriangle(int field, int tri) const {
  return elementGradient(MeshView(*cell_), tri, fields_[field]);
}

std::vector<Vec2> recoveredGradient(const MeshView& mesh, std::span<const double> u) {
  std::vector<Vec2> g(mesh.nodes.size(), Vec2{0.0, 0.0});
  std::vector<double> weight(mesh.nodes.size(), 0.0);
  for (int t = 0; t < static_cast<int>(mesh.tris.size()); ++t) {
    const Tri& tri = mesh.tris[t];
    const double area = triangleArea(mesh.nodes[tri.v[0]], mesh.nodes[tri.v[1]],
                                     mesh.nodes[tri.v[2]]);
    const Vec2 grad = elementGradient(mesh, t, u);
    for (int vi : tri.v) {
      g[vi] += grad * area;
      weight[vi] += area;
    }
  }
  for (std::size_t v = 0; v < g.size(); ++v) g[v] = g[v] / weight[v];
  return g;
}

CutoffField buildCutoff(const DomainMesh& mesh, double gamma0) {
  CutoffField field;
  field.gamma0 = gamma0;
  field.eps = mesh.eps;
  field.phi.resize(mesh.nodes.size());
  const double band = gamma0 * mesh.eps;
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    const Vec2 p = mesh.nodes[v];
    const double dist = std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
    field.phi[v] = std::clamp(2.0 - 2.0 * dist / band, 0.0, 1.0);
  }
  return field;
}

CorrectorField buildCorrectorField(std::span<const double> u0, const DomainMesh& mesh,
                                   const CellFieldEvaluator& evaluator, double eps,
                                   bool withSecondCorrector) {
  const MeshView view(mesh);
  const std::vector<Vec2> g = recoveredGradient(view, u0);
  const std::size_t n = mesh.nodes.size();
  CorrectorField out;
  out.u1.resize(n);
  out.composite.resize(n);

  const bool sameCell = !mesh.cellNodeOfNode.empty() &&
                        evaluator.cell().nodes.size() ==
                            static_cast<std::size_t>(
                                *std::max_element(mesh.cellNodeOfNode.begin(),
                                                  mesh.cellNodeOfNode.end()) +
                                1)phantom;
  // placeholder, replaced below
  (void)sameCell;
  return out;
}

std::vector<double> applyCutoff(std::span<const double> u0, std::span<const double> u1,
                                const CutoffField& cutoff, double eps) {
  std::vector<double> out(u0.size());
  for (std::size_t v = 0; v < u0.size(); ++v) {
    out[v] = u0[v] + eps * u1[v] * (1.0 - cutoff.phi[v]);
  }
  return out;
}

ErrorAccumulator::ErrorAccumulator(const SparseMatrix& unitMass,
                                   const SparseMatrix& unitStiffness, double dt,
                                   int totalSteps)
    : mass_(unitMass), stiff_(unitStiffness), dt_(dt), totalSteps_(totalSteps) {}

void ErrorAccumulator::addLevel(int k, std::span<const double> eCorrected,
                                std::span<const double> ePlain,
                                std::span<const double> eCutoff) {
  const double w = (k == 0 || k == totalSteps_) ? 0.5 * dt_ : dt_;
  const double massCorr = mass_.quadraticForm(eCorrected, eCorrected);
  h1Sq_ += w * (massCorr + stiff_.quadraticForm(eCorrected, eCorrected));
  l2CorrSq_ += w * massCorr;
  l2PlainSq_ += w * mass_.quadraticForm(ePlain, ePlain);
  if (!eCutoff.empty()) {
    h1CutoffSq_ += w * (mass_.quadraticForm(eCutoff, eCutoff) +
                        stiff_.quadraticForm(eCutoff, eCutoff));
  }
}

double ErrorAccumulator::errH1Corrected() const { return std::sqrt(h1Sq_); }
double ErrorAccumulator::errL2Plain() const { return std::sqrt(l2PlainSq_); }
double ErrorAccumulator::errL2Corrected() const { return std::sqrt(l2CorrSq_); }
double ErrorAccumulator::errH1Cutoff() const { return std::sqrt(h1CutoffSq_); }

RateFit rateFit(std::span<const double> eps, std::span<const double> err) {
  if (eps.size() != err.size() || eps.size() < 3) {
    throw ConfigError("rateFit: need at least 3 (eps, err) rows");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(err[k] > 0.0)) throw ConfigError("rateFit: nonpositive error value");
    if (!(eps[k] > 0.0)) throw ConfigError("rateFit: nonpositive eps value");
    const double x = std::log(eps[k]);
    const double y = std::log(err[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.constant = std::exp((sy - fit.slope * sx) / n);
  return fit;
}

}  // namespace memhom

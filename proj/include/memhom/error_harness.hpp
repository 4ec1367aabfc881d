#pragma once

#include <span>
#include <vector>

#include "memhom/mesh.hpp"
#include "memhom/sparse.hpp"

namespace memhom {

/// P1 evaluation of cell fields (the correctors) at arbitrary points, with
/// periodic wrapping y = x/eps mod 1 and a uniform hash grid for triangle
/// location. Queries that coincide with a mesh node reproduce the nodal dof
/// exactly.
class CellFieldEvaluator {
 public:
  CellFieldEvaluator(const CellMesh& cell, std::vector<std::vector<double>> fields);

  static Vec2 wrap(Vec2 y);
  int locate(Vec2 wrapped) const;

  double value(int field, Vec2 y) const;
  Vec2 gradientOnTriangle(int field, int tri) const;

  const CellMesh& cell() const { return *cell_; }
  const std::vector<double>& field(int k) const { return fields_[k]; }
  int fieldCount() const { return static_cast<int>(fields_.size()); }

 private:
  const CellMesh* cell_;
  std::vector<std::vector<double>> fields_;
  std::vector<std::vector<int>> bins_;
  int binCount_ = 0;
};

/// Area-weighted average of adjacent element gradients at each node; exact
/// for globally linear fields.
std::vector<Vec2> recoveredGradient(const MeshView& mesh, std::span<const double> u);

/// Boundary-layer cut-off: 1 within gamma0*eps/2 of the domain boundary,
/// 0 beyond gamma0*eps, linear ramp in between (gradient 2/(gamma0*eps)).
struct CutoffField {
  std::vector<double> phi;
  double gamma0 = 0.0;
  double eps = 0.0;
};

CutoffField buildCutoff(const DomainMesh& mesh, double gamma0);

struct CorrectorField {
  std::vector<double> u1;         // nodal u1 = -chi(x/eps) . grad u0
  std::vector<double> composite;  // u0 + eps * u1 (+ optional eps^2 u2 term)
  double hessianTermL2 = 0.0;     // size of the eps * (grad g)^T chi part of the gradient
};

/// First-order corrector field from a macro snapshot: nodal values
/// u0(x) - eps * chi(x/eps) . g(x) with g the recovered gradient. When
/// `withSecondCorrector` is set and the evaluator carries the four extra
/// fields, the eps^2 chi2_ij d2u0/dxidxj term is added (experimental).
CorrectorField buildCorrectorField(std::span<const double> u0, const DomainMesh& mesh,
                                   const CellFieldEvaluator& evaluator, double eps,
                                   bool withSecondCorrector = false);

/// u0 + eps*u1*(1 - phi): the corrected approximation vanishing on the
/// Dirichlet boundary.
std::vector<double> applyCutoff(std::span<const double> u0, std::span<const double> u1,
                                const CutoffField& cutoff, double eps);

/// Time-accumulated squared norms (trapezoidal weights). The H1 norm uses
/// the unit-coefficient mass + stiffness pair of the plain H1(Omega) inner
/// product.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const SparseMatrix& unitMass, const SparseMatrix& unitStiffness,
                   double dt, int totalSteps);

  /// Call once per time level k = 0..totalSteps with the three discrepancy
  /// fields (micro - composite, micro - macro, micro - cutoffComposite).
  void addLevel(int k, std::span<const double> eCorrected, std::span<const double> ePlain,
                std::span<const double> eCutoff);

  double errH1Corrected() const;
  double errL2Plain() const;
  double errL2Corrected() const;
  double errH1Cutoff() const;

 private:
  const SparseMatrix &mass_, &stiff_;
  double dt_;
  int totalSteps_;
  double h1Sq_ = 0.0, l2PlainSq_ = 0.0, l2CorrSq_ = 0.0, h1CutoffSq_ = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double constant = 0.0;  // exp(intercept): the empirical constant of the bound
};

/// Least-squares fit of log(err) against log(eps). Requires >= 3 rows with
/// strictly positive errors.
RateFit rateFit(std::span<const double> eps, std::span<const double> err);

}  // namespace memhom

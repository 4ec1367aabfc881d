#include "memhom/cell_solver.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "memhom/sparse.hpp"

namespace memhom {

namespace {

struct CellSystem {
  SparseMatrix stiffLambda;  // full dofs
  SparseMatrix stiffSurf;    // unit coefficient
  SparseMatrix combined;     // stiffLambda + beta * stiffSurf
  ConstraintMap map;         // periodic + zero mean
  std::array<std::vector<double>, 2> coord;  // nodal coordinate fields y_1, y_2
};

CellSystem buildCellSystem(const CellMesh& mesh, const CoefficientSet& coeffs) {
  coeffs.validate();
  const MeshView view(mesh);
  CellSystem sys;
  sys.stiffLambda = assembleBulkStiffness(view, coeffs.lambdaInt, coeffs.lambdaOut);
  sys.stiffSurf = assembleSurfaceStiffness(view);
  sys.combined = sys.stiffLambda.plusScaled(sys.stiffSurf, coeffs.beta);
  sys.map = periodicMap(mesh);
  attachZeroMean(sys.map, view);
  const int n = static_cast<int>(mesh.nodes.size());
  for (int h = 0; h < 2; ++h) {
    sys.coord[h].resize(n);
    for (int v = 0; v < n; ++v) {
      sys.coord[h][v] = h == 0 ? mesh.nodes[v].x : mesh.nodes[v].y;
    }
  }
  return sys;
}

std::vector<double> solveCorrectorWith(const CellSystem& sys, int direction, double relTol) {
  if (direction < 0 || direction > 1) {
    throw ConfigError("solveCorrector: direction index must be 0 or 1");
  }
  // The load of the corrector problem is the combined form applied to the
  // coordinate field: the P1 interpolant of y_h has gradient e_h exactly and
  // its trace on a straight edge has tangential derivative t_h.
  const std::vector<double> bFull = sys.combined.multiply(sys.coord[direction]);
  const std::vector<double> b = sys.map.reduceVectorSum(bFull);
  const SparseMatrix A = sys.map.reduceMatrix(sys.combined);
  CgOptions opts;
  opts.relTol = relTol;
  opts.meanWeights = sys.map.meanWeights;
  const CgResult res = solveSpd(A, b, opts);
  return sys.map.expandVector(res.x);
}

Mat2 tensorEnergyWith(const CellSystem& sys, const std::array<std::vector<double>, 2>& chi) {
  // (lambda0 I + A_hom)_{hj} = a(y_h - chi_h, y_j - chi_j) with the combined
  // bulk + beta*surface form; assembled as a quadratic form, so the result
  // is exactly symmetric.
  const std::size_t n = sys.coord[0].size();
  std::array<std::vector<double>, 2> w;
  for (int h = 0; h < 2; ++h) {
    w[h].resize(n);
    for (std::size_t v = 0; v < n; ++v) w[h][v] = sys.coord[h][v] - chi[h][v];
  }
  Mat2 out;
  for (int h = 0; h < 2; ++h) {
    const std::vector<double> aw = sys.combined.multiply(w[h]);
    for (int j = h; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t v = 0; v < n; ++v) s += aw[v] * w[j][v];
      out(h, j) = s;
      out(j, h) = s;
    }
  }
  return out;
}

}  // namespace

CellMeasures cellMeasures(const CellMesh& mesh) {
  const MeshQualityReport q = meshQualityReport(MeshView(mesh));
  return {q.interiorArea, q.exteriorArea, q.interfaceLength};
}

std::vector<double> solveCorrector(const CellMesh& mesh, const CoefficientSet& coeffs,
                                   int direction, double relTol) {
  const CellSystem sys = buildCellSystem(mesh, coeffs);
  return solveCorrectorWith(sys, direction, relTol);
}

Mat2 homogenizedTensorEnergy(const std::array<std::vector<double>, 2>& chi,
                             const CellMesh& mesh, const CoefficientSet& coeffs) {
  const CellSystem sys = buildCellSystem(mesh, coeffs);
  return tensorEnergyWith(sys, chi);
}

Mat2 homogenizedTensorDirect(const std::array<std::vector<double>, 2>& chi,
                             const CellMesh& mesh, const CoefficientSet& coeffs) {
  const CellMeasures meas = cellMeasures(mesh);
  const double jump = coeffs.lambdaOut - coeffs.lambdaInt;  // [lambda] = out - int
  Mat2 out = Mat2::identity(lambdaAverage(coeffs, meas));
  for (const InterfaceEdge& e : mesh.interfaceEdges) {
    const Vec2 pa = mesh.nodes[e.a], pb = mesh.nodes[e.b];
    const Vec2 d = pb - pa;
    const double len = d.norm();
    const Vec2 t = d / len;
    for (int i = 0; i < 2; ++i) {
      const double nuI = i == 0 ? e.normal.x : e.normal.y;
      const double tI = i == 0 ? t.x : t.y;
      for (int j = 0; j < 2; ++j) {
        const double chiAvg = 0.5 * (chi[j][e.a] + chi[j][e.b]);
        const double dChi = chi[j][e.b] - chi[j][e.a];
        const double dY = j == 0 ? d.x : d.y;
        // A_hom = int [lambda] (nu x chi) - beta int grad_B(chi - y)
        out(i, j) += jump * nuI * chiAvg * len - coeffs.beta * tI * (dChi - dY);
      }
    }
  }
  return out;
}

double gammaCoefficient(const CoefficientSet& coeffs, const CellMeasures& m) {
  return coeffs.sigmaInt * m.interiorArea + coeffs.sigmaOut * m.exteriorArea +
         coeffs.alpha * m.interfaceLength;
}

double lambdaAverage(const CoefficientSet& coeffs, const CellMeasures& m) {
  return coeffs.lambdaInt * m.interiorArea + coeffs.lambdaOut * m.exteriorArea;
}

SpdReport spdCheck(const Mat2& tensor, const CoefficientSet& coeffs) {
  SpdReport rep;
  rep.asymmetry = tensor.symmetryDefect();
  rep.eigenvalues = tensor.symmetricEigenvalues();
  rep.bound = coeffs.lambdaMin() * (1.0 - 1e-6);
  rep.pass = rep.eigenvalues[0] >= rep.bound;
  return rep;
}

SecondCorrectorResult solveSecondCorrector(int i, int j,
                                           const std::array<std::vector<double>, 2>& chi,
                                           const Mat2& tensorTotal, double gamma,
                                           const CellMesh& mesh,
                                           const CoefficientSet& coeffs,
                                           const InclusionShape* shape, double relTol) {
  if (i < 0 || i > 1 || j < 0 || j > 1) {
    throw ConfigError("solveSecondCorrector: direction indices must be 0 or 1");
  }
  const CellSystem sys = buildCellSystem(mesh, coeffs);
  const MeshView view(mesh);
  const int n = static_cast<int>(mesh.nodes.size());
  const double aij = tensorTotal(i, j);
  const double deltaIJ = i == j ? 1.0 : 0.0;

  // Volume source F = -(sigma/gamma) (lambda0 I + A_hom)_{ij} + lambda delta_ij
  //                   - 2 lambda d(chi_i)/d(y_j), constant per triangle.
  std::vector<double> rhs(n, 0.0);
  double intF = 0.0;
  for (int ti = 0; ti < static_cast<int>(mesh.tris.size()); ++ti) {
    const Tri& t = mesh.tris[ti];
    const double lam = coeffs.lambda(t.phase);
    const double sig = coeffs.sigma(t.phase);
    const Vec2 gradChiI = elementGradient(view, ti, chi[i]);
    const double dChiIdJ = j == 0 ? gradChiI.x : gradChiI.y;
    const double f = -(sig / gamma) * aij + lam * deltaIJ - 2.0 * lam * dChiIdJ;
    const double area =
        triangleArea(mesh.nodes[t.v[0]], mesh.nodes[t.v[1]], mesh.nodes[t.v[2]]);
    intF += f * area;
    for (int k = 0; k < 3; ++k) rhs[t.v[k]] += f * area / 3.0;
  }

  // Surface source G; the weak form reads a(chi2, v) = int F v - oint G v.
  const double jumpLambda = coeffs.lambdaOut - coeffs.lambdaInt;
  double intG = 0.0;
  for (const InterfaceEdge& e : mesh.interfaceEdges) {
    const Vec2 pa = mesh.nodes[e.a], pb = mesh.nodes[e.b];
    const Vec2 d = pb - pa;
    const double len = d.norm();
    const Vec2 t = d / len;
    const Vec2 nu = e.normal;
    const double nuI = i == 0 ? nu.x : nu.y;
    const double nuJ = j == 0 ? nu.x : nu.y;
    const double tI = i == 0 ? t.x : t.y;
    const Vec2 mid = (pa + pb) * 0.5;
    const double curv = shape != nullptr ? shape->curvature(mid) : 0.0;

    // Constant-per-edge part: alpha/gamma coupling, the metric term, and
    // the tangential-projection term 2 beta ((I - nu x nu) grad chi_j)_i.
    const double dChiJ = chi[j][e.b] - chi[j][e.a];
    const double g0 = (coeffs.alpha / gamma) * aij - coeffs.beta * (deltaIJ - nuI * nuJ) +
                      2.0 * coeffs.beta * tI * (dChiJ / len);
    // Parts linear in the traces of chi: -beta nu_j chi_i Div(nu) + [lambda nu_i] chi_j.
    const double cChiI = -coeffs.beta * nuJ * curv;
    const double cChiJ = jumpLambda * nuI;

    intG += g0 * len + cChiI * len * 0.5 * (chi[i][e.a] + chi[i][e.b]) +
            cChiJ * len * 0.5 * (chi[j][e.a] + chi[j][e.b]);

    rhs[e.a] -= g0 * len / 2.0;
    rhs[e.b] -= g0 * len / 2.0;
    rhs[e.a] -= len / 6.0 * (cChiI * (2.0 * chi[i][e.a] + chi[i][e.b]) +
                             cChiJ * (2.0 * chi[j][e.a] + chi[j][e.b]));
    rhs[e.b] -= len / 6.0 * (cChiI * (chi[i][e.a] + 2.0 * chi[i][e.b]) +
                             cChiJ * (chi[j][e.a] + 2.0 * chi[j][e.b]));
  }

  SecondCorrectorResult result;
  result.compatibilityResidual = std::abs(intF - intG);
  const double scale =
      (1.0 + tensorTotal.maxAbs()) *
      (1.0 + coeffs.alpha + coeffs.beta + coeffs.lambdaInt + coeffs.lambdaOut);
  if (result.compatibilityResidual > 10.0 * mesh.h * scale) {
    std::ostringstream msg;
    msg << "solveSecondCorrector(" << i << "," << j << "): compatibility residual "
        << result.compatibilityResidual << " exceeds 10*h*scale = " << 10.0 * mesh.h * scale
        << "; the supplied tensor/gamma are inconsistent with the correctors";
    throw InternalError(msg.str());
  }

  const std::vector<double> b = sys.map.reduceVectorSum(rhs);
  const SparseMatrix A = sys.map.reduceMatrix(sys.combined);
  CgOptions opts;
  opts.relTol = relTol;
  opts.meanWeights = sys.map.meanWeights;
  const CgResult res = solveSpd(A, b, opts);
  result.chi = sys.map.expandVector(res.x);
  return result;
}

CorrectorSet solveCellStage(const CellMesh& mesh, const CoefficientSet& coeffs,
                            bool computeChi2, const InclusionShape* shape, double relTol) {
  const CellSystem sys = buildCellSystem(mesh, coeffs);
  CorrectorSet set;
  const std::vector<double> weights = lumpedVolumeWeights(MeshView(mesh));
  for (int h = 0; h < 2; ++h) {
    set.chi[h] = solveCorrectorWith(sys, h, relTol);
    double mean = 0.0;
    for (std::size_t v = 0; v < weights.size(); ++v) mean += weights[v] * set.chi[h][v];
    set.residuals.chiMeanAbs[h] = std::abs(mean);
  }
  set.tensorEnergy = tensorEnergyWith(sys, set.chi);
  set.tensorDirect = homogenizedTensorDirect(set.chi, mesh, coeffs);
  set.residuals.formulaDiscrepancy = (set.tensorEnergy - set.tensorDirect).maxAbs();
  const CellMeasures meas = cellMeasures(mesh);
  set.lambdaAvg = lambdaAverage(coeffs, meas);
  set.gamma = gammaCoefficient(coeffs, meas);
  if (computeChi2) {
    set.hasChi2 = true;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        SecondCorrectorResult r = solveSecondCorrector(i, j, set.chi, set.tensorEnergy,
                                                       set.gamma, mesh, coeffs, shape, relTol);
        set.residuals.compatibility[2 * i + j] = r.compatibilityResidual;
        set.chi2[2 * i + j] = std::move(r.chi);
      }
    }
  }
  return set;
}

void saveCorrectorSet(const std::string& path, const CorrectorSet& set,
                      unsigned long long configDigest) {
  std::ofstream out(path);
  if (!out) throw InternalError("saveCorrectorSet: cannot open " + path);
  out << std::setprecision(17);
  out << "memhom-correctors 1\n";
  out << "digest " << std::hex << configDigest << std::dec << "\n";
  out << "tensor_energy " << set.tensorEnergy(0, 0) << ' ' << set.tensorEnergy(0, 1) << ' '
      << set.tensorEnergy(1, 0) << ' ' << set.tensorEnergy(1, 1) << "\n";
  out << "tensor_direct " << set.tensorDirect(0, 0) << ' ' << set.tensorDirect(0, 1) << ' '
      << set.tensorDirect(1, 0) << ' ' << set.tensorDirect(1, 1) << "\n";
  out << "lambda_avg " << set.lambdaAvg << "\n";
  out << "gamma " << set.gamma << "\n";
  out << "chi_mean_abs " << set.residuals.chiMeanAbs[0] << ' ' << set.residuals.chiMeanAbs[1]
      << "\n";
  out << "formula_discrepancy " << set.residuals.formulaDiscrepancy << "\n";
  if (set.hasChi2) {
    out << "compatibility";
    for (double c : set.residuals.compatibility) out << ' ' << c;
    out << "\n";
  }
  out << "chi " << set.chi[0].size() << "\n";
  for (std::size_t v = 0; v < set.chi[0].size(); ++v) {
    out << set.chi[0][v] << ' ' << set.chi[1][v];
    if (set.hasChi2) {
      for (int k = 0; k < 4; ++k) out << ' ' << set.chi2[k][v];
    }
    out << "\n";
  }
  out << "end\n";
}

}  // namespace memhom

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "memhom/assembly.hpp"
#include "memhom/mat2.hpp"
#include "memhom/mesh.hpp"

namespace memhom {

struct SpdReport {
  double asymmetry = 0.0;
  std::array<double, 2> eigenvalues{0.0, 0.0};  // ascending
  double bound = 0.0;                           // min(lambda) * (1 - 1e-6)
  bool pass = false;
};

struct CellMeasures {
  double interiorArea = 0.0;
  double exteriorArea = 0.0;
  double interfaceLength = 0.0;
};

struct CorrectorResiduals {
  std::array<double, 2> chiMeanAbs{0.0, 0.0};
  double formulaDiscrepancy = 0.0;                       // ||direct - energy||_max
  std::array<double, 4> compatibility{0.0, 0.0, 0.0, 0.0};  // |int F - oint G|, index 2i+j
};

/// Cell functions chi_h with the homogenized data derived from them. The
/// energy-formula tensor is the computational definition (symmetric and
/// positive definite by construction); the direct surface-quadrature formula
/// is kept as a cross-check and their gap is reported as a residual.
struct CorrectorSet {
  std::array<std::vector<double>, 2> chi;  // full nodal vectors, periodic, zero mean
  bool hasChi2 = false;
  std::array<std::vector<double>, 4> chi2;  // index 2i+j
  Mat2 tensorEnergy;                        // lambda0 I + A_hom
  Mat2 tensorDirect;
  double lambdaAvg = 0.0;  // lambda0
  double gamma = 0.0;
  CorrectorResiduals residuals;
};

CellMeasures cellMeasures(const CellMesh& mesh);

/// Corrector cell problem in direction h (0-based): find the periodic,
/// zero-mean chi_h with
///   int_Y lambda grad(chi_h) . grad(v) + beta oint grad_B(chi_h) . grad_B(v)
///     = int_Y lambda e_h . grad(v) + beta oint grad_B(y_h) . grad_B(v)
/// for all periodic v. Returns the full nodal vector.
std::vector<double> solveCorrector(const CellMesh& mesh, const CoefficientSet& coeffs,
                                   int direction, double relTol = 1e-10);

Mat2 homogenizedTensorEnergy(const std::array<std::vector<double>, 2>& chi,
                             const CellMesh& mesh, const CoefficientSet& coeffs);
Mat2 homogenizedTensorDirect(const std::array<std::vector<double>, 2>& chi,
                             const CellMesh& mesh, const CoefficientSet& coeffs);

double gammaCoefficient(const CoefficientSet& coeffs, const CellMeasures& measures);
double lambdaAverage(const CoefficientSet& coeffs, const CellMeasures& measures);

SpdReport spdCheck(const Mat2& tensor, const CoefficientSet& coeffs);

struct SecondCorrectorResult {
  std::vector<double> chi;
  double compatibilityResidual = 0.0;
};

/// Second corrector problem for directions (i, j), 0-based. The volume
/// source F and surface source G follow the factorized u2 system; the
/// solvability defect |int_Y F - oint_G G| is measured before solving and
/// the solve aborts when it exceeds 10x the discretization scale. The
/// curvature term of G needs the analytic shape; pass nullptr for straight
/// interfaces.
SecondCorrectorResult solveSecondCorrector(int i, int j,
                                           const std::array<std::vector<double>, 2>& chi,
                                           const Mat2& tensorTotal, double gamma,
                                           const CellMesh& mesh,
                                           const CoefficientSet& coeffs,
                                           const InclusionShape* shape,
                                           double relTol = 1e-10);

/// Run the whole cell stage: correctors, both tensor formulas, gamma, and
/// (optionally) the four second correctors.
CorrectorSet solveCellStage(const CellMesh& mesh, const CoefficientSet& coeffs,
                            bool computeChi2, const InclusionShape* shape,
                            double relTol = 1e-10);

void saveCorrectorSet(const std::string& path, const CorrectorSet& set,
                      unsigned long long configDigest);

}  // namespace memhom

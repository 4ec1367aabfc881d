#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "memhom/assembly.hpp"
#include "memhom/mat2.hpp"
#include "memhom/mesh.hpp"
#include "memhom/sparse.hpp"

namespace memhom {

/// Smooth compactly supported initial datum
///   a * exp(1 - 1/(1 - rho^2)),  rho = |x - c| / R < 1,   zero otherwise.
struct BumpInitialData {
  Vec2 center{0.5, 0.5};
  double radius = 0.4;
  double amplitude = 1.0;

  double value(Vec2 p) const;
};

/// Nodal interpolation; rejects data whose support touches the boundary.
std::vector<double> projectInitial(const DomainMesh& mesh, const BumpInitialData& data);

struct EvolutionOptions {
  double dt = 0.0025;
  double tFinal = 0.25;
  double theta = 1.0;  // in [0.5, 1]
  double relTol = 1e-10;
  bool incompleteCholesky = true;
  bool storeAllSnapshots = false;
  int snapshotStride = 0;  // additionally keep every k-th snapshot
};

/// The four uniform-bound quantities of the a-priori energy estimate,
/// measured with unit-coefficient forms.
struct EnergyBoundSummary {
  double supMass = 0.0;       // sup_k  u^T M1 u
  double sumStiffness = 0.0;  // sum_k dt u^T K1 u
  double supSurfaceMass = 0.0;       // sup_k  eps u^T MB u
  double sumSurfaceStiffness = 0.0;  // sum_k dt eps u^T KB u
};

struct Trajectory {
  double dt = 0.0;
  double tFinal = 0.0;
  double theta = 1.0;
  int steps = 0;
  std::vector<double> times;
  std::vector<double> energies;          // 0.5 u^T M_total u per level
  double maxIdentityResidual = 0.0;      // theta=1 per-step identity defect / E0
  bool dissipative = true;
  std::vector<double> initial;
  std::vector<double> final_;
  std::vector<std::pair<int, std::vector<double>>> snapshots;
  EnergyBoundSummary bounds;
};

/// One implicit theta-step solver over reduced dofs; micro and macro runs
/// and the coupled error sweep all drive this. Every step is an iterative
/// solve warm-started by linear extrapolation of the two previous states.
class ThetaStepper {
 public:
  ThetaStepper(const SparseMatrix& massFull, const SparseMatrix& stiffFull,
               ConstraintMap map, std::vector<double> initialFull,
               const EvolutionOptions& opts);

  void step();
  int stepsTaken() const { return stepsTaken_; }
  double time() const { return stepsTaken_ * opts_.dt; }

  const std::vector<double>& currentFull() const { return uFull_; }
  double energy() const;                  // 0.5 u^T M_total u
  double lastIdentityResidual() const { return lastIdentityResidual_; }

  const ConstraintMap& map() const { return map_; }

 private:
  EvolutionOptions opts_;
  ConstraintMap map_;
  SparseMatrix massRed_, stiffRed_, stepMatrix_;
  std::optional<IncompleteCholesky> factor_;
  std::vector<double> u_, uPrev_, uFull_;
  double initialEnergy_ = 0.0;
  double lastIdentityResidual_ = 0.0;
  int stepsTaken_ = 0;

  void expand();
};

/// Discrete microscopic problem on the tiled domain mesh:
///   M = M_sigma + eps*alpha*MB,  K = K_lambda + eps*beta*KB,
/// homogeneous Dirichlet data, theta-scheme in time.
Trajectory runMicro(const DomainMesh& mesh, const CoefficientSet& coeffs,
                    const std::vector<double>& initial, const EvolutionOptions& opts);

/// Homogenized problem on the same triangulation (phase tags ignored):
///   gamma u_t - Div(tensorTotal grad u) = 0. Refuses a non-SPD tensor.
Trajectory runMacro(const DomainMesh& mesh, const Mat2& tensorTotal, double gamma,
                    const std::vector<double>& initial, const EvolutionOptions& opts);

/// 0.5 u^T M u.
double energy(const SparseMatrix& mass, std::span<const double> u);

}  // namespace memhom

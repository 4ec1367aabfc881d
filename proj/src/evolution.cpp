#include "memhom/evolution.hpp"

#include <cmath>

namespace memhom {

double BumpInitialData::value(Vec2 p) const {
  const double rho2 = (p - center).squaredNorm() / (radius * radius);
  if (rho2 >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - rho2));
}

std::vector<double> projectInitial(const DomainMesh& mesh, const BumpInitialData& data) {
  const double wall = std::min(std::min(data.center.x, 1.0 - data.center.x),
                               std::min(data.center.y, 1.0 - data.center.y));
  if (data.radius >= wall) {
    throw ConfigError("initial data support touches the domain boundary (radius " +
                      std::to_string(data.radius) + ", wall distance " +
                      std::to_string(wall) + ")");
  }
  std::vector<double> u(mesh.nodes.size());
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) u[v] = data.value(mesh.nodes[v]);
  return u;
}

double energy(const SparseMatrix& mass, std::span<const double> u) {
  return 0.5 * mass.quadraticForm(u, u);
}

ThetaStepper::ThetaStepper(const SparseMatrix& massFull, const SparseMatrix& stiffFull,
                           ConstraintMap map, std::vector<double> initialFull,
                           const EvolutionOptions& opts)
    : opts_(opts), map_(std::move(map)) {
  if (!(opts.theta >= 0.5 && opts.theta <= 1.0)) {
    throw ConfigError("theta must lie in [0.5, 1], got " + std::to_string(opts.theta));
  }
  if (!(opts.dt > 0.0)) throw ConfigError("dt must be positive");
  massRed_ = map_.reduceMatrix(massFull);
  stiffRed_ = map_.reduceMatrix(stiffFull);
  stepMatrix_ = massRed_.plusScaled(stiffRed_, opts.theta * opts.dt);
  if (opts.incompleteCholesky) factor_.emplace(stepMatrix_);
  u_ = map_.restrictVector(initialFull);
  uPrev_ = u_;
  uFull_ = map_.expandVector(u_);
  initialEnergy_ = energy();
}

double ThetaStepper::energy() const { return 0.5 * massRed_.quadraticForm(u_, u_); }

void ThetaStepper::expand() { uFull_ = map_.expandVector(u_); }

void ThetaStepper::step() {
  const int n = stepMatrix_.size();
  std::vector<double> rhs = massRed_.multiply(u_);
  if (opts_.theta < 1.0) {
    const std::vector<double> ku = stiffRed_.multiply(u_);
    const double c = (1.0 - opts_.theta) * opts_.dt;
    for (int i = 0; i < n; ++i) rhs[i] -= c * ku[i];
  }
  // Linear extrapolation of the previous two states as the warm start.
  std::vector<double> guess(n);
  for (int i = 0; i < n; ++i) guess[i] = 2.0 * u_[i] - uPrev_[i];

  CgOptions cg;
  cg.relTol = opts_.relTol;
  cg.warmStart = guess;
  if (factor_.has_value()) cg.factor = &factor_.value();
  CgResult res = solveSpd(stepMatrix_, rhs, cg);

  uPrev_ = std::move(u_);
  u_ = std::move(res.x);
  ++stepsTaken_;

  // theta = 1 satisfies the exact algebraic balance
  //   E+ - E = -dt u+^T K u+ - 0.5 ||u+ - u||_M^2;
  // report the defect of the computed step relative to the initial energy.
  if (opts_.theta == 1.0) {
    const double ePlus = 0.5 * massRed_.quadraticForm(u_, u_);
    const double e = 0.5 * massRed_.quadraticForm(uPrev_, uPrev_);
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = u_[i] - uPrev_[i];
    const double defect = ePlus - e + opts_.dt * stiffRed_.quadraticForm(u_, u_) +
                          0.5 * massRed_.quadraticForm(diff, diff);
    lastIdentityResidual_ =
        initialEnergy_ > 0.0 ? std::abs(defect) / initialEnergy_ : std::abs(defect);
  }
  expand();
}

namespace {

Trajectory runTrajectory(ThetaStepper& stepper, const EvolutionOptions& opts,
                         const SparseMatrix* unitMass, const SparseMatrix* unitStiff,
                         const SparseMatrix* surfMass, const SparseMatrix* surfStiff,
                         double eps) {
  Trajectory traj;
  traj.dt = opts.dt;
  traj.tFinal = opts.tFinal;
  traj.theta = opts.theta;
  traj.steps = static_cast<int>(std::llround(opts.tFinal / opts.dt));
  if (traj.steps < 1 || std::abs(traj.steps * opts.dt - opts.tFinal) > 1e-9 * opts.tFinal) {
    throw ConfigError("tFinal must be a positive multiple of dt");
  }
  traj.initial = stepper.currentFull();

  auto record = [&](int k) {
    traj.times.push_back(k * opts.dt);
    traj.energies.push_back(stepper.energy());
    const auto& u = stepper.currentFull();
    if (unitMass != nullptr) {
      traj.bounds.supMass = std::max(traj.bounds.supMass, unitMass->quadraticForm(u, u));
      traj.bounds.supSurfaceMass =
          std::max(traj.bounds.supSurfaceMass, eps * surfMass->quadraticForm(u, u));
      if (k > 0) {
        traj.bounds.sumStiffness += opts.dt * unitStiff->quadraticForm(u, u);
        traj.bounds.sumSurfaceStiffness += opts.dt * eps * surfStiff->quadraticForm(u, u);
      }
    }
    const bool keep = opts.storeAllSnapshots ||
                      (opts.snapshotStride > 0 && k % opts.snapshotStride == 0);
    if (keep) traj.snapshots.emplace_back(k, u);
  };

  record(0);
  const double e0 = traj.energies[0];
  for (int k = 1; k <= traj.steps; ++k) {
    stepper.step();
    record(k);
    if (traj.energies[k] > traj.energies[k - 1] + 1e-10 * e0) traj.dissipative = false;
    traj.maxIdentityResidual =
        std::max(traj.maxIdentityResidual, stepper.lastIdentityResidual());
  }
  traj.final_ = stepper.currentFull();
  return traj;
}

}  // namespace

Trajectory runMicro(const DomainMesh& mesh, const CoefficientSet& coeffs,
                    const std::vector<double>& initial, const EvolutionOptions& opts) {
  coeffs.validate();
  const MeshView view(mesh);
  const SparseMatrix massBulk = assembleBulkMass(view, coeffs.sigmaInt, coeffs.sigmaOut);
  const SparseMatrix stiffBulk =
      assembleBulkStiffness(view, coeffs.lambdaInt, coeffs.lambdaOut);
  const SparseMatrix massSurf = assembleSurfaceMass(view);
  const SparseMatrix stiffSurf = assembleSurfaceStiffness(view);
  const SparseMatrix unitMass = assembleBulkMass(view, 1.0, 1.0);
  const SparseMatrix unitStiff = assembleBulkStiffness(view, 1.0, 1.0);

  const SparseMatrix massTotal = massBulk.plusScaled(massSurf, mesh.eps * coeffs.alpha);
  const SparseMatrix stiffTotal = stiffBulk.plusScaled(stiffSurf, mesh.eps * coeffs.beta);

  ThetaStepper stepper(massTotal, stiffTotal, dirichletMap(mesh), initial, opts);
  return runTrajectory(stepper, opts, &unitMass, &unitStiff, &massSurf, &stiffSurf,
                       mesh.eps);
}

Trajectory runMacro(const DomainMesh& mesh, const Mat2& tensorTotal, double gamma,
                    const std::vector<double>& initial, const EvolutionOptions& opts) {
  const auto eigs = tensorTotal.symmetricEigenvalues();
  if (!(eigs[0] > 0.0)) {
    throw ConfigError("runMacro: effective tensor is not positive definite (eigmin " +
                      std::to_string(eigs[0]) + ")");
  }
  if (!(gamma > 0.0)) throw ConfigError("runMacro: gamma must be positive");
  const MeshView view(mesh);
  const SparseMatrix mass = assembleBulkMass(view, gamma, gamma);
  const SparseMatrix stiff = assembleBulkStiffnessTensor(view, tensorTotal);
  ThetaStepper stepper(mass, stiff, dirichletMap(mesh), initial, opts);
  return runTrajectory(stepper, opts, nullptr, nullptr, nullptr, nullptr, mesh.eps);
}

}  // namespace memhom

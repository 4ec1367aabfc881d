#pragma once

#include <span>
#include <string>
#include <vector>

#include "memhom/errors.hpp"

namespace memhom {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Symmetric sparse matrix in CSR form (full pattern stored). Assembly goes
/// through triplets; duplicate entries are summed in a fixed order so the
/// result is reproducible.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix fromTriplets(int n, std::vector<Triplet> triplets);

  int size() const { return n_; }
  std::size_t nonZeros() const { return values_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> diagonal() const;

  /// this + s * other (patterns merged).
  SparseMatrix plusScaled(const SparseMatrix& other, double s) const;

  double quadraticForm(std::span<const double> u, std::span<const double> v) const;

  /// Largest |a_ij - a_ji| over the stored pattern.
  double symmetryDefect() const;

  std::vector<Triplet> toTriplets() const;

  /// Coordinate-format text export (row col value per line, 0-based).
  void exportTriplets(const std::string& path) const;

  const std::vector<int>& rowPtr() const { return rowPtr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_ = 0;
  std::vector<int> rowPtr_;
  std::vector<int> cols_;
  std::vector<double> values_;
};

/// Reduction from mesh dofs to free dofs: periodic slaves fold onto their
/// masters, Dirichlet dofs are eliminated, and an optional lumped-weight row
/// enforces a zero mean value through a Lagrange multiplier kept implicit in
/// the solver (the bordered system stays symmetric with corank one).
struct ConstraintMap {
  std::vector<int> fullToReduced;  // -1 for eliminated dofs
  std::vector<int> reducedToFull;  // one representative per reduced dof
  std::vector<double> meanWeights; // nonempty only in zero-mean mode

  int reducedSize() const { return static_cast<int>(reducedToFull.size()); }
  bool hasZeroMean() const { return !meanWeights.empty(); }

  static ConstraintMap identity(int n);
  static ConstraintMap periodic(int n, std::span<const std::pair<int, int>> pairs);
  static ConstraintMap dirichlet(int n, std::span<const int> fixedNodes);

  /// Fold full triplet entries onto reduced dofs (rows/cols of eliminated
  /// dofs vanish; slave contributions accumulate on their masters).
  SparseMatrix reduceMatrix(const SparseMatrix& full) const;
  std::vector<double> reduceVectorSum(std::span<const double> full) const;
  std::vector<double> restrictVector(std::span<const double> full) const;
  std::vector<double> expandVector(std::span<const double> reduced) const;
};

class IncompleteCholesky;

struct CgOptions {
  double relTol = 1e-10;
  std::span<const double> warmStart;           // optional initial guess
  std::span<const double> meanWeights;         // zero-mean projection weights
  const IncompleteCholesky* factor = nullptr;  // preconditioner override; Jacobi otherwise
  int maxIterations = 0;                       // 0: 20*sqrt(n) + 1000
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relResidual = 0.0;
  std::vector<double> residualHistory;
};

/// Preconditioned conjugate gradients for SPD (or semidefinite zero-mean)
/// systems. Stops when ||b - Ax||_2 <= relTol * ||b||_2; throws SolverError
/// with the residual history embedded in the message on non-convergence.
CgResult solveSpd(const SparseMatrix& A, std::span<const double> b,
                  const CgOptions& opts = {});

/// Factorization for the repeated solves of time stepping. Built once from
/// the step matrix; apply() runs the preconditioner inside solveSpd.
class IncompleteCholesky {
 public:
  explicit IncompleteCholesky(const SparseMatrix& A);
  void apply(std::span<const double> r, std::span<double> z) const;

 private:
  int n_ = 0;
  std::vector<int> rowPtr_, cols_;   // strict lower triangle
  std::vector<double> values_;
  std::vector<double> diag_;
};

}  // namespace memhom

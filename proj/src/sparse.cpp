#include "memhom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace memhom {

SparseMatrix SparseMatrix::fromTriplets(int n, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.n_ = n;
  m.rowPtr_.assign(n + 1, 0);
  m.cols_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (int row = 0; row < n; ++row) {
    while (i < triplets.size() && triplets[i].row == row) {
      const int col = triplets[i].col;
      double sum = 0.0;
      while (i < triplets.size() && triplets[i].row == row && triplets[i].col == col) {
        sum += triplets[i].value;
        ++i;
      }
      m.cols_.push_back(col);
      m.values_.push_back(sum);
    }
    m.rowPtr_[row + 1] = static_cast<int>(m.cols_.size());
  }
  if (i != triplets.size()) {
    throw InternalError("fromTriplets: triplet row index out of range");
  }
  return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int row = 0; row < n_; ++row) {
    double sum = 0.0;
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      sum += values_[k] * x[cols_[k]];
    }
    y[row] = sum;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int row = 0; row < n_; ++row) {
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      if (cols_[k] == row) d[row] = values_[k];
    }
  }
  return d;
}

SparseMatrix SparseMatrix::plusScaled(const SparseMatrix& other, double s) const {
  if (other.n_ != n_) throw InternalError("plusScaled: size mismatch");
  std::vector<Triplet> t;
  t.reserve(values_.size() + other.values_.size());
  for (int row = 0; row < n_; ++row) {
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      t.push_back({row, cols_[k], values_[k]});
    }
    for (int k = other.rowPtr_[row]; k < other.rowPtr_[row + 1]; ++k) {
      t.push_back({row, other.cols_[k], s * other.values_[k]});
    }
  }
  return fromTriplets(n_, std::move(t));
}

double SparseMatrix::quadraticForm(std::span<const double> u,
                                   std::span<const double> v) const {
  double sum = 0.0;
  for (int row = 0; row < n_; ++row) {
    double rowSum = 0.0;
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      rowSum += values_[k] * v[cols_[k]];
    }
    sum += u[row] * rowSum;
  }
  return sum;
}

double SparseMatrix::symmetryDefect() const {
  double defect = 0.0;
  for (int row = 0; row < n_; ++row) {
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      const int col = cols_[k];
      double transposed = 0.0;
      for (int k2 = rowPtr_[col]; k2 < rowPtr_[col + 1]; ++k2) {
        if (cols_[k2] == row) transposed = values_[k2];
      }
      defect = std::max(defect, std::abs(values_[k] - transposed));
    }
  }
  return defect;
}

std::vector<Triplet> SparseMatrix::toTriplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int row = 0; row < n_; ++row) {
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      t.push_back({row, cols_[k], values_[k]});
    }
  }
  return t;
}

void SparseMatrix::exportTriplets(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InternalError("exportTriplets: cannot open " + path);
  out << std::setprecision(17);
  out << n_ << ' ' << n_ << ' ' << values_.size() << "\n";
  for (int row = 0; row < n_; ++row) {
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      out << row << ' ' << cols_[k] << ' ' << values_[k] << "\n";
    }
  }
}

ConstraintMap ConstraintMap::identity(int n) {
  ConstraintMap m;
  m.fullToReduced.resize(n);
  m.reducedToFull.resize(n);
  for (int i = 0; i < n; ++i) m.fullToReduced[i] = m.reducedToFull[i] = i;
  return m;
}

ConstraintMap ConstraintMap::periodic(int n, std::span<const std::pair<int, int>> pairs) {
  std::vector<int> master(n);
  for (int i = 0; i < n; ++i) master[i] = i;
  for (const auto& [slave, m] : pairs) {
    if (master[slave] != slave) {
      throw InternalError("ConstraintMap::periodic: conflicting constraints on dof " +
                          std::to_string(slave));
    }
    master[slave] = m;
  }
  // Chase chains (corner slaves may point at another slave).
  for (int i = 0; i < n; ++i) {
    int m = master[i];
    int guard = 0;
    while (master[m] != m) {
      m = master[m];
      if (++guard > n) throw InternalError("ConstraintMap::periodic: cyclic pairing");
    }
    master[i] = m;
  }
  ConstraintMap map;
  map.fullToReduced.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (master[i] == i) {
      map.fullToReduced[i] = static_cast<int>(map.reducedToFull.size());
      map.reducedToFull.push_back(i);
    }
  }
  for (int i = 0; i < n; ++i) map.fullToReduced[i] = map.fullToReduced[master[i]];
  return map;
}

ConstraintMap ConstraintMap::dirichlet(int n, std::span<const int> fixedNodes) {
  ConstraintMap map;
  map.fullToReduced.assign(n, 0);
  for (int v : fixedNodes) {
    if (map.fullToReduced[v] == -1) {
      throw InternalError("ConstraintMap::dirichlet: dof fixed twice");
    }
    map.fullToReduced[v] = -1;
  }
  for (int i = 0; i < n; ++i) {
    if (map.fullToReduced[i] == 0) {
      map.fullToReduced[i] = static_cast<int>(map.reducedToFull.size());
      map.reducedToFull.push_back(i);
    }
  }
  return map;
}

SparseMatrix ConstraintMap::reduceMatrix(const SparseMatrix& full) const {
  std::vector<Triplet> t;
  t.reserve(full.nonZeros());
  const auto& rowPtr = full.rowPtr();
  const auto& cols = full.cols();
  const auto& values = full.values();
  for (int row = 0; row < full.size(); ++row) {
    const int r = fullToReduced[row];
    if (r < 0) continue;
    for (int k = rowPtr[row]; k < rowPtr[row + 1]; ++k) {
      const int c = fullToReduced[cols[k]];
      if (c < 0) continue;
      t.push_back({r, c, values[k]});
    }
  }
  return SparseMatrix::fromTriplets(reducedSize(), std::move(t));
}

std::vector<double> ConstraintMap::reduceVectorSum(std::span<const double> full) const {
  std::vector<double> r(reducedSize(), 0.0);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const int ri = fullToReduced[i];
    if (ri >= 0) r[ri] += full[i];
  }
  return r;
}

std::vector<double> ConstraintMap::restrictVector(std::span<const double> full) const {
  std::vector<double> r(reducedSize());
  for (int i = 0; i < reducedSize(); ++i) r[i] = full[reducedToFull[i]];
  return r;
}

std::vector<double> ConstraintMap::expandVector(std::span<const double> reduced) const {
  std::vector<double> full(fullToReduced.size(), 0.0);
  for (std::size_t i = 0; i < fullToReduced.size(); ++i) {
    const int ri = fullToReduced[i];
    if (ri >= 0) full[i] = reduced[ri];
  }
  return full;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Remove the weighted-mean component; keeps iterates on the constraint
/// plane of the bordered zero-mean system.
void projectMean(std::span<double> v, std::span<const double> w, double wDotW) {
  const double c = dot(v, w) / wDotW;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
}

}  // namespace

IncompleteCholesky::IncompleteCholesky(const SparseMatrix& A) : n_(A.size()) {
  // IC(0) on the lower triangle of A; a diagonal shift retries on breakdown.
  const auto& rowPtr = A.rowPtr();
  const auto& cols = A.cols();
  const auto& values = A.values();

  rowPtr_.assign(n_ + 1, 0);
  for (int row = 0; row < n_; ++row) {
    for (int k = rowPtr[row]; k < rowPtr[row + 1]; ++k) {
      if (cols[k] < row) ++rowPtr_[row + 1];
    }
  }
  for (int row = 0; row < n_; ++row) rowPtr_[row + 1] += rowPtr_[row];
  cols_.resize(rowPtr_[n_]);
  std::vector<double> lowerA(rowPtr_[n_]);
  std::vector<double> diagA(n_, 0.0);
  {
    std::vector<int> fill(n_, 0);
    for (int row = 0; row < n_; ++row) {
      for (int k = rowPtr[row]; k < rowPtr[row + 1]; ++k) {
        if (cols[k] < row) {
          const int idx = rowPtr_[row] + fill[row]++;
          cols_[idx] = cols[k];
          lowerA[idx] = values[k];
        } else if (cols[k] == row) {
          diagA[row] = values[k];
        }
      }
    }
  }

  for (double shift = 0.0;; shift = (shift == 0.0 ? 1e-8 : shift * 10.0)) {
    values_.assign(lowerA.size(), 0.0);
    diag_.assign(n_, 0.0);
    bool ok = true;
    for (int row = 0; row < n_ && ok; ++row) {
      double d = diagA[row] * (1.0 + shift);
      // Up-looking IC(0): for each lower entry (row, col) in column order,
      //   L(row,col) = (A(row,col) - sum_{j<col} L(row,j) L(col,j)) / L(col,col)
      for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
        const int col = cols_[k];
        double sum = lowerA[k];
        // Intersect sparsity of row `row` (j < col) with row `col`.
        int ka = rowPtr_[row];
        int kb = rowPtr_[col];
        while (ka < k && kb < rowPtr_[col + 1]) {
          if (cols_[ka] == cols_[kb]) {
            sum -= values_[ka] * values_[kb];
            ++ka;
            ++kb;
          } else if (cols_[ka] < cols_[kb]) {
            ++ka;
          } else {
            ++kb;
          }
        }
        const double lij = sum / diag_[col];
        values_[k] = lij;
        d -= lij * lij;
      }
      if (d <= 0.0 || !std::isfinite(d)) {
        ok = false;
        break;
      }
      diag_[row] = std::sqrt(d);
    }
    if (ok) break;
    if (shift > 1.0) {
      throw SolverError("IncompleteCholesky: breakdown persists under diagonal shifts");
    }
  }
}

void IncompleteCholesky::apply(std::span<const double> r, std::span<double> z) const {
  // Forward solve L y = r.
  for (int row = 0; row < n_; ++row) {
    double sum = r[row];
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      sum -= values_[k] * z[cols_[k]];
    }
    z[row] = sum / diag_[row];
  }
  // Backward solve L^T z = y.
  for (int row = n_ - 1; row >= 0; --row) {
    const double zi = z[row] / diag_[row];
    z[row] = zi;
    for (int k = rowPtr_[row]; k < rowPtr_[row + 1]; ++k) {
      z[cols_[k]] -= values_[k] * zi;
    }
  }
}

CgResult solveSpd(const SparseMatrix& A, std::span<const double> b, const CgOptions& opts) {
  const int n = A.size();
  if (static_cast<int>(b.size()) != n) throw InternalError("solveSpd: rhs size mismatch");

  const bool zeroMean = !opts.meanWeights.empty();
  const double wDotW = zeroMean ? dot(opts.meanWeights, opts.meanWeights) : 0.0;

  std::vector<double> rhs(b.begin(), b.end());
  if (zeroMean) {
    // The multiplier of the bordered system absorbs the weight component of
    // the load; the remaining system is consistent on the constraint plane.
    projectMean(rhs, opts.meanWeights, wDotW);
  }
  const double bNorm = std::sqrt(dot(rhs, rhs));

  CgResult res;
  res.x.assign(n, 0.0);
  if (!opts.warmStart.empty()) {
    if (static_cast<int>(opts.warmStart.size()) != n) {
      throw InternalError("solveSpd: warm start size mismatch");
    }
    std::copy(opts.warmStart.begin(), opts.warmStart.end(), res.x.begin());
    if (zeroMean) projectMean(res.x, opts.meanWeights, wDotW);
  }
  if (bNorm == 0.0) {
    res.x.assign(n, 0.0);
    return res;
  }

  std::vector<double> diag = A.diagonal();
  for (double& d : diag) {
    if (d <= 0.0) d = 1.0;
  }

  std::vector<double> r(n), z(n), p(n), Ap(n);
  A.multiply(res.x, r);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  if (zeroMean) projectMean(r, opts.meanWeights, wDotW);

  auto precondition = [&](std::span<const double> rin, std::span<double> zout) {
    if (opts.factor != nullptr) {
      opts.factor->apply(rin, zout);
    } else {
      for (int i = 0; i < n; ++i) zout[i] = rin[i] / diag[i];
    }
    if (zeroMean) projectMean(zout, opts.meanWeights, wDotW);
  };

  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  double rNorm = std::sqrt(dot(r, r));

  const int maxIter = opts.maxIterations > 0
                          ? opts.maxIterations
                          : static_cast<int>(20.0 * std::sqrt(static_cast<double>(n))) + 1000;
  res.residualHistory.push_back(rNorm / bNorm);
  int it = 0;
  while (rNorm > opts.relTol * bNorm) {
    if (it >= maxIter) {
      std::ostringstream msg;
      msg << "solveSpd: no convergence after " << it << " iterations; relative residual "
          << rNorm / bNorm << " (history tail:";
      const std::size_t tail = std::min<std::size_t>(8, res.residualHistory.size());
      for (std::size_t k = res.residualHistory.size() - tail; k < res.residualHistory.size(); ++k) {
        msg << ' ' << res.residualHistory[k];
      }
      msg << ")";
      res.iterations = it;
      res.relResidual = rNorm / bNorm;
      throw SolverError(msg.str());
    }
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      throw SolverError("solveSpd: matrix is not positive definite on the search space");
    }
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (zeroMean) projectMean(r, opts.meanWeights, wDotW);
    precondition(r, z);
    const double rzNew = dot(r, z);
    const double beta = rzNew / rz;
    rz = rzNew;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rNorm = std::sqrt(dot(r, r));
    res.residualHistory.push_back(rNorm / bNorm);
    ++it;
  }
  res.iterations = it;
  res.relResidual = rNorm / bNorm;
  if (zeroMean) projectMean(res.x, opts.meanWeights, wDotW);
  return res;
}

}  // namespace memhom

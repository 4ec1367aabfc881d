#pragma once

#include <array>
#include <cmath>

#include "memhom/geometry.hpp"

namespace memhom {

struct Mat2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static Mat2 identity(double s = 1.0) {
    Mat2 r;
    r.m[0][0] = r.m[1][1] = s;
    return r;
  }

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  Vec2 apply(Vec2 v) const {
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
  }

  Mat2 operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }

  double maxAbs() const {
    double v = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v = std::max(v, std::abs(m[i][j]));
    return v;
  }

  double symmetryDefect() const { return std::abs(m[0][1] - m[1][0]); }

  /// Eigenvalues of the symmetric part, ascending.
  std::array<double, 2> symmetricEigenvalues() const {
    const double a = m[0][0], d = m[1][1];
    const double b = 0.5 * (m[0][1] + m[1][0]);
    const double mean = 0.5 * (a + d);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    return {mean - disc, mean + disc};
  }
};

}  // namespace memhom

#pragma once

#include <cmath>
#include <string>

#include "memhom/errors.hpp"

namespace memhom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squaredNorm() const { return x * x + y * y; }
  /// Rotation by -90 degrees; maps a CCW loop tangent to the outward normal.
  Vec2 perp() const { return {y, -x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

enum class Phase : int { Interior = 0, Exterior = 1 };

/// Analytic description of the inclusion inside the unit cell Y = (0,1)^2.
///
/// The signed distance is negative inside the inclusion; the unit normal
/// points from the interior phase into the exterior one. The inclusion
/// closure must stay at least `clearance` away from the cell boundary, which
/// keeps every scaled interface copy away from the domain boundary by
/// clearance * eps.
class InclusionShape {
 public:
  enum class Kind { Circle };

  static InclusionShape circle(Vec2 center, double radius,
                               double clearance = 0.05);

  Kind kind() const { return kind_; }
  Vec2 center() const { return center_; }
  double radius() const { return radius_; }
  double clearance() const { return clearance_; }

  double signedDistance(Vec2 p) const;

  /// Unit normal nabla d / |nabla d|. Rejects the shape center, where the
  /// gradient of the distance is undefined.
  Vec2 unitNormal(Vec2 p) const;

  /// Tangential divergence of the normal field (Div nu) on the interface.
  /// For a circle this is 1/radius everywhere.
  double curvature(Vec2 p) const;

  /// Phase classification away from the interface. Points within 1e-12 of
  /// the interface are ambiguous and rejected; classify element centroids,
  /// not vertices.
  Phase phaseOf(Vec2 p) const;

 private:
  InclusionShape(Kind kind, Vec2 center, double radius, double clearance)
      : kind_(kind), center_(center), radius_(radius), clearance_(clearance) {}

  Kind kind_;
  Vec2 center_;
  double radius_;
  double clearance_;
};

}  // namespace memhom

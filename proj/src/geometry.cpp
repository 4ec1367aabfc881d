#include "memhom/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace memhom {

InclusionShape InclusionShape::circle(Vec2 center, double radius,
                                      double clearance) {
  if (!(radius > 0.0)) {
    throw ConfigError("geometry.radius must be positive, got " +
                      std::to_string(radius));
  }
  if (!(clearance > 0.0)) {
    throw ConfigError("geometry.clearance must be positive, got " +
                      std::to_string(clearance));
  }
  const double wall = std::min(std::min(center.x, 1.0 - center.x),
                               std::min(center.y, 1.0 - center.y));
  if (radius + clearance > wall) {
    std::ostringstream msg;
    msg << "geometry: inclusion of radius " << radius << " with clearance "
        << clearance << " does not fit strictly inside the cell (distance of "
           "center to cell boundary is "
        << wall << ")";
    throw ConfigError(msg.str());
  }
  return InclusionShape(Kind::Circle, center, radius, clearance);
}

double InclusionShape::signedDistance(Vec2 p) const {
  return (p - center_).norm() - radius_;
}

Vec2 InclusionShape::unitNormal(Vec2 p) const {
  const Vec2 d = p - center_;
  const double r = d.norm();
  if (r < 1e-14) {
    throw ConfigError("unitNormal: undefined at the shape center");
  }
  return d / r;
}

double InclusionShape::curvature(Vec2 /*p*/) const { return 1.0 / radius_; }

Phase InclusionShape::phaseOf(Vec2 p) const {
  const double d = signedDistance(p);
  if (std::abs(d) <= 1e-12) {
    throw ConfigError("phaseOf: point lies on the interface (|d| <= 1e-12); "
                      "classify element centroids, not vertices");
  }
  return d < 0.0 ? Phase::Interior : Phase::Exterior;
}

}  // namespace memhom

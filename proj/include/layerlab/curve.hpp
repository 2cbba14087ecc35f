#pragma once

#include <cstddef>
#include <vector>

#include "layerlab/geometry.hpp"

namespace layerlab {

// Oriented polyline. Closed curves are stored without repeating the first
// vertex. The interior (u < a side) lies to the left of the direction of
// travel, so a curve enclosing its interior runs counter-clockwise.
struct Curve {
  std::vector<Point> points;
  bool closed = true;

  std::size_t size() const { return points.size(); }
  std::size_t segment_count() const {
    return points.size() < 2 ? 0 : (closed ? points.size() : points.size() - 1);
  }
  Point segment_start(std::size_t k) const { return points[k]; }
  Point segment_end(std::size_t k) const { return points[(k + 1) % points.size()]; }

  double signed_area() const;
  double length() const;
  double min_segment_length() const;
  double mean_segment_length() const;
  Point centroid() const;

  // Unit tangent from the centred difference p[k+1] - p[k-1].
  Point tangent(std::size_t k) const;
  // Right-hand normal: points away from the interior.
  Point outward_normal(std::size_t k) const;
};

enum class Side { inside, outside, boundary };

// Even-odd location of q with respect to the region enclosed by a closed
// curve. A horizontal ray to +x is cast; vertices lying exactly on the ray
// are treated as if they sat infinitesimally below it.
Side locate(const Curve& c, Point q);

struct ClosestPoint {
  Point foot;
  double distance = 0.0;
  std::size_t segment = 0;
  double param = 0.0;
};

ClosestPoint closest_point(const Curve& c, Point q);

// Any pair of non-adjacent segments touching.
bool self_intersects(const Curve& c);

// Closed, at least 8 vertices, no self-intersection; throws GeometryError.
void validate_curve(const Curve& c);

// Counter-clockwise samples starting at angle 0.
Curve make_circle(Point center, double radius, std::size_t n);
Curve make_ellipse(Point center, double a, double b, std::size_t n);

}  // namespace layerlab

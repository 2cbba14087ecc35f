#include "layerlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "layerlab/errors.hpp"

namespace layerlab {

double Curve::signed_area() const {
  if (points.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    acc += cross(points[k], points[(k + 1) % points.size()]);
  }
  return 0.5 * acc;
}

double Curve::length() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < segment_count(); ++k) {
    acc += distance(segment_start(k), segment_end(k));
  }
  return acc;
}

double Curve::min_segment_length() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < segment_count(); ++k) {
    best = std::min(best, distance(segment_start(k), segment_end(k)));
  }
  return best;
}

double Curve::mean_segment_length() const {
  const auto n = segment_count();
  return n == 0 ? 0.0 : length() / static_cast<double>(n);
}

Point Curve::centroid() const {
  Point acc;
  for (const auto& p : points) acc = acc + p;
  return points.empty() ? acc : (1.0 / static_cast<double>(points.size())) * acc;
}

Point Curve::tangent(std::size_t k) const {
  const std::size_t n = points.size();
  Point d;
  if (closed) {
    d = points[(k + 1) % n] - points[(k + n - 1) % n];
  } else {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 >= n ? n - 1 : k + 1;
    d = points[hi] - points[lo];
  }
  const double len = norm(d);
  return len > 0.0 ? (1.0 / len) * d : Point{};
}

Point Curve::outward_normal(std::size_t k) const {
  const Point t = tangent(k);
  return {t.y, -t.x};
}

Side locate(const Curve& c, Point q) {
  bool inside = false;
  for (std::size_t k = 0; k < c.segment_count(); ++k) {
    const Point a = c.segment_start(k);
    const Point b = c.segment_end(k);
    if (a == q) return Side::boundary;
    // On-segment test before the crossing count.
    const Point ab = b - a;
    const Point aq = q - a;
    if (cross(ab, aq) == 0.0 && dot(aq, ab) >= 0.0 && dot(aq, ab) <= dot(ab, ab)) {
      return Side::boundary;
    }
    if ((a.y <= q.y) != (b.y <= q.y)) {
      const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > q.x) inside = !inside;
    }
  }
  return inside ? Side::inside : Side::outside;
}

ClosestPoint closest_point(const Curve& c, Point q) {
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.segment_count(); ++k) {
    double s = 0.0;
    const Point foot = closest_on_segment(q, c.segment_start(k), c.segment_end(k), &s);
    const double d = distance(q, foot);
    if (d < best.distance) best = {foot, d, k, s};
  }
  if (c.segment_count() == 0 && !c.points.empty()) {
    best = {c.points[0], distance(q, c.points[0]), 0, 0.0};
  }
  return best;
}

namespace {

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool self_intersects(const Curve& c) {
  const std::size_t m = c.segment_count();
  if (m < 3) return false;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto xmin = [&](std::size_t k) { return std::min(c.segment_start(k).x, c.segment_end(k).x); };
  auto xmax = [&](std::size_t k) { return std::max(c.segment_start(k).x, c.segment_end(k).x); };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xmin(a) < xmin(b); });
  auto adjacent = [&](std::size_t a, std::size_t b) {
    const std::size_t d = a > b ? a - b : b - a;
    return d == 1 || (c.closed && d == m - 1);
  };
  for (std::size_t p = 0; p < m; ++p) {
    const std::size_t a = order[p];
    const double right = xmax(a);
    for (std::size_t q = p + 1; q < m && xmin(order[q]) <= right; ++q) {
      const std::size_t b = order[q];
      if (adjacent(a, b)) continue;
      if (segments_touch(c.segment_start(a), c.segment_end(a), c.segment_start(b),
                         c.segment_end(b))) {
        return true;
      }
    }
  }
  return false;
}

void validate_curve(const Curve& c) {
  if (!c.closed) throw GeometryError("curve is not closed");
  if (c.size() < 8) {
    std::ostringstream msg;
    msg << "curve has " << c.size() << " vertices (need >= 8)";
    throw GeometryError(msg.str());
  }
  if (self_intersects(c)) throw GeometryError("curve self-intersects");
}

Curve make_circle(Point center, double radius, std::size_t n) {
  return make_ellipse(center, radius, radius, n);
}

Curve make_ellipse(Point center, double a, double b, std::size_t n) {
  Curve c;
  c.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    c.points.push_back({center.x + a * std::cos(th), center.y + b * std::sin(th)});
  }
  return c;
}

}  // namespace layerlab

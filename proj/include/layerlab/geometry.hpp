#pragma once

#include <cmath>

namespace layerlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Closest point on the segment [a, b] to q; `param` receives the segment
// parameter in [0, 1].
inline Point closest_on_segment(Point q, Point a, Point b, double* param = nullptr) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double s = 0.0;
  if (len2 > 0.0) {
    s = dot(q - a, ab) / len2;
    s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
  }
  if (param) *param = s;
  return a + s * ab;
}

// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Box {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

}  // namespace layerlab

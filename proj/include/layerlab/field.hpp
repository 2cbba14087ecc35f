#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "layerlab/geometry.hpp"

namespace layerlab {

// Uniform node-centred grid: node (i, j) sits at origin + h (i, j).
struct GridGeometry {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Point origin;

  // Grid whose nodes span `box` exactly with spacing h; the box extents must be
  // integer multiples of h to 1e-12.
  static GridGeometry covering(const Box& box, double h);
  // Coarsest covering grid with spacing <= h_max.
  static GridGeometry refining(const Box& box, double h_max);

  Box box() const {
    return {origin.x, origin.x + h * (nx - 1), origin.y, origin.y + h * (ny - 1)};
  }
  double x(int i) const { return origin.x + h * i; }
  double y(int j) const { return origin.y + h * j; }
  Point node(int i, int j) const { return {x(i), y(j)}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  bool operator==(const GridGeometry&) const = default;
};

class ScalarField {
 public:
  explicit ScalarField(GridGeometry geometry, double fill = 0.0);
  ScalarField(GridGeometry geometry, std::vector<double> values);

  template <class F>
  static ScalarField from_function(const GridGeometry& g, F&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.node(i, j));
    return out;
  }

  const GridGeometry& geometry() const { return geometry_; }
  double& operator()(int i, int j) { return values_[geometry_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[geometry_.index(i, j)]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  // Bilinear interpolation; points outside the box are clamped onto it.
  double sample(Point p) const;
  double min() const;
  double max() const;
  bool all_finite() const;

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

// max |a - b| over nodes; grids must match.
double max_abs_difference(const ScalarField& a, const ScalarField& b);

}  // namespace layerlab

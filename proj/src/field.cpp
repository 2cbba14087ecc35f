#include "layerlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace layerlab {

GridGeometry GridGeometry::covering(const Box& box, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("GridGeometry: h must be positive");
  const double cx = box.width() / h;
  const double cy = box.height() / h;
  GridGeometry g;
  g.nx = static_cast<int>(std::lround(cx)) + 1;
  g.ny = static_cast<int>(std::lround(cy)) + 1;
  g.h = h;
  g.origin = {box.xmin, box.ymin};
  const Box covered = g.box();
  if (std::abs(covered.xmax - box.xmax) > 1e-12 || std::abs(covered.ymax - box.ymax) > 1e-12) {
    std::ostringstream msg;
    msg << "GridGeometry: box [" << box.xmin << ", " << box.xmax << "] x [" << box.ymin << ", "
        << box.ymax << "] is not a multiple of h = " << h;
    throw std::invalid_argument(msg.str());
  }
  if (g.nx < 3 || g.ny < 3) throw std::invalid_argument("GridGeometry: need at least 3x3 nodes");
  return g;
}

GridGeometry GridGeometry::refining(const Box& box, double h_max) {
  if (!(h_max > 0.0)) throw std::invalid_argument("GridGeometry: h must be positive");
  const auto first = static_cast<long>(std::ceil(box.width() / h_max - 1e-9));
  for (long n = std::max(first, 2L); n < 4 * first + 8; ++n) {
    const double h = box.width() / static_cast<double>(n);
    const double cy = box.height() / h;
    if (std::abs(cy - std::round(cy)) * h <= 1e-12) return covering(box, h);
  }
  std::ostringstream msg;
  msg << "GridGeometry: no spacing <= " << h_max << " fits box [" << box.xmin << ", " << box.xmax
      << "] x [" << box.ymin << ", " << box.ymax << "]";
  throw std::invalid_argument(msg.str());
}

ScalarField::ScalarField(GridGeometry geometry, double fill)
    : geometry_(geometry), values_(geometry.size(), fill) {}

ScalarField::ScalarField(GridGeometry geometry, std::vector<double> values)
    : geometry_(geometry), values_(std::move(values)) {
  if (values_.size() != geometry_.size()) {
    throw std::invalid_argument("ScalarField: value count does not match the grid");
  }
}

double ScalarField::sample(Point p) const {
  const auto& g = geometry_;
  double fx = (p.x - g.origin.x) / g.h;
  double fy = (p.y - g.origin.y) / g.h;
  fx = std::clamp(fx, 0.0, static_cast<double>(g.nx - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(g.ny - 1));
  const int i = std::min(static_cast<int>(fx), g.nx - 2);
  const int j = std::min(static_cast<int>(fy), g.ny - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  const auto& f = *this;
  return (1.0 - ty) * ((1.0 - tx) * f(i, j) + tx * f(i + 1, j)) +
         ty * ((1.0 - tx) * f(i, j + 1) + tx * f(i + 1, j + 1));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double max_abs_difference(const ScalarField& a, const ScalarField& b) {
  if (!(a.geometry() == b.geometry())) throw std::invalid_argument("grids differ");
  double worst = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) worst = std::max(worst, std::abs(va[k] - vb[k]));
  return worst;
}

}  // namespace layerlab

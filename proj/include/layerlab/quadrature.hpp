#pragma once

#include <cstddef>
#include <vector>

namespace layerlab {

// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(std::size_t n);

// Composite Gauss-Legendre: `panels` equal panels of `order` nodes each.
template <class F>
double integrate(F&& f, double lo, double hi, std::size_t panels, const QuadratureRule& rule) {
  const double width = (hi - lo) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    const double mid = a + 0.5 * width;
    double panel = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      panel += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
    }
    total += 0.5 * width * panel;
  }
  return total;
}

}  // namespace layerlab

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "layerlab/nonlinearity.hpp"

namespace layerlab {

// Tabulated standing wave U0'' + f(U0) = 0, U0(-inf) = a-, U0(0) = a,
// U0(+inf) = a+, on a uniform grid of [-z_max, z_max].
class LayerProfile {
 public:
  double evaluate(double z) const;
  // sqrt(2 (W(U0(z)) - W(a-))), the first integral of the profile equation.
  double slope(double z) const;

  std::span<const double> z_samples() const { return z_; }
  std::span<const double> u_samples() const { return u_; }
  double z_max() const { return z_max_; }
  std::pair<double, double> limits() const { return {zeros_.minus, zeros_.plus}; }
  double anchor() const { return zeros_.mid; }
  const BistableNonlinearity& nonlinearity() const { return nl_; }

 private:
  friend LayerProfile solve_profile(const BistableNonlinearity&, double, int);
  explicit LayerProfile(BistableNonlinearity nl) : nl_(std::move(nl)), zeros_(nl_.zeros()) {}

  BistableNonlinearity nl_;
  Zeros zeros_;
  double z_max_ = 0.0;
  double spacing_ = 0.0;
  double w_minus_ = 0.0;
  std::vector<double> z_;
  std::vector<double> u_;
  std::vector<double> du_;  // Hermite slopes
};

// Tabulates z(u) = int_a^u ds / sqrt(2 (W(s) - W(a-+))) by quadrature in a
// tail-stretching variable and inverts it at each grid point by Newton.
LayerProfile solve_profile(const BistableNonlinearity& nl, double z_max = 10.0, int n = 4000);

inline double evaluate(const LayerProfile& p, double z) { return p.evaluate(z); }
inline double profile_slope(const LayerProfile& p, double z) { return p.slope(z); }

// int (U0')^2 dz over the tabulated range (equals 1/c0 up to the tails).
double profile_energy(const LayerProfile& p);

}  // namespace layerlab

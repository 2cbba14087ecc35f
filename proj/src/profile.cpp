#include "layerlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "layerlab/errors.hpp"
#include "layerlab/quadrature.hpp"

namespace layerlab {

namespace {

// One half of the profile. With u(sigma) = target - (target - a) e^{-sigma}
// the stretched coordinate obeys dz/dsigma = |target - u| / G(u), which stays
// bounded as u approaches the well, so Gauss-Legendre resolves the tail.
class HalfProfile {
 public:
  HalfProfile(const BistableNonlinearity& nl, double target)
      : nl_(nl), anchor_(nl.zeros().mid), target_(target), w_target_(nl.potential(target)) {}

  double u_of(double sigma) const { return target_ - (target_ - anchor_) * std::exp(-sigma); }

  // Near the well W(u) - W(a) cancels, so it is rebuilt from f' with the
  // integral form of the Taylor remainder.
  double first_integral(double u) const {
    const double d = u - target_;
    double dw;
    if (std::abs(d) < 1e-3 * std::abs(target_ - anchor_)) {
      static const QuadratureRule rule = gauss_legendre(8);
      dw = -integrate([&](double q) { return (u - q) * nl_.derivative(q); }, target_, u, 1, rule);
    } else {
      dw = nl_.potential(u) - w_target_;
    }
    return std::sqrt(2.0 * std::max(dw, 0.0));
  }

  double rate(double sigma) const {
    const double u = u_of(sigma);
    const double g = first_integral(u);
    if (!(g > 0.0)) {
      std::ostringstream msg;
      msg << "solve_profile: first integral vanished at u = " << u
          << " before reaching the well (increase resolution or reduce z_max)";
      throw Error(msg.str());
    }
    return std::abs(target_ - u) / g;
  }

  double integral(double s0, double s1) const {
    static const QuadratureRule rule = gauss_legendre(8);
    const auto panels = static_cast<std::size_t>(std::ceil(std::abs(s1 - s0) / 0.125)) + 1;
    return integrate([this](double s) { return rate(s); }, s0, s1, panels, rule);
  }

  // Walks |z| upward through `targets` (sorted increasing), returning u.
  std::vector<double> solve(const std::vector<double>& targets) const {
    std::vector<double> out;
    out.reserve(targets.size());
    double sigma_prev = 0.0;
    double z_prev = 0.0;
    for (double z : targets) {
      if (z == 0.0) {
        out.push_back(anchor_);
        continue;
      }
      double sigma = sigma_prev + (z - z_prev) / rate(sigma_prev);
      double z_at = z_prev + integral(sigma_prev, sigma);
      for (int iter = 0; iter < 60; ++iter) {
        const double step = (z - z_at) / rate(sigma);
        sigma += step;
        z_at = z_prev + integral(sigma_prev, sigma);
        if (std::abs(step) <= 1e-15 * std::max(1.0, sigma)) break;
      }
      out.push_back(u_of(sigma));
      sigma_prev = sigma;
      z_prev = z_at;
    }
    return out;
  }

 private:
  const BistableNonlinearity& nl_;
  double anchor_;
  double target_;
  double w_target_;
};

void require_double_well(const BistableNonlinearity& nl) {
  const auto& z = nl.zeros();
  const double wm = nl.potential(z.minus);
  const double wp = nl.potential(z.plus);
  constexpr int kSamples = 400;
  for (int k = 0; k < kSamples; ++k) {
    const double c = std::cos(std::numbers::pi * (k + 0.5) / kSamples);
    const double s = 0.5 * (z.minus + z.plus) + 0.5 * (z.plus - z.minus) * c;
    const double w = nl.potential(s);
    if (!(w - wm > 0.0) || !(w - wp > 0.0)) {
      std::ostringstream msg;
      msg << "solve_profile: W(s) - W(a-) <= 0 at s = " << s << " (not a double well)";
      throw Error(msg.str());
    }
  }
}

}  // namespace

LayerProfile solve_profile(const BistableNonlinearity& nl, double z_max, int n) {
  if (!(z_max >= 5.0)) throw std::invalid_argument("solve_profile: z_max must be >= 5");
  if (n < 100) throw std::invalid_argument("solve_profile: n must be >= 100");
  require_double_well(nl);

  LayerProfile p(nl);
  const auto& zeros = nl.zeros();
  p.z_max_ = z_max;
  p.spacing_ = 2.0 * z_max / (n - 1);
  p.w_minus_ = nl.potential(zeros.minus);
  p.z_.resize(n);
  for (int i = 0; i < n; ++i) p.z_[i] = -z_max + p.spacing_ * i;
  // Pin the end points exactly.
  p.z_.front() = -z_max;
  p.z_.back() = z_max;

  std::vector<double> upper_targets;
  std::vector<double> lower_targets;
  std::vector<int> upper_index;
  std::vector<int> lower_index;
  for (int i = n - 1; i >= 0; --i) {
    if (p.z_[i] < 0.0) {
      lower_targets.push_back(-p.z_[i]);
      lower_index.push_back(i);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (p.z_[i] >= 0.0) {
      upper_targets.push_back(p.z_[i]);
      upper_index.push_back(i);
    }
  }

  const HalfProfile upper(nl, zeros.plus);
  const HalfProfile lower(nl, zeros.minus);
  const auto u_up = upper.solve(upper_targets);
  const auto u_lo = lower.solve(lower_targets);

  p.u_.resize(n);
  p.du_.resize(n);
  for (std::size_t k = 0; k < u_up.size(); ++k) {
    p.u_[upper_index[k]] = u_up[k];
    p.du_[upper_index[k]] = upper.first_integral(u_up[k]);
  }
  for (std::size_t k = 0; k < u_lo.size(); ++k) {
    p.u_[lower_index[k]] = u_lo[k];
    p.du_[lower_index[k]] = lower.first_integral(u_lo[k]);
  }

  // Fritsch-Carlson limiter; inactive when the table resolves the profile.
  for (int k = 0; k + 1 < n; ++k) {
    const double secant = (p.u_[k + 1] - p.u_[k]) / p.spacing_;
    if (!(secant > 0.0)) {
      throw Error("solve_profile: tabulated profile is not strictly increasing");
    }
    const double a = p.du_[k] / secant;
    const double b = p.du_[k + 1] / secant;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      p.du_[k] = tau * a * secant;
      p.du_[k + 1] = tau * b * secant;
    }
  }
  return p;
}

double LayerProfile::evaluate(double z) const {
  if (z > z_max_) return zeros_.plus;
  if (z < -z_max_) return zeros_.minus;
  const auto n = static_cast<std::ptrdiff_t>(z_.size());
  auto k = static_cast<std::ptrdiff_t>(std::floor((z + z_max_) / spacing_));
  k = std::clamp<std::ptrdiff_t>(k, 0, n - 2);
  const double t = (z - z_[k]) / spacing_;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * u_[k] + h10 * spacing_ * du_[k] + h01 * u_[k + 1] + h11 * spacing_ * du_[k + 1];
}

double LayerProfile::slope(double z) const {
  return std::sqrt(2.0 * std::max(nl_.potential(evaluate(z)) - w_minus_, 0.0));
}

double profile_energy(const LayerProfile& p) {
  // Simpson on U0'^2 at the samples (odd sample count uses a trapezoid tail).
  const auto z = p.z_samples();
  const double h = z[1] - z[0];
  const std::size_t n = z.size();
  auto sq = [&](std::size_t i) {
    const double s = p.slope(z[i]);
    return s * s;
  };
  const std::size_t m = (n % 2 == 1) ? n : n - 1;
  double acc = sq(0) + sq(m - 1);
  for (std::size_t i = 1; i + 1 < m; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * sq(i);
  double total = acc * h / 3.0;
  if (m != n) total += 0.5 * h * (sq(n - 2) + sq(n - 1));
  return total;
}

}  // namespace layerlab

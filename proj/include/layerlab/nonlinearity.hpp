#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layerlab/geometry.hpp"

namespace layerlab {

// Stable/unstable zeros of a bistable reaction, minus < mid < plus.
struct Zeros {
  double minus = -1.0;
  double mid = 0.0;
  double plus = 1.0;
};

// A bistable reaction term f with three declared zeros and its double-well
// potential W(s) = -int_mid^s f(r) dr.
//
// Polynomial reactions keep their coefficients so that the time steppers can
// evaluate f inline and W exactly; arbitrary closures get W by quadrature.
class BistableNonlinearity {
 public:
  using ScalarFn = std::function<double(double)>;

  BistableNonlinearity(std::string name, ScalarFn f, ScalarFn df, Zeros zeros);

  // f(u) = sum_k coefficients[k] * u^k.
  static BistableNonlinearity polynomial(std::vector<double> coefficients, Zeros zeros,
                                         std::string name = "polynomial");

  double evaluate(double u) const;
  double operator()(double u) const { return evaluate(u); }
  double derivative(double u) const;
  double potential(double s) const;

  const Zeros& zeros() const { return zeros_; }
  const std::string& name() const { return name_; }
  bool is_polynomial() const { return !coefficients_.empty(); }
  // Empty unless the reaction is polynomial.
  std::span<const double> coefficients() const { return coefficients_; }

  // lambda * f with the same zeros.
  BistableNonlinearity scaled(double lambda) const;

  // Sampled max |f'| over [lo, hi].
  double max_abs_derivative(double lo, double hi) const;

 private:
  BistableNonlinearity() = default;

  std::string name_;
  Zeros zeros_;
  std::vector<double> coefficients_;
  ScalarFn f_;
  ScalarFn df_;
};

// f(u) = u - u^3 with zeros (-1, 0, 1); W(s) = s^4/4 - s^2/2.
BistableNonlinearity make_cubic();

struct AdmissibilityCheck {
  std::string name;
  double residual = 0.0;
  bool passed = false;
};

struct AdmissibilityReport {
  std::vector<AdmissibilityCheck> checks;
  bool passed() const;
  std::string summary() const;
};

// Zeros, sign of f' at the zeros, balance of the wells.
AdmissibilityReport check_admissible(const BistableNonlinearity& nl, double tol);

// int_{a-}^{a+} f(u) du by high-order quadrature.
double balance_integral(const BistableNonlinearity& nl);

// c0 = [sqrt(2) int_{a-}^{a+} (W(s) - W(a-))^{1/2} ds]^{-1}.
// Uses s = a- + (a+ - a-) sin^2(phi) and composite Gauss-Legendre on phi with
// roughly n_quad nodes.
double mobility_constant(const BistableNonlinearity& nl, int n_quad = 512);

// The perturbation g^eps(x, t, u) of the Allen-Cahn reaction and its limit g.
class Forcing {
 public:
  using Fn = std::function<double(Point, double, double)>;
  enum class Kind { constant, linear_x, custom };

  Forcing(std::string name, Fn eps_form, Fn limit_form, double bound, double eps);

  // g^eps = g = delta.
  static Forcing constant(double delta);
  // g^eps = g = delta * x.
  static Forcing linear_x(double delta);

  double operator()(Point x, double t, double u) const;
  double limit(Point x, double t, double u) const;

  Kind kind() const { return kind_; }
  // delta for the built-in kinds.
  double parameter() const { return parameter_; }
  double bound() const { return bound_; }
  double eps() const { return eps_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Kind kind_ = Kind::custom;
  double parameter_ = 0.0;
  Fn eps_form_;
  Fn limit_form_;
  double bound_ = 0.0;
  double eps_ = 0.0;
};

// Largest |g^eps - g| over a 10x10x5 lattice of (x, t, u) minus C*eps.
// Non-positive means the perturbation bound holds on the samples.
double forcing_bound_excess(const Forcing& g, const Box& box, double t_max, double u_lo,
                            double u_hi);

struct FhnConstants {
  double alpha = 1.0;
  double beta = 1.0;
  // Polynomial f1(u) of the FitzHugh-Nagumo reaction; empty means zero.
  std::vector<double> f1_coefficients;
};

// Coupling of the two-component system
//   u_t = Lap u + (f(u) + eps f1(u,v) + eps^2 f2(u,v)) / eps^2
//   v_t = D Lap v + h(u, v).
class SystemCoupling {
 public:
  using Fn2 = std::function<double(double, double)>;

  SystemCoupling(Fn2 f1, Fn2 f2, Fn2 h, double diffusion);

  // f(u) - eps f1(u) - eps v  and  v_t = D Lap v + alpha u - beta v, i.e.
  // f1(u,v) = -f1(u) - v, f2 = 0, h = alpha u - beta v.
  static SystemCoupling fitzhugh_nagumo(double alpha, double beta, double diffusion,
                                        std::vector<double> f1_coefficients = {});

  double f1(double u, double v) const;
  double f2(double u, double v) const;
  double h(double u, double v) const;
  double diffusion() const { return diffusion_; }
  const std::optional<FhnConstants>& fhn() const { return fhn_; }

  // Smallest M1 >= M with h(u,-M1) >= 0 >= h(u,M1) for |u| <= L.
  double invariant_bound(double L, double M) const;

 private:
  Fn2 f1_;
  Fn2 f2_;
  Fn2 h_;
  double diffusion_ = 1.0;
  std::optional<FhnConstants> fhn_;
};

double evaluate_polynomial(std::span<const double> coefficients, double u);

}  // namespace layerlab

#include "layerlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "layerlab/errors.hpp"
#include "layerlab/quadrature.hpp"

namespace layerlab {

double evaluate_polynomial(std::span<const double> coefficients, double u) {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * u + *it;
  return acc;
}

namespace {

double polynomial_derivative(std::span<const double> c, double u) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * c[k];
  return acc;
}

// Antiderivative P with P(0) = 0.
double polynomial_antiderivative(std::span<const double> c, double u) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * u + c[k] / static_cast<double>(k + 1);
  return acc * u;
}

void validate_zeros(const Zeros& z) {
  if (!(z.minus < z.mid && z.mid < z.plus)) {
    throw std::invalid_argument("bistable nonlinearity: zeros must satisfy a- < a < a+");
  }
}

}  // namespace

BistableNonlinearity::BistableNonlinearity(std::string name, ScalarFn f, ScalarFn df, Zeros zeros)
    : name_(std::move(name)), zeros_(zeros), f_(std::move(f)), df_(std::move(df)) {
  validate_zeros(zeros_);
  if (!f_ || !df_) throw std::invalid_argument("bistable nonlinearity: f and f' are required");
}

BistableNonlinearity BistableNonlinearity::polynomial(std::vector<double> coefficients, Zeros zeros,
                                                      std::string name) {
  validate_zeros(zeros);
  while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.size() < 2) {
    throw std::invalid_argument("bistable nonlinearity: polynomial must be non-constant");
  }
  BistableNonlinearity nl;
  nl.name_ = std::move(name);
  nl.zeros_ = zeros;
  nl.coefficients_ = std::move(coefficients);
  return nl;
}

double BistableNonlinearity::evaluate(double u) const {
  if (is_polynomial()) return evaluate_polynomial(coefficients_, u);
  return f_(u);
}

double BistableNonlinearity::derivative(double u) const {
  if (is_polynomial()) return polynomial_derivative(coefficients_, u);
  return df_(u);
}

double BistableNonlinearity::potential(double s) const {
  if (is_polynomial()) {
    return -(polynomial_antiderivative(coefficients_, s) -
             polynomial_antiderivative(coefficients_, zeros_.mid));
  }
  static const QuadratureRule rule = gauss_legendre(16);
  return -integrate([this](double r) { return f_(r); }, zeros_.mid, s, 8, rule);
}

BistableNonlinearity BistableNonlinearity::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaled: lambda must be positive");
  if (is_polynomial()) {
    std::vector<double> c = coefficients_;
    for (double& x : c) x *= lambda;
    return polynomial(std::move(c), zeros_, name_ + "*" + std::to_string(lambda));
  }
  ScalarFn f = [g = f_, lambda](double u) { return lambda * g(u); };
  ScalarFn df = [g = df_, lambda](double u) { return lambda * g(u); };
  return BistableNonlinearity(name_ + "*" + std::to_string(lambda), std::move(f), std::move(df),
                              zeros_);
}

double BistableNonlinearity::max_abs_derivative(double lo, double hi) const {
  constexpr int kSamples = 2001;
  double best = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / (kSamples - 1);
    best = std::max(best, std::abs(derivative(u)));
  }
  return best;
}

BistableNonlinearity make_cubic() {
  return BistableNonlinearity::polynomial({0.0, 1.0, 0.0, -1.0}, Zeros{-1.0, 0.0, 1.0}, "cubic");
}

bool AdmissibilityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string AdmissibilityReport::summary() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "ok   " : "FAIL ") << c.name << "  residual=" << c.residual << '\n';
  }
  return out.str();
}

double balance_integral(const BistableNonlinearity& nl) {
  static const QuadratureRule rule = gauss_legendre(32);
  const auto& z = nl.zeros();
  return integrate([&](double u) { return nl.evaluate(u); }, z.minus, z.plus, 8, rule);
}

AdmissibilityReport check_admissible(const BistableNonlinearity& nl, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("check_admissible: tol must be positive");
  const auto& z = nl.zeros();
  AdmissibilityReport report;
  auto add_zero = [&](const char* name, double u) {
    const double r = std::abs(nl.evaluate(u));
    report.checks.push_back({name, r, r <= tol});
  };
  add_zero("f(a-) = 0", z.minus);
  add_zero("f(a) = 0", z.mid);
  add_zero("f(a+) = 0", z.plus);

  const double dm = nl.derivative(z.minus);
  const double d0 = nl.derivative(z.mid);
  const double dp = nl.derivative(z.plus);
  report.checks.push_back({"f'(a-) < 0", dm, dm < 0.0});
  report.checks.push_back({"f'(a) > 0", d0, d0 > 0.0});
  report.checks.push_back({"f'(a+) < 0", dp, dp < 0.0});

  const double balance = std::abs(balance_integral(nl));
  report.checks.push_back({"int f = 0", balance, balance <= tol});
  const double wells = std::abs(nl.potential(z.minus) - nl.potential(z.plus));
  report.checks.push_back({"W(a-) = W(a+)", wells, wells <= tol});
  return report;
}

double mobility_constant(const BistableNonlinearity& nl, int n_quad) {
  if (n_quad < 16) throw std::invalid_argument("mobility_constant: n_quad must be >= 16");
  constexpr std::size_t kOrder = 8;
  static const QuadratureRule rule = gauss_legendre(kOrder);
  const auto& z = nl.zeros();
  const double span = z.plus - z.minus;
  const double w_minus = nl.potential(z.minus);
  const double scale = std::max(1.0, std::abs(w_minus));
  const double neg_tol = 1e-12 * scale;

  auto integrand = [&](double phi) {
    const double sn = std::sin(phi);
    const double s = z.minus + span * sn * sn;
    double gap = nl.potential(s) - w_minus;
    if (gap < -neg_tol) {
      std::ostringstream msg;
      msg << "mobility_constant: W(s) - W(a-) = " << gap << " < 0 at s = " << s
          << " (unbalanced reaction or misdeclared zeros)";
      throw Error(msg.str());
    }
    gap = std::max(gap, 0.0);
    return std::sqrt(gap) * span * std::sin(2.0 * phi);
  };
  const std::size_t panels = (static_cast<std::size_t>(n_quad) + kOrder - 1) / kOrder;
  const double integral = integrate(integrand, 0.0, std::numbers::pi / 2.0, panels, rule);
  if (!(integral > 0.0)) throw Error("mobility_constant: degenerate well integral");
  return 1.0 / (std::numbers::sqrt2 * integral);
}

Forcing::Forcing(std::string name, Fn eps_form, Fn limit_form, double bound, double eps)
    : name_(std::move(name)),
      eps_form_(std::move(eps_form)),
      limit_form_(std::move(limit_form)),
      bound_(bound),
      eps_(eps) {
  if (!eps_form_ || !limit_form_) throw std::invalid_argument("Forcing: both forms are required");
}

Forcing Forcing::constant(double delta) {
  auto g = [delta](Point, double, double) { return delta; };
  Forcing forcing("constant", g, g, 0.0, 0.0);
  forcing.kind_ = Kind::constant;
  forcing.parameter_ = delta;
  return forcing;
}

Forcing Forcing::linear_x(double delta) {
  auto g = [delta](Point x, double, double) { return delta * x.x; };
  Forcing forcing("linear_x", g, g, 0.0, 0.0);
  forcing.kind_ = Kind::linear_x;
  forcing.parameter_ = delta;
  return forcing;
}

double Forcing::operator()(Point x, double t, double u) const { return eps_form_(x, t, u); }

double Forcing::limit(Point x, double t, double u) const { return limit_form_(x, t, u); }

double forcing_bound_excess(const Forcing& g, const Box& box, double t_max, double u_lo,
                            double u_hi) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    // Scrambled lattice so the ten points cover both axes.
    const Point x{box.xmin + (i + 0.5) / 10.0 * box.width(),
                  box.ymin + ((3 * i) % 10 + 0.5) / 10.0 * box.height()};
    for (int k = 0; k < 10; ++k) {
      const double t = t_max * k / 9.0;
      for (int m = 0; m < 5; ++m) {
        const double u = u_lo + (u_hi - u_lo) * m / 4.0;
        const double diff = std::abs(g(x, t, u) - g.limit(x, t, u));
        worst = std::max(worst, diff - g.bound() * g.eps());
      }
    }
  }
  return worst;
}

SystemCoupling::SystemCoupling(Fn2 f1, Fn2 f2, Fn2 h, double diffusion)
    : f1_(std::move(f1)), f2_(std::move(f2)), h_(std::move(h)), diffusion_(diffusion) {
  if (!(diffusion_ > 0.0)) throw std::invalid_argument("SystemCoupling: D must be positive");
  if (!f1_ || !h_) throw std::invalid_argument("SystemCoupling: f1 and h are required");
  if (!f2_) f2_ = [](double, double) { return 0.0; };
}

SystemCoupling SystemCoupling::fitzhugh_nagumo(double alpha, double beta, double diffusion,
                                               std::vector<double> f1_coefficients) {
  if (alpha < 0.0 || beta < 0.0) {
    throw std::invalid_argument("fitzhugh_nagumo: alpha and beta must be non-negative");
  }
  auto poly = f1_coefficients;
  SystemCoupling c(
      [poly](double u, double v) { return -evaluate_polynomial(poly, u) - v; },
      [](double, double) { return 0.0; },
      [alpha, beta](double u, double v) { return alpha * u - beta * v; }, diffusion);
  c.fhn_ = FhnConstants{alpha, beta, std::move(f1_coefficients)};
  return c;
}

double SystemCoupling::f1(double u, double v) const { return f1_(u, v); }
double SystemCoupling::f2(double u, double v) const { return f2_(u, v); }
double SystemCoupling::h(double u, double v) const { return h_(u, v); }

double SystemCoupling::invariant_bound(double L, double M) const {
  if (fhn_) {
    if (fhn_->alpha == 0.0) return M;
    if (fhn_->beta == 0.0) throw Error("invariant_bound: beta = 0 admits no invariant rectangle");
    return std::max(M, fhn_->alpha * L / fhn_->beta);
  }
  auto holds = [&](double m1) {
    for (int i = 0; i <= 200; ++i) {
      const double u = -L + 2.0 * L * i / 200.0;
      if (h_(u, -m1) < 0.0 || h_(u, m1) > 0.0) return false;
    }
    return true;
  };
  double hi = std::max(M, 1e-12);
  while (!holds(hi)) {
    hi *= 2.0;
    if (hi > 1e12) throw Error("invariant_bound: no invariant rectangle found");
  }
  if (hi == M || holds(M)) return M;
  double lo = std::max(M, hi / 2.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace layerlab

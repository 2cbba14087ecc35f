#include <cmath>

#include "doctest.h"
#include "layerlab/errors.hpp"
#include "layerlab/nonlinearity.hpp"
#include "layerlab/quadrature.hpp"

using namespace layerlab;

namespace {

// Independent oracle for c0: midpoint rule on sqrt((W - W(a-)) / ...) after
// the substitution s = cos(theta), which removes the endpoint behaviour.
double c0_by_midpoint(double (*W)(double), int n) {
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double theta = M_PI * (k + 0.5) / n;
    const double s = std::cos(theta);
    sum += std::sqrt(std::max(W(s) - W(-1.0), 0.0)) * std::sin(theta);
  }
  return 1.0 / (std::sqrt(2.0) * sum * M_PI / n);
}

double cubic_potential(double s) { return s * s * s * s / 4.0 - s * s / 2.0; }

}  // namespace

TEST_CASE("cubic values, derivative and potential") {
  const auto f = make_cubic();
  CHECK(f(0.5) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(f.derivative(0.0) == 1.0);
  CHECK(f.derivative(1.0) == -2.0);
  CHECK(f.potential(-1.0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(f.potential(1.0) == doctest::Approx(-0.25).epsilon(1e-15));
  for (double s = -1.5; s <= 1.5; s += 0.125) {
    CHECK(f.potential(s) == doctest::Approx(cubic_potential(s)).epsilon(1e-14));
  }
  CHECK(std::abs(balance_integral(f)) <= 1e-12);
  const auto& z = f.zeros();
  CHECK(f(z.minus) == 0.0);
  CHECK(f(z.mid) == 0.0);
  CHECK(f(z.plus) == 0.0);
}

TEST_CASE("non-polynomial nonlinearity uses quadrature for W") {
  // f(u) = sin(pi u) on zeros (-1, 0, 1): balanced, W(s) = (cos(pi s) - 1) / pi.
  BistableNonlinearity f(
      "sine", [](double u) { return std::sin(M_PI * u); },
      [](double u) { return M_PI * std::cos(M_PI * u); }, {-1.0, 0.0, 1.0});
  CHECK_FALSE(f.is_polynomial());
  for (double s = -1.0; s <= 1.0; s += 0.25) {
    CHECK(f.potential(s) == doctest::Approx((std::cos(M_PI * s) - 1.0) / M_PI).epsilon(1e-12));
  }
  CHECK(check_admissible(f, 1e-10).passed());
}

TEST_CASE("check_admissible") {
  const auto cubic = make_cubic();
  const auto ok = check_admissible(cubic, 1e-12);
  CHECK(ok.passed());
  CHECK_FALSE(ok.summary().empty());

  const auto wrong_zero =
      BistableNonlinearity::polynomial({0.0, 1.0, 0.0, -1.0}, {-1.0, 0.1, 1.0}, "misdeclared");
  CHECK_FALSE(check_admissible(wrong_zero, 1e-12).passed());

  // (u + 1)(u - 0.2)(1 - u) = -u^3 + 0.2 u^2 + u - 0.2; int_{-1}^{1} = 2 (0.2/3) - 0.4.
  const auto unbalanced = BistableNonlinearity::polynomial({-0.2, 1.0, 0.2, -1.0},
                                                           {-1.0, 0.2, 1.0}, "unbalanced");
  const auto report = check_admissible(unbalanced, 1e-12);
  CHECK_FALSE(report.passed());
  CHECK(balance_integral(unbalanced) == doctest::Approx(0.4 / 3.0 - 0.4).epsilon(1e-12));
  bool balance_failed = false;
  for (const auto& c : report.checks) {
    if (c.name == "int f = 0" && !c.passed) balance_failed = true;
  }
  CHECK(balance_failed);
}

TEST_CASE("mobility constant") {
  const auto cubic = make_cubic();
  const double c0 = mobility_constant(cubic);
  CHECK(std::abs(c0 - 3.0 / (2.0 * std::sqrt(2.0))) <= 1e-8);
  CHECK(std::abs(c0 - c0_by_midpoint(cubic_potential, 200000)) <= 1e-8);
  CHECK(std::abs(mobility_constant(cubic, 1024) - mobility_constant(cubic, 512)) < 1e-10);

  const auto scaled = cubic.scaled(4.0);
  CHECK(scaled(0.5) == doctest::Approx(4.0 * 0.375));
  CHECK(std::abs(mobility_constant(scaled) - c0 / 2.0) <= 1e-8);
  for (double lambda : {0.25, 2.0, 9.0}) {
    CHECK(std::abs(mobility_constant(cubic.scaled(lambda)) * std::sqrt(lambda) - c0) <= 1e-8);
  }
  // Zeros (0, 1/2, 1): with s = 2u - 1 this is (s - s^3) / 8, so c0 = 8 c0(cubic).
  const auto unit =
      BistableNonlinearity::polynomial({0.0, -0.5, 1.5, -1.0}, {0.0, 0.5, 1.0}, "unit-cubic");
  CHECK(check_admissible(unit, 1e-12).passed());
  CHECK(std::abs(mobility_constant(unit) - 8.0 * c0) <= 1e-8);
  CHECK(std::abs(mobility_constant(unit, 16) - mobility_constant(unit, 32)) < 1e-9);

  CHECK_THROWS(mobility_constant(cubic, 8));
  const auto bad =
      BistableNonlinearity::polynomial({0.0, -1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}, "inverted");
  CHECK_THROWS_AS(mobility_constant(bad), Error);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre(8);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  // degree 15 is exact for 8 nodes
  const double v = integrate([](double x) { return std::pow(x, 14) + x * x * x; }, -1.0, 1.0, 1, rule);
  CHECK(v == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("forcing kinds and perturbation bound") {
  const auto g = Forcing::constant(0.2);
  CHECK(g.kind() == Forcing::Kind::constant);
  CHECK(g({0.3, -0.1}, 0.5, 0.7) == 0.2);
  CHECK(g.limit({0.3, -0.1}, 0.5, 0.7) == 0.2);
  const Box box{-1, 1, -1, 1};
  CHECK(forcing_bound_excess(g, box, 1.0, -1.0, 1.0) <= 0.0);

  const auto lin = Forcing::linear_x(0.5);
  CHECK(lin({0.4, 0.9}, 0.0, 0.0) == doctest::Approx(0.2));
  CHECK(forcing_bound_excess(lin, box, 1.0, -1.0, 1.0) <= 0.0);

  // g^eps = g + 2 eps with bound C = 1 violates |g^eps - g| <= C eps.
  const double eps = 0.1;
  Forcing off(
      "offset", [eps](Point, double, double) { return 2.0 * eps; },
      [](Point, double, double) { return 0.0; }, 1.0, eps);
  CHECK(forcing_bound_excess(off, box, 1.0, -1.0, 1.0) > 0.0);
}

TEST_CASE("fitzhugh-nagumo coupling") {
  const auto c = SystemCoupling::fitzhugh_nagumo(1.0, 1.0, 1.0);
  CHECK(c.f1(0.3, 0.1) == doctest::Approx(-0.1));
  CHECK(c.f2(0.3, 0.1) == 0.0);
  CHECK(c.h(0.3, 0.1) == doctest::Approx(0.2));
  CHECK(c.diffusion() == 1.0);
  REQUIRE(c.fhn().has_value());
  // M1 = max(M, alpha L / beta)
  CHECK(c.invariant_bound(2.0, 0.1) == doctest::Approx(2.0));
  CHECK(c.invariant_bound(2.0, 3.0) == doctest::Approx(3.0));
  const auto d = SystemCoupling::fitzhugh_nagumo(2.0, 0.5, 1.0, {0.0, 0.5});
  CHECK(d.f1(0.4, 0.0) == doctest::Approx(-0.2));
  CHECK(d.invariant_bound(2.0, 0.1) == doctest::Approx(8.0));
  CHECK(SystemCoupling::fitzhugh_nagumo(0.0, 0.0, 1.0).invariant_bound(2.0, 0.3) == 0.3);
  CHECK_THROWS(SystemCoupling::fitzhugh_nagumo(1.0, 0.0, 1.0).invariant_bound(2.0, 0.1));

  // Generic coupling: h = u - v^3 needs M1^3 >= L.
  SystemCoupling generic([](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                         [](double u, double v) { return u - v * v * v; }, 1.0);
  const double m1 = generic.invariant_bound(8.0, 0.5);
  CHECK(m1 >= 2.0 - 1e-9);
  CHECK(m1 <= 2.0 * 1.01);
}

TEST_CASE("evaluate_polynomial") {
  const std::vector<double> p{1.0, -2.0, 0.5};
  CHECK(evaluate_polynomial(p, 2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
  CHECK(evaluate_polynomial({}, 3.0) == 0.0);
}

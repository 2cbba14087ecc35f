#include <cmath>
#include <random>

#include "doctest.h"
#include "layerlab/errors.hpp"
#include "layerlab/interface.hpp"
#include "layerlab/profile.hpp"

using namespace layerlab;

namespace {

GridGeometry square(double h) { return GridGeometry::covering({-1.0, 1.0, -1.0, 1.0}, h); }

ScalarField radial(const GridGeometry& g, Point c, double r) {
  return ScalarField::from_function(g, [&](Point p) { return distance(p, c) - r; });
}

// Dense-sampling oracle for the directed distance.
double sampled_directed(const Curve& a, const Curve& b, double spacing) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.segment_count(); ++k) {
    const Point p = a.segment_start(k);
    const Point q = a.segment_end(k);
    const int n = std::max(1, static_cast<int>(std::ceil(distance(p, q) / spacing)));
    for (int m = 0; m <= n; ++m) {
      const Point x = p + (static_cast<double>(m) / n) * (q - p);
      worst = std::max(worst, closest_point(b, x).distance);
    }
  }
  return worst;
}

const LayerProfile& profile() {
  static const LayerProfile p = solve_profile(make_cubic());
  return p;
}

ScalarField synthetic_layer(const GridGeometry& g, double eps, double r, double shift = 0.0) {
  return ScalarField::from_function(
      g, [&](Point p) { return profile().evaluate((norm(p) - r) / eps) + shift; });
}

}  // namespace

TEST_CASE("level set of a linear field") {
  const auto g = square(0.1);
  const auto f = ScalarField::from_function(g, [](Point p) { return p.x; });
  const auto curves = extract_level_set(f, 0.0);
  REQUIRE(curves.size() == 1);
  CHECK_FALSE(curves[0].closed);
  CHECK(curves[0].size() == static_cast<std::size_t>(g.ny));
  for (const auto& p : curves[0].points) CHECK(std::abs(p.x) <= 1e-15);
  // x < 0 lies on the left, so the contour runs upwards.
  CHECK(curves[0].points.front().y < curves[0].points.back().y);
}

TEST_CASE("level set of a radial field") {
  const double h = 0.02;
  const auto g = square(h);
  const Point c{0.1, -0.05};
  const auto f = radial(g, c, 0.5);
  const auto curves = extract_level_set(f, 0.0);
  REQUIRE(curves.size() == 1);
  REQUIRE(curves[0].closed);
  CHECK(curves[0].signed_area() > 0.0);
  for (const auto& p : curves[0].points) CHECK(std::abs(distance(p, c) - 0.5) <= 5.0 * h * h);
  double residual = 0.0;
  for (const auto& p : curves[0].points) residual = std::max(residual, std::abs(f.sample(p)));
  CHECK(residual <= 1e-10);
  CHECK_NOTHROW(validate_curve(curves[0]));
}

TEST_CASE("level set residual on a wavy field with several components") {
  const auto g = square(0.01);
  const auto f = ScalarField::from_function(
      g, [](Point p) { return std::sin(5 * p.x) * std::cos(4 * p.y) + 0.3 * p.x * p.y; });
  const auto curves = extract_level_set(f, 0.1);
  CHECK(curves.size() > 2);
  double residual = 0.0;
  for (const auto& c : curves)
    for (const auto& p : c.points) residual = std::max(residual, std::abs(f.sample(p) - 0.1));
  CHECK(residual <= 1e-10);
}

TEST_CASE("empty and degenerate level sets") {
  const auto g = square(0.1);
  CHECK(extract_level_set(ScalarField(g, 1.0), 0.0).empty());
  const auto f = radial(g, {0, 0}, 0.5);
  CHECK(extract_level_set(f, 10.0).empty());
}

TEST_CASE("saddle cells follow the centre average") {
  const GridGeometry g{2, 2, 1.0, {0.0, 0.0}};
  // Corners (0,0), (1,0), (1,1), (0,1); (0,0) and (1,1) lie below the level.
  ScalarField f(g, std::vector<double>{-1.0, 1.0, 1.0, -1.0});
  f(1, 1) = -1.0;
  f(0, 1) = 1.0;
  // Centre average 0 is not below the level: each segment cuts off one of
  // the low corners.
  const auto apart = extract_level_set(f, 0.0);
  REQUIRE(apart.size() == 2);
  for (const auto& c : apart) {
    REQUIRE(c.size() == 2);
    const Point mid = 0.5 * (c.points[0] + c.points[1]);
    CHECK((distance(mid, {0, 0}) < 0.5 || distance(mid, {1, 1}) < 0.5));
  }
  // Centre average -0.25: the low corners connect and the high ones are cut off.
  f(1, 0) = 0.5;
  f(0, 1) = 0.5;
  const auto joined = extract_level_set(f, 0.0);
  REQUIRE(joined.size() == 2);
  for (const auto& c : joined) {
    REQUIRE(c.size() == 2);
    const Point mid = 0.5 * (c.points[0] + c.points[1]);
    CHECK((distance(mid, {1, 0}) < 0.5 || distance(mid, {0, 1}) < 0.5));
  }
}

TEST_CASE("signed distance") {
  const auto circle = make_circle({0, 0}, 1.0, 4000);
  CHECK(std::abs(signed_distance(circle.points[17], circle).distance) <= 1e-12);
  CHECK(signed_distance({0, 0}, circle).distance == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(signed_distance({2, 0}, circle).distance == doctest::Approx(1.0).epsilon(1e-12));
  const auto r = signed_distance({0, 2}, circle);
  CHECK(std::abs(distance(r.query, r.foot) - std::abs(r.distance)) <= 1e-14);

  // Sign agrees with u - a away from the curve.
  const auto g = square(0.02);
  const auto u = ScalarField::from_function(
      g, [](Point p) { return std::hypot(p.x / 0.6, p.y / 0.4) - 1.0; });
  const auto curves = extract_level_set(u, 0.0);
  REQUIRE(curves.size() == 1);
  bool agree = true;
  for (int j = 0; j < g.ny; j += 3) {
    for (int i = 0; i < g.nx; i += 3) {
      const Point q = g.node(i, j);
      const double d = signed_distance(q, curves[0]).distance;
      if (std::abs(d) <= g.h * std::sqrt(2.0)) continue;
      if ((d < 0) != (u(i, j) < 0)) agree = false;
    }
  }
  CHECK(agree);
}

TEST_CASE("hausdorff distance") {
  const auto a = make_circle({0, 0}, 0.3, static_cast<std::size_t>(std::ceil(2 * M_PI * 0.3 / 1e-3)));
  const auto b = make_circle({0, 0}, 0.4, static_cast<std::size_t>(std::ceil(2 * M_PI * 0.4 / 1e-3)));
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(std::abs(hausdorff(a, b) - 0.1) <= 1e-6);
  CHECK(hausdorff(a, b) == hausdorff(b, a));

  const auto e = make_ellipse({0.05, 0.0}, 0.45, 0.25, 300);
  const auto c = make_circle({-0.02, 0.03}, 0.33, 211);
  const double hab = hausdorff(e, c);
  CHECK(hab == hausdorff(c, e));
  const double oracle = std::max(sampled_directed(e, c, 1e-5), sampled_directed(c, e, 1e-5));
  CHECK(hab >= oracle - 1e-12);
  CHECK(hab - oracle <= 1e-6);
  // Triangle inequality on a fixed triple.
  const auto f = make_ellipse({0.0, 0.02}, 0.4, 0.3, 257);
  CHECK(hausdorff(e, c) <= hausdorff(e, f) + hausdorff(f, c) + 1e-6);
  CHECK(hausdorff(e, f) <= hausdorff(e, c) + hausdorff(c, f) + 1e-6);
  CHECK(hausdorff(c, f) <= hausdorff(c, e) + hausdorff(e, f) + 1e-6);
}

TEST_CASE("distance band matches brute force") {
  const auto g = square(0.05);
  const std::vector<Curve> cs{make_ellipse({0.1, 0.0}, 0.5, 0.3, 90),
                              make_circle({-0.6, 0.6}, 0.2, 40)};
  const auto band = distance_band(g, cs, 0.3);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Point q = g.node(i, j);
      const double d = std::min(closest_point(cs[0], q).distance, closest_point(cs[1], q).distance);
      const double got = band.distance[g.index(i, j)];
      if (d <= 0.3) {
        CHECK(got == doctest::Approx(d).epsilon(1e-14));
      } else {
        CHECK(std::isinf(got));
      }
    }
  }
}

TEST_CASE("layer error") {
  const double eps = 0.05;
  const auto g = square(eps / 8);
  const auto u = synthetic_layer(g, eps, 0.4);
  CHECK(layer_error(u, profile(), eps) <= 5e-3);
  const double shifted = layer_error(synthetic_layer(g, eps, 0.4, 0.05), profile(), eps);
  CHECK(shifted >= 0.045);
  CHECK(shifted <= 0.055);
  CHECK_THROWS_AS(layer_error(ScalarField(g, 1.0), profile(), eps), EmptyLevelSetError);
  // A contour reaching the boundary is refused.
  const auto open = ScalarField::from_function(g, [](Point p) { return std::tanh(p.x / 0.05); });
  CHECK_THROWS_AS(layer_error(open, profile(), eps), ContourError);
}

TEST_CASE("graph over a reference curve") {
  const auto ref = make_circle({0, 0}, 0.4, 400);
  const auto target = make_circle({0, 0}, 0.42, 4000);
  const auto s = graph_over(ref, target, 0.05);
  REQUIRE(s.size() == ref.size());
  for (const auto& x : s) CHECK(std::abs(x.offset - 0.02) <= 1e-6);
  for (const auto& x : graph_over(ref, ref, 0.05)) CHECK(std::abs(x.offset) <= 1e-15);
  CHECK_THROWS_AS(graph_over(ref, make_circle({0, 0}, 0.5, 400), 0.05), GraphPropertyError);
  try {
    graph_over(ref, make_circle({0, 0}, 0.5, 400), 0.05);
  } catch (const GraphPropertyError& e) {
    CHECK(e.vertex() == 0);
    CHECK(e.intersections() == 0);
  }
  // The normal at vertex 0 runs through a small circle: two crossings.
  CHECK_THROWS_AS(graph_over(ref, make_circle({0.4, 0.0}, 0.02, 64), 0.05), GraphPropertyError);
  try {
    graph_over(ref, make_circle({0.4, 0.0}, 0.02, 64), 0.05);
  } catch (const GraphPropertyError& e) {
    CHECK(e.vertex() == 0);
    CHECK(e.intersections() == 2);
  }

  // Two refinements of the same circle: offsets bounded by twice the sagitta.
  const auto coarse = make_circle({0, 0}, 0.4, 200);
  const auto fine = make_circle({0, 0}, 0.4, 400);
  const double sagitta = 0.4 * (1 - std::cos(M_PI / 200));
  for (const auto& x : graph_over(coarse, fine, 0.05)) CHECK(std::abs(x.offset) <= 2 * sagitta);
}

TEST_CASE("transversality") {
  const double eps = 0.05;
  const auto g = square(eps / 8);
  const auto ref = make_circle({0, 0}, 0.4, 800);
  const auto u = synthetic_layer(g, eps, 0.4);
  const double tube = 2 * eps;
  const double m = transversality(u, ref, tube);
  // Chain rule: the slope of U0 at the tube edge over eps.
  const double expected = profile().slope(tube / eps) / eps;
  CHECK(m > 0.0);
  CHECK(m == doctest::Approx(expected).epsilon(0.05));
  CHECK(transversality(ScalarField(g, 0.3), ref, tube) == 0.0);
  const auto flipped = ScalarField::from_function(g, [&](Point p) { return -u.sample(p); });
  CHECK(transversality(flipped, ref, tube) < 0.0);
}

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "layerlab/io.hpp"

using namespace layerlab;

TEST_CASE("pgm round trip within quantisation") {
  const auto g = GridGeometry::covering({-1, 1, 0, 1}, 0.05);
  const auto f = ScalarField::from_function(g, [](Point p) { return std::sin(3 * p.x) + p.y; });
  const auto path = (std::filesystem::temp_directory_path() / "layerlab_io_test.pgm").string();
  write_pgm(path, f, 0.25);
  const auto back = read_pgm(path);
  CHECK(back.geometry() == g);
  CHECK(max_abs_difference(back, f) <= (f.max() - f.min()) / 65535.0);
  CHECK(back.min() == f.min());
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".txt");
}

TEST_CASE("curve csv round trip is exact") {
  const std::vector<Curve> cs{make_circle({0.1, 0.2}, 0.3, 17), make_ellipse({0, 0}, 0.5, 0.2, 9)};
  const auto path = (std::filesystem::temp_directory_path() / "layerlab_curves.csv").string();
  write_curves_csv(path, cs);
  const auto back = read_curves_csv(path);
  REQUIRE(back.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    REQUIRE(back[c].size() == cs[c].size());
    for (std::size_t k = 0; k < cs[c].size(); ++k) CHECK(back[c].points[k] == cs[c].points[k]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("theta csv") {
  std::vector<GraphSample> s{{{0, 0}, {1, 0}, 0.125}, {{0, 1}, {1, 0}, -0.25}};
  const auto path = (std::filesystem::temp_directory_path() / "layerlab_theta.csv").string();
  write_theta_csv(path, s, 0.5);
  std::ifstream in(path);
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(header == "arclength,theta");
  CHECK(a == "0,0.25");
  CHECK(b == "1,-0.5");
  std::filesystem::remove(path);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(std::nan("")) == "nan");
}

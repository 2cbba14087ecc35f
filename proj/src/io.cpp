#include "layerlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace layerlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_pgm(const std::string& path, const ScalarField& f, double t) {
  const auto& g = f.geometry();
  const double lo = f.min();
  const double hi = f.max();
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  auto out = open_out(path);
  out << "P5\n" << g.nx << ' ' << g.ny << "\n65535\n";
  std::vector<unsigned char> row(2 * static_cast<std::size_t>(g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      const auto q = static_cast<unsigned>(std::lround((f(i, j) - lo) * scale));
      row[2 * i] = static_cast<unsigned char>(q >> 8);
      row[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  auto side = open_out(path + ".txt");
  side << "min = " << format_double(lo) << "\nmax = " << format_double(hi)
       << "\nnx = " << g.nx << "\nny = " << g.ny << "\nh = " << format_double(g.h)
       << "\nx0 = " << format_double(g.origin.x) << "\ny0 = " << format_double(g.origin.y)
       << "\nt = " << format_double(t) << "\n";
}

ScalarField read_pgm(const std::string& path) {
  std::ifstream side(path + ".txt");
  if (!side) throw std::runtime_error("missing sidecar " + path + ".txt");
  double lo = 0, hi = 0, h = 0, x0 = 0, y0 = 0;
  int nx = 0, ny = 0;
  std::string key, eq, value;
  while (side >> key >> eq >> value) {
    if (key == "min") lo = std::stod(value);
    else if (key == "max") hi = std::stod(value);
    else if (key == "nx") nx = std::stoi(value);
    else if (key == "ny") ny = std::stoi(value);
    else if (key == "h") h = std::stod(value);
    else if (key == "x0") x0 = std::stod(value);
    else if (key == "y0") y0 = std::stod(value);
  }
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, ht = 0, maxval = 0;
  in >> magic >> w >> ht >> maxval;
  in.get();
  if (magic != "P5" || w != nx || ht != ny || maxval != 65535) {
    throw std::runtime_error("read_pgm: malformed " + path);
  }
  GridGeometry g{nx, ny, h, {x0, y0}};
  ScalarField f(g, 0.0);
  std::vector<unsigned char> row(2 * static_cast<std::size_t>(nx));
  for (int j = ny - 1; j >= 0; --j) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    for (int i = 0; i < nx; ++i) {
      const unsigned q = (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1];
      f(i, j) = lo + (hi - lo) * q / 65535.0;
    }
  }
  if (!in) throw std::runtime_error("read_pgm: truncated " + path);
  return f;
}

void write_curves_csv(const std::string& path, std::span<const Curve> curves) {
  auto out = open_out(path);
  out << "x,y\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (c > 0) out << "\n";
    for (const Point& p : curves[c].points) {
      out << format_double(p.x) << ',' << format_double(p.y) << '\n';
    }
  }
}

std::vector<Curve> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Curve> curves;
  Curve cur;
  std::string line;
  auto flush = [&] {
    if (!cur.points.empty()) curves.push_back(std::move(cur));
    cur = Curve{};
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line == "x,y") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad curve row: " + line);
    cur.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  flush();
  return curves;
}

void write_theta_csv(const std::string& path, std::span<const GraphSample> samples, double eps) {
  auto out = open_out(path);
  out << "arclength,theta\n";
  double s = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0) s += distance(samples[k].base, samples[k - 1].base);
    out << format_double(s) << ',' << format_double(samples[k].offset / eps) << '\n';
  }
}

}  // namespace layerlab

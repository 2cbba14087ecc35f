#include "layerlab/interface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "layerlab/errors.hpp"

namespace layerlab {

namespace {

constexpr std::int64_t kNone = -1;

}  // namespace

std::vector<Curve> extract_level_set(const ScalarField& f, double level) {
  const auto& g = f.geometry();
  if (!(f.min() < level && level < f.max())) return {};
  const int nx = g.nx;
  const int ny = g.ny;
  const std::size_t n_horizontal = static_cast<std::size_t>(nx - 1) * ny;
  const std::size_t n_edges = n_horizontal + static_cast<std::size_t>(nx) * (ny - 1);
  auto h_id = [&](int i, int j) {
    return static_cast<std::int64_t>(j) * (nx - 1) + i;
  };
  auto v_id = [&](int i, int j) {
    return static_cast<std::int64_t>(n_horizontal) + static_cast<std::int64_t>(j) * nx + i;
  };
  auto edge_point = [&](std::int64_t id) {
    int i0, j0, i1, j1;
    if (id < static_cast<std::int64_t>(n_horizontal)) {
      j0 = static_cast<int>(id / (nx - 1));
      i0 = static_cast<int>(id % (nx - 1));
      i1 = i0 + 1;
      j1 = j0;
    } else {
      const std::int64_t r = id - static_cast<std::int64_t>(n_horizontal);
      j0 = static_cast<int>(r / nx);
      i0 = static_cast<int>(r % nx);
      i1 = i0;
      j1 = j0 + 1;
    }
    const double v0 = f(i0, j0);
    const double v1 = f(i1, j1);
    const double t = std::clamp((level - v0) / (v1 - v0), 0.0, 1.0);
    const Point p0 = g.node(i0, j0);
    const Point p1 = g.node(i1, j1);
    return p0 + t * (p1 - p0);
  };

  std::vector<std::int64_t> next(n_edges, kNone);
  std::vector<std::uint8_t> has_prev(n_edges, 0);
  auto link = [&](std::int64_t from, std::int64_t to, int i, int j) {
    if (next[from] != kNone || has_prev[to]) {
      std::ostringstream msg;
      msg << "extract_level_set: cannot chain segment in cell (" << i << ", " << j
          << "): values " << f(i, j) << ", " << f(i + 1, j) << ", " << f(i + 1, j + 1) << ", "
          << f(i, j + 1) << " at level " << level;
      throw ContourError(msg.str());
    }
    next[from] = to;
    has_prev[to] = 1;
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      // Corners and edges in counter-clockwise order; edge k joins corner k
      // to corner k + 1.
      const std::array<double, 4> v{f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)};
      const std::array<bool, 4> in{v[0] < level, v[1] < level, v[2] < level, v[3] < level};
      const int count = in[0] + in[1] + in[2] + in[3];
      if (count == 0 || count == 4) continue;
      const std::array<std::int64_t, 4> edge{h_id(i, j), v_id(i + 1, j), h_id(i, j + 1),
                                             v_id(i, j)};
      std::array<int, 2> exits{};
      std::array<int, 2> enters{};
      int n_exit = 0;
      int n_enter = 0;
      for (int k = 0; k < 4; ++k) {
        const bool a = in[k];
        const bool b = in[(k + 1) % 4];
        if (a && !b) exits[n_exit++] = k;
        if (!a && b) enters[n_enter++] = k;
      }
      if (n_exit == 1) {
        link(edge[exits[0]], edge[enters[0]], i, j);
      } else {
        // Saddle: the centre average decides whether the inside corners connect.
        const bool centre_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) < level;
        for (int m = 0; m < 2; ++m) {
          const int k = exits[m];
          const int partner = centre_in ? (k + 1) % 4 : (k + 3) % 4;
          link(edge[k], edge[partner], i, j);
        }
      }
    }
  }

  std::vector<Curve> curves;
  std::vector<std::uint8_t> visited(n_edges, 0);
  auto push_point = [](Curve& c, Point p) {
    if (c.points.empty() || !(c.points.back() == p)) c.points.push_back(p);
  };
  // Open chains start on the grid boundary.
  for (std::size_t e = 0; e < n_edges; ++e) {
    if (next[e] == kNone || has_prev[e]) continue;
    Curve c;
    c.closed = false;
    std::int64_t cur = static_cast<std::int64_t>(e);
    while (cur != kNone) {
      visited[cur] = 1;
      push_point(c, edge_point(cur));
      cur = next[cur];
    }
    curves.push_back(std::move(c));
  }
  for (std::size_t e = 0; e < n_edges; ++e) {
    if (next[e] == kNone || visited[e]) continue;
    Curve c;
    c.closed = true;
    std::int64_t cur = static_cast<std::int64_t>(e);
    do {
      visited[cur] = 1;
      push_point(c, edge_point(cur));
      cur = next[cur];
      if (cur == kNone) throw ContourError("extract_level_set: broken closed contour");
    } while (cur != static_cast<std::int64_t>(e));
    if (c.points.size() > 1 && c.points.front() == c.points.back()) c.points.pop_back();
    curves.push_back(std::move(c));
  }
  return curves;
}

SignedDistanceResult signed_distance(Point q, const Curve& c) {
  const ClosestPoint cp = closest_point(c, q);
  SignedDistanceResult r{q, cp.distance, cp.foot};
  if (cp.distance == 0.0) return r;
  // Left of a counter-clockwise curve is the enclosed region.
  const bool enclosed = locate(c, q) == Side::inside;
  const bool left = c.signed_area() >= 0.0 ? enclosed : !enclosed;
  if (left) r.distance = -r.distance;
  return r;
}

namespace {

struct Probe {
  Point p;
  double d = 0.0;
  std::size_t segment = 0;
};

double segment_distance(const Curve& c, std::size_t k, Point q) {
  return distance(q, closest_on_segment(q, c.segment_start(k), c.segment_end(k)));
}

}  // namespace

double directed_hausdorff(const Curve& a, const Curve& b) {
  if (a.points.empty() || b.points.empty()) {
    throw std::invalid_argument("hausdorff: empty curve");
  }
  auto probe = [&](Point q) {
    const ClosestPoint cp = closest_point(b, q);
    return Probe{q, cp.distance, cp.segment};
  };
  const std::size_t mb = b.segment_count();
  // min over a few candidate segments j of max(dist_j(p0), dist_j(p1)); each
  // dist_j is convex along the interval, so this bounds the true maximum.
  auto upper_bound = [&](const Probe& p0, const Probe& p1) {
    double ub = std::max(p0.d, p1.d) + distance(p0.p, p1.p);
    if (mb == 0) return ub;
    for (const std::size_t base : {p0.segment, p1.segment}) {
      for (int off = -1; off <= 1; ++off) {
        std::ptrdiff_t j = static_cast<std::ptrdiff_t>(base) + off;
        if (b.closed) {
          j = (j + static_cast<std::ptrdiff_t>(mb)) % static_cast<std::ptrdiff_t>(mb);
        } else if (j < 0 || j >= static_cast<std::ptrdiff_t>(mb)) {
          continue;
        }
        const auto k = static_cast<std::size_t>(j);
        ub = std::min(ub, std::max(segment_distance(b, k, p0.p), segment_distance(b, k, p1.p)));
      }
    }
    return ub;
  };

  std::vector<Probe> vertex(a.points.size());
  double best = 0.0;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    vertex[k] = probe(a.points[k]);
    best = std::max(best, vertex[k].d);
  }
  constexpr double kTol = 1e-12;
  std::vector<std::pair<Probe, Probe>> stack;
  for (std::size_t k = 0; k < a.segment_count(); ++k) {
    stack.emplace_back(vertex[k], vertex[(k + 1) % a.points.size()]);
    while (!stack.empty()) {
      auto [p0, p1] = stack.back();
      stack.pop_back();
      if (upper_bound(p0, p1) <= best + kTol) continue;
      const Probe mid = probe(0.5 * (p0.p + p1.p));
      best = std::max(best, mid.d);
      stack.emplace_back(p0, mid);
      stack.emplace_back(mid, p1);
    }
  }
  return best;
}

double hausdorff(const Curve& a, const Curve& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

DistanceBand distance_band(const GridGeometry& g, std::span<const Curve> curves, double radius) {
  DistanceBand band;
  band.distance.assign(g.size(), std::numeric_limits<double>::infinity());
  band.curve.assign(g.size(), 0);
  band.segment.assign(g.size(), 0);
  band.param.assign(g.size(), 0.0);
  auto lo_index = [&](double v, double origin, int n) {
    return std::clamp(static_cast<int>(std::ceil((v - origin) / g.h)) - 1, 0, n - 1);
  };
  auto hi_index = [&](double v, double origin, int n) {
    return std::clamp(static_cast<int>(std::floor((v - origin) / g.h)) + 1, -1, n - 1);
  };
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const Curve& curve = curves[c];
    for (std::size_t k = 0; k < curve.segment_count(); ++k) {
      const Point a = curve.segment_start(k);
      const Point b = curve.segment_end(k);
      const int i0 = lo_index(std::min(a.x, b.x) - radius, g.origin.x, g.nx);
      const int i1 = hi_index(std::max(a.x, b.x) + radius, g.origin.x, g.nx);
      const int j0 = lo_index(std::min(a.y, b.y) - radius, g.origin.y, g.ny);
      const int j1 = hi_index(std::max(a.y, b.y) + radius, g.origin.y, g.ny);
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          double s = 0.0;
          const Point q = g.node(i, j);
          const double d = distance(q, closest_on_segment(q, a, b, &s));
          const std::size_t idx = g.index(i, j);
          if (d <= radius && d < band.distance[idx]) {
            band.distance[idx] = d;
            band.curve[idx] = static_cast<std::uint32_t>(c);
            band.segment[idx] = static_cast<std::uint32_t>(k);
            band.param[idx] = s;
          }
        }
      }
    }
  }
  return band;
}

double layer_error(const ScalarField& u, const LayerProfile& p, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("layer_error: eps must be positive");
  const double a = p.anchor();
  const auto curves = extract_level_set(u, a);
  if (curves.empty()) throw EmptyLevelSetError("layer_error: the level set {u = a} is empty");
  for (const auto& c : curves) {
    if (!c.closed) throw ContourError("layer_error: level set leaves the domain");
  }
  const auto& g = u.geometry();
  const DistanceBand band = distance_band(g, curves, p.z_max() * eps);
  const auto values = u.values();
  double worst = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double sign = values[k] < a ? -1.0 : 1.0;
    const double d = band.distance[k];
    const double z = std::isinf(d) ? sign * std::numeric_limits<double>::infinity() : sign * d / eps;
    worst = std::max(worst, std::abs(values[k] - p.evaluate(z)));
  }
  return worst;
}

std::vector<GraphSample> graph_over(const Curve& reference, const Curve& target, double tube) {
  if (!(tube > 0.0)) throw std::invalid_argument("graph_over: tube must be positive");
  std::vector<GraphSample> out;
  out.reserve(reference.size());
  std::vector<double> hits;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const Point p = reference.points[k];
    const Point n = reference.outward_normal(k);
    hits.clear();
    for (std::size_t m = 0; m < target.segment_count(); ++m) {
      const Point a = target.segment_start(m);
      const Point e = target.segment_end(m) - a;
      // p + s n = a + tau e
      const double den = cross(n, e);
      if (den == 0.0) continue;
      const Point ap = a - p;
      const double s = cross(ap, e) / den;
      const double tau = cross(ap, n) / den;
      if (tau < 0.0 || tau > 1.0 || std::abs(s) > tube) continue;
      hits.push_back(s);
    }
    std::sort(hits.begin(), hits.end());
    // A normal through a target vertex is reported by both adjacent segments.
    const auto last = std::unique(hits.begin(), hits.end(), [tube](double x, double y) {
      return std::abs(x - y) <= 1e-12 * tube;
    });
    const auto count = static_cast<int>(last - hits.begin());
    if (count != 1) {
      std::ostringstream msg;
      msg << "graph_over: normal line at reference vertex " << k << " (" << p.x << ", " << p.y
          << ") meets the target " << count << " times within |s| <= " << tube;
      throw GraphPropertyError(msg.str(), k, count);
    }
    out.push_back({p, n, hits.front()});
  }
  return out;
}

double transversality(const ScalarField& u, const Curve& reference, double tube) {
  if (!(tube > 0.0)) throw std::invalid_argument("transversality: tube must be positive");
  const auto& g = u.geometry();
  const std::array<Curve, 1> curves{reference};
  const DistanceBand band = distance_band(g, curves, tube);
  std::vector<Point> normals(reference.size());
  for (std::size_t k = 0; k < reference.size(); ++k) normals[k] = reference.outward_normal(k);

  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      if (std::isinf(band.distance[idx])) continue;
      const int il = std::max(i - 1, 0);
      const int ir = std::min(i + 1, g.nx - 1);
      const int jd = std::max(j - 1, 0);
      const int ju = std::min(j + 1, g.ny - 1);
      const Point grad{(u(ir, j) - u(il, j)) / (g.h * (ir - il)),
                       (u(i, ju) - u(i, jd)) / (g.h * (ju - jd))};
      const std::size_t seg = band.segment[idx];
      const double s = band.param[idx];
      Point n = (1.0 - s) * normals[seg] + s * normals[(seg + 1) % reference.size()];
      const double len = norm(n);
      if (len > 0.0) n = (1.0 / len) * n;
      worst = std::min(worst, dot(grad, n));
    }
  }
  return std::isinf(worst) ? 0.0 : worst;
}

}  // namespace layerlab

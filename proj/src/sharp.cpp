#include "layerlab/sharp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "layerlab/errors.hpp"
#include "layerlab/pde.hpp"
#include "layerlab/quadrature.hpp"

namespace layerlab {

double RadialTrajectory::radius_at(double t) const {
  if (samples.empty()) throw std::logic_error("radius_at: empty trajectory");
  if (t <= samples.front().t) return samples.front().R;
  if (t >= samples.back().t) return samples.back().R;
  const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const RadialState& s, double v) { return s.t < v; });
  const RadialState& hi = *it;
  const RadialState& lo = *(it - 1);
  if (hi.t == t) return hi.R;
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.R + w * (hi.R - lo.R);
}

LimitForcing::LimitForcing(Fn fn) : fn_(std::move(fn)) {}

LimitForcing LimitForcing::zero() { return LimitForcing(); }

LimitForcing LimitForcing::constant(double value) {
  LimitForcing F;
  F.value_ = value;
  return F;
}

LimitForcing LimitForcing::from_forcing(const Forcing& g, const BistableNonlinearity& nl) {
  const double c0 = mobility_constant(nl);
  const double lo = nl.zeros().minus;
  const double hi = nl.zeros().plus;
  if (g.kind() == Forcing::Kind::constant) return constant(c0 * (hi - lo) * g.parameter());
  const QuadratureRule rule = gauss_legendre(16);
  return LimitForcing([g, c0, lo, hi, rule](Point p, double t) {
    return c0 * integrate([&](double r) { return g.limit(p, t, r); }, lo, hi, 4, rule);
  });
}

double LimitForcing::operator()(Point p, double t) const { return fn_ ? fn_(p, t) : value_; }

namespace {

// Step from t towards `target`, never overshooting and never leaving a sliver.
double next_step(double t, double target, double dt) {
  const double remaining = target - t;
  return remaining <= dt * (1.0 + 1e-9) ? remaining : dt;
}

std::vector<double> event_times(const std::vector<double>& snapshots, double t_end) {
  std::vector<double> events;
  for (double s : snapshots) {
    if (s > 0.0 && s < t_end) events.push_back(s);
  }
  events.push_back(t_end);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

}  // namespace

RadialTrajectory evolve_radial(double R0, int N, const LimitForcing& F, double t_end, double dt) {
  if (!(R0 > 0.0)) throw std::invalid_argument("evolve_radial: R0 must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_radial: dt must be positive");
  if (N < 2) throw std::invalid_argument("evolve_radial: N must be at least 2");
  if (t_end < 0.0) throw std::invalid_argument("evolve_radial: t_end must be nonnegative");
  const double n1 = N - 1;
  auto rhs = [&](double R, double t) { return -n1 / R + F(Point{R, 0.0}, t); };

  RadialTrajectory out;
  double R = R0;
  double t = 0.0;
  out.samples.push_back({R, t, N});
  while (t < t_end) {
    const double h = next_step(t, t_end, dt);
    auto extinct = [&](double upper) {
      std::ostringstream msg;
      msg << "evolve_radial: interface vanishes after t = " << t << " (R = " << R << ")";
      return ExtinctionError(msg.str(), t, upper);
    };
    const double k1 = rhs(R, t);
    // Linear prediction of the zero crossing.
    if (k1 < 0.0 && R + h * k1 <= 0.1 * R) throw extinct(t + R / -k1);
    const double r2 = R + 0.5 * h * k1;
    if (!(r2 > 0.0)) throw extinct(t + h);
    const double k2 = rhs(r2, t + 0.5 * h);
    const double r3 = R + 0.5 * h * k2;
    if (!(r3 > 0.0)) throw extinct(t + h);
    const double k3 = rhs(r3, t + 0.5 * h);
    const double r4 = R + h * k3;
    if (!(r4 > 0.0)) throw extinct(t + h);
    const double k4 = rhs(r4, t + h);
    const double next = R + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(next > 0.0) || !std::isfinite(next)) throw extinct(t + h);
    R = next;
    t = (h == t_end - t) ? t_end : t + h;
    out.samples.push_back({R, t, N});
  }
  return out;
}

namespace {

Point catmull_rom(Point p0, Point p1, Point p2, Point p3, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return 0.5 * (2.0 * p1 + u * (p2 - p0) + u2 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                u3 * (3.0 * p1 - p0 - 3.0 * p2 + p3));
}

class FrontTracker {
 public:
  FrontTracker(Curve c, const CurveFlowOptions& options)
      : curve_(std::move(c)), interval_(options.remesh_interval) {
    validate_curve(curve_);
    if (curve_.signed_area() <= 0.0) {
      throw GeometryError("front tracking: curve must be counter-clockwise");
    }
    if (interval_ < 1) throw std::invalid_argument("front tracking: remesh_interval must be >= 1");
    target_ = options.target_spacing > 0.0 ? options.target_spacing : curve_.mean_segment_length();
  }

  const Curve& curve() const { return curve_; }

  // forcing(p, t) gives F at a node.
  template <class Fn>
  void advance(double dt, double t, Fn&& forcing) {
    const double ds = curve_.min_segment_length();
    const double limit = 0.25 * ds * ds;
    const auto n_sub = static_cast<long>(std::max(1.0, std::ceil(dt / limit)));
    const double sub = dt / static_cast<double>(n_sub);
    for (long s = 0; s < n_sub; ++s) step(sub, t + static_cast<double>(s) * sub, forcing);
  }

 private:
  template <class Fn>
  void step(double dt, double t, Fn& forcing) {
    const std::size_t n = curve_.size();
    next_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Point prev = curve_.points[(k + n - 1) % n];
      const Point cur = curve_.points[k];
      const Point nxt = curve_.points[(k + 1) % n];
      const Point a = cur - prev;
      const Point b = nxt - cur;
      const Point c = nxt - prev;
      const double kappa = 2.0 * cross(a, b) / (norm(a) * norm(b) * norm(c));
      const Point normal = curve_.outward_normal(k);
      next_[k] = cur + (dt * (-kappa + forcing(cur, t))) * normal;
    }
    curve_.points.swap(next_);
    if (++steps_ % interval_ == 0) remesh();
    if (self_intersects(curve_)) {
      std::ostringstream msg;
      msg << "front tracking: curve self-intersects at t = " << t + dt;
      throw GeometryError(msg.str());
    }
  }

  void remesh() {
    const std::size_t n = curve_.size();
    std::vector<double> s(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      s[k + 1] = s[k] + distance(curve_.points[k], curve_.points[(k + 1) % n]);
    }
    const double L = s[n];
    std::size_t m = n;
    const double spacing = L / static_cast<double>(n);
    if (spacing < 0.5 * target_ || spacing > 1.5 * target_) {
      m = static_cast<std::size_t>(std::lround(L / target_));
    }
    if (m < 8) {
      std::ostringstream msg;
      msg << "front tracking: curve collapsed (length " << L << ")";
      throw GeometryError(msg.str());
    }
    const auto& p = curve_.points;
    next_.assign(m, Point{});
    next_[0] = p[0];
    std::size_t k = 0;
    for (std::size_t j = 1; j < m; ++j) {
      const double target = L * static_cast<double>(j) / static_cast<double>(m);
      while (k + 1 < n && s[k + 1] <= target) ++k;
      const double len = s[k + 1] - s[k];
      const double u = len > 0.0 ? std::clamp((target - s[k]) / len, 0.0, 1.0) : 0.0;
      next_[j] = catmull_rom(p[(k + n - 1) % n], p[k], p[(k + 1) % n], p[(k + 2) % n], u);
    }
    curve_.points.swap(next_);
  }

  Curve curve_;
  int interval_;
  double target_ = 0.0;
  long steps_ = 0;
  std::vector<Point> next_;
};

}  // namespace

CurveTrajectory evolve_curve(const Curve& c, const LimitForcing& F, double t_end, double dt,
                             const CurveFlowOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_curve: dt must be positive");
  FrontTracker tracker(c, options);
  CurveTrajectory out;
  out.times.push_back(0.0);
  out.curves.push_back(tracker.curve());
  double t = 0.0;
  auto forcing = [&F](Point p, double time) { return F(p, time); };
  for (double event : event_times(options.snapshot_times, t_end)) {
    while (t < event) {
      const double h = next_step(t, event, dt);
      tracker.advance(h, t, forcing);
      t = (h == event - t) ? event : t + h;
    }
    out.times.push_back(t);
    out.curves.push_back(tracker.curve());
  }
  return out;
}

CouplingIntegral::CouplingIntegral(const SystemCoupling& coupling, const BistableNonlinearity& nl,
                                   double v_lo, double v_hi, double spacing)
    : coupling_(coupling),
      a_minus_(nl.zeros().minus),
      a_plus_(nl.zeros().plus),
      v_lo_(v_lo),
      spacing_(spacing) {
  if (!(v_hi > v_lo) || !(spacing > 0.0)) {
    throw std::invalid_argument("CouplingIntegral: need v_lo < v_hi and spacing > 0");
  }
  const auto n = static_cast<std::size_t>(std::ceil((v_hi - v_lo) / spacing)) + 1;
  table_.resize(n);
  for (std::size_t k = 0; k < n; ++k) table_[k] = exact(v_lo + spacing * static_cast<double>(k));
}

double CouplingIntegral::exact(double v) const {
  static const QuadratureRule rule = gauss_legendre(16);
  return integrate([&](double r) { return coupling_.f1(r, v); }, a_minus_, a_plus_, 2, rule);
}

double CouplingIntegral::operator()(double v) const {
  const double x = (v - v_lo_) / spacing_;
  const auto n = static_cast<std::ptrdiff_t>(table_.size());
  const auto k = static_cast<std::ptrdiff_t>(std::floor(x));
  if (k < 1 || k + 2 >= n) return exact(v);
  const double u = x - static_cast<double>(k);
  const double p0 = table_[k - 1];
  const double p1 = table_[k];
  const double p2 = table_[k + 1];
  const double p3 = table_[k + 2];
  return 0.5 * (2.0 * p1 + u * (p2 - p0) + u * u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                u * u * u * (3.0 * p1 - p0 - 3.0 * p2 + p3));
}

namespace {

void fill_step_function(ScalarField& out, const Curve& c, const BistableNonlinearity& nl,
                        std::vector<double>& xs) {
  const GridGeometry& g = out.geometry();
  std::fill(out.data(), out.data() + g.size(), nl.zeros().plus);
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    xs.clear();
    for (std::size_t k = 0; k < c.segment_count(); ++k) {
      const Point a = c.segment_start(k);
      const Point b = c.segment_end(k);
      // Same half-open rule as locate().
      if ((a.y <= y) != (b.y <= y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    std::size_t passed = 0;
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i);
      while (passed < xs.size() && xs[passed] <= x) ++passed;
      // Crossings strictly to the right of x.
      if ((xs.size() - passed) % 2 == 1) out(i, j) = nl.zeros().minus;
    }
  }
}

// v + dt (D Lap v + h(u, v)) with mirror ghosts; false if some value leaves
// [-bound, bound].
template <class H>
bool react_diffuse_v(const ScalarField& v, const ScalarField& u, ScalarField& out, double D,
                     double dt, double bound, H&& h) {
  const GridGeometry& g = v.geometry();
  const int nx = g.nx;
  const int ny = g.ny;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const double* vv = v.data();
  const double* uu = u.data();
  double* o = out.data();
  bool ok = true;
  for (int j = 0; j < ny; ++j) {
    const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(j) * nx;
    const std::ptrdiff_t dn = static_cast<std::ptrdiff_t>(j == 0 ? 1 : j - 1) * nx;
    const std::ptrdiff_t up = static_cast<std::ptrdiff_t>(j == ny - 1 ? ny - 2 : j + 1) * nx;
    for (int i = 0; i < nx; ++i) {
      const int l = i == 0 ? 1 : i - 1;
      const int r = i == nx - 1 ? nx - 2 : i + 1;
      const double c = vv[row + i];
      const double lap = (vv[row + l] + vv[row + r] + vv[dn + i] + vv[up + i] - 4.0 * c) * inv_h2;
      const double val = c + dt * (D * lap + h(uu[row + i], c));
      o[row + i] = val;
      ok &= std::abs(val) <= bound;
    }
  }
  return ok;
}

}  // namespace

ScalarField step_function(const GridGeometry& g, const Curve& c, const BistableNonlinearity& nl) {
  ScalarField out(g);
  std::vector<double> xs;
  fill_step_function(out, c, nl, xs);
  return out;
}

Side inside_outside(const Curve& c, Point q) { return locate(c, q); }

RDLimitTrajectory evolve_rd_limit(const Curve& c, const ScalarField& v0,
                                  const SystemCoupling& coupling, const BistableNonlinearity& nl,
                                  double c0, double t_end, double dt,
                                  const CurveFlowOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_rd_limit: dt must be positive");
  const GridGeometry& g = v0.geometry();
  const Box box = g.box();
  auto check_inside = [&](const Curve& curve, double t) {
    for (const Point& p : curve.points) {
      if (!(p.x > box.xmin && p.x < box.xmax && p.y > box.ymin && p.y < box.ymax)) {
        std::ostringstream msg;
        msg << "evolve_rd_limit: curve leaves the grid at t = " << t << " near (" << p.x << ", "
            << p.y << ")";
        throw GeometryError(msg.str());
      }
    }
  };
  check_inside(c, 0.0);
  const double D = coupling.diffusion();
  if (D > 0.0 && dt > g.h * g.h / (4.0 * D * 1.01)) {
    throw std::invalid_argument("evolve_rd_limit: dt exceeds h^2 / (4 D 1.01)");
  }
  const double L = std::max(std::abs(nl.zeros().minus), std::abs(nl.zeros().plus));
  double M = 0.0;
  for (double x : v0.values()) M = std::max(M, std::abs(x));
  const double v_bound = coupling.invariant_bound(L, M);
  const CouplingIntegral integral(coupling, nl, -v_bound - 0.05, v_bound + 0.05);
  const double blow_up = kBlowUpBound * std::max(1.0, v_bound);

  FrontTracker tracker(c, options);
  ScalarField v = v0;
  ScalarField v_next = v0;
  ScalarField u(g);
  std::vector<double> crossings;
  const auto& fhn = coupling.fhn();
  RDLimitTrajectory out;
  out.times.push_back(0.0);
  out.curves.push_back(tracker.curve());
  out.v.push_back(v);
  double t = 0.0;
  auto forcing = [&](Point p, double) { return -c0 * integral(v.sample(p)); };
  for (double event : event_times(options.snapshot_times, t_end)) {
    while (t < event) {
      const double h = next_step(t, event, dt);
      fill_step_function(u, tracker.curve(), nl, crossings);
      const bool ok =
          fhn ? react_diffuse_v(v, u, v_next, D, h, blow_up,
                                [a = fhn->alpha, b = fhn->beta](double uu, double vv) { return a * uu - b * vv; })
              : react_diffuse_v(v, u, v_next, D, h, blow_up,
                                [&](double uu, double vv) { return coupling.h(uu, vv); });
      if (!ok) {
        std::ostringstream msg;
        msg << "evolve_rd_limit: v blew up at t = " << t + h;
        throw BlowUpError(msg.str(), t + h, v_next.max());
      }
      tracker.advance(h, t, forcing);
      std::swap(v, v_next);
      t = (h == event - t) ? event : t + h;
      check_inside(tracker.curve(), t);
    }
    out.times.push_back(t);
    out.curves.push_back(tracker.curve());
    out.v.push_back(v);
  }
  return out;
}

}  // namespace layerlab

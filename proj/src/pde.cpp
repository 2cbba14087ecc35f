#include "layerlab/pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "layerlab/errors.hpp"

namespace layerlab {

namespace {

constexpr int kDim = 2;

// Calls body(f) with an inlineable evaluator for the reaction.
template <class Body>
void with_reaction(const BistableNonlinearity& nl, Body&& body) {
  if (nl.is_polynomial() && nl.coefficients().size() <= 4) {
    std::array<double, 4> c{};
    std::copy(nl.coefficients().begin(), nl.coefficients().end(), c.begin());
    body([c](double u) { return c[0] + u * (c[1] + u * (c[2] + u * c[3])); });
  } else if (nl.is_polynomial()) {
    std::vector<double> c(nl.coefficients().begin(), nl.coefficients().end());
    body([c](double u) { return evaluate_polynomial(c, u); });
  } else {
    body([&nl](double u) { return nl.evaluate(u); });
  }
}

// Row neighbours with mirror ghosts.
inline int mirror_below(int j) { return j == 0 ? 1 : j - 1; }
inline int mirror_above(int j, int n) { return j == n - 1 ? n - 2 : j + 1; }

// One explicit update out = u + dt (Lap u + rate(i, j, u)). Returns false if
// a value left [-bound, bound] or is not finite.
template <class Rate>
bool diffuse_react(const GridGeometry& g, const double* u, double* out, double dt, double bound,
                   Rate&& rate, double diffusion = 1.0) {
  const int nx = g.nx;
  const int ny = g.ny;
  const double inv_h2 = 1.0 / (g.h * g.h);
  int bad = 0;
  for (int j = 0; j < ny; ++j) {
    const double* row = u + static_cast<std::ptrdiff_t>(j) * nx;
    const double* dn = u + static_cast<std::ptrdiff_t>(mirror_below(j)) * nx;
    const double* up = u + static_cast<std::ptrdiff_t>(mirror_above(j, ny)) * nx;
    double* o = out + static_cast<std::ptrdiff_t>(j) * nx;
    auto node = [&](int i, double left, double right) {
      const double c = row[i];
      const double lap = (left + right + dn[i] + up[i] - 4.0 * c) * inv_h2;
      const double val = c + dt * (diffusion * lap + rate(i, j, c));
      o[i] = val;
      bad |= !(std::abs(val) <= bound);
    };
    node(0, row[1], row[1]);
    for (int i = 1; i < nx - 1; ++i) node(i, row[i - 1], row[i + 1]);
    node(nx - 1, row[nx - 2], row[nx - 2]);
  }
  return bad == 0;
}

void check_dt(double dt, double bound, const char* where) {
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << where << ": dt = " << dt << " violates the stability bound " << bound;
    throw std::invalid_argument(msg.str());
  }
}

void allen_cahn_update(const ScalarField& u, ScalarField& out, const ACParams& p, double dt) {
  const auto& g = u.geometry();
  const double eps = p.eps;
  const double inv_eps2 = 1.0 / (eps * eps);
  const double t = p.t;
  bool ok = true;
  with_reaction(p.nl, [&](auto f) {
    if (!p.forcing) {
      ok = diffuse_react(g, u.data(), out.data(), dt, kBlowUpBound,
                         [&](int, int, double c) { return f(c) * inv_eps2; });
      return;
    }
    const Forcing& forcing = *p.forcing;
    const double delta = forcing.parameter();
    switch (forcing.kind()) {
      case Forcing::Kind::constant:
        ok = diffuse_react(g, u.data(), out.data(), dt, kBlowUpBound, [&](int, int, double c) {
          return (f(c) - eps * delta) * inv_eps2;
        });
        break;
      case Forcing::Kind::linear_x:
        ok = diffuse_react(g, u.data(), out.data(), dt, kBlowUpBound, [&](int i, int, double c) {
          return (f(c) - eps * (delta * g.x(i))) * inv_eps2;
        });
        break;
      case Forcing::Kind::custom:
        ok = diffuse_react(g, u.data(), out.data(), dt, kBlowUpBound, [&](int i, int j, double c) {
          return (f(c) - eps * forcing(g.node(i, j), t, c)) * inv_eps2;
        });
        break;
    }
  });
  if (!ok) {
    std::ostringstream msg;
    msg << "step_allen_cahn: solution left [-" << kBlowUpBound << ", " << kBlowUpBound
        << "] at t = " << t + dt;
    throw BlowUpError(msg.str(), t + dt, out.max());
  }
}

// Step length that lands exactly on `target`.
double step_towards(double t, double target, double dt) {
  const double remaining = target - t;
  return remaining <= dt * (1.0 + 1e-9) ? remaining : dt;
}

}  // namespace

ScalarField laplacian_neumann(const ScalarField& f) {
  const auto& g = f.geometry();
  if (g.nx < 3 || g.ny < 3) throw std::invalid_argument("laplacian_neumann: need nx, ny >= 3");
  ScalarField out(g);
  // dt = 1 with a zero rate gives u + Lap u.
  diffuse_react(g, f.data(), out.data(), 1.0, std::numeric_limits<double>::infinity(),
                [](int, int, double) { return 0.0; });
  const auto in = f.values();
  auto o = out.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] -= in[k];
  return out;
}

double allen_cahn_dt_bound(const GridGeometry& g, double eps, const BistableNonlinearity& nl) {
  const auto& z = nl.zeros();
  const double fprime = nl.max_abs_derivative(z.minus, z.plus);
  return 1.0 / (1.01 * (2.0 * kDim / (g.h * g.h) + fprime / (eps * eps)));
}

ScalarField step_allen_cahn(const ScalarField& u, ACParams& p) {
  check_dt(p.dt, allen_cahn_dt_bound(u.geometry(), p.eps, p.nl), "step_allen_cahn");
  ScalarField out(u.geometry());
  allen_cahn_update(u, out, p, p.dt);
  p.t += p.dt;
  return out;
}

SimulationResult simulate_ac(ScalarField u0, ACParams& p, double t_end,
                             std::vector<Observer> observers) {
  if (t_end < p.t) throw std::invalid_argument("simulate_ac: t_end precedes the current time");
  check_dt(p.dt, allen_cahn_dt_bound(u0.geometry(), p.eps, p.nl), "simulate_ac");
  std::stable_sort(observers.begin(), observers.end(),
                   [](const Observer& a, const Observer& b) { return a.time < b.time; });

  SimulationResult result{std::move(u0), p.t, 0};
  ScalarField scratch(result.field.geometry());
  auto advance_to = [&](double target) {
    while (p.t < target) {
      const double dt = step_towards(p.t, target, p.dt);
      allen_cahn_update(result.field, scratch, p, dt);
      std::swap(result.field, scratch);
      p.t = (dt == target - p.t) ? target : p.t + dt;
      ++result.steps;
    }
  };
  for (const auto& obs : observers) {
    if (obs.time < p.t || obs.time > t_end) continue;
    advance_to(obs.time);
    if (obs.callback) obs.callback(result.field, p.t);
  }
  advance_to(t_end);
  result.t = p.t;
  return result;
}

double energy(const ScalarField& u, double eps, const BistableNonlinearity& nl) {
  const auto& g = u.geometry();
  auto weight = [](int k, int n) { return (k == 0 || k == n - 1) ? 0.5 : 1.0; };
  const double cell = g.h * g.h;
  double bulk = 0.0;
  double grad = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double wy = weight(j, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      const double wx = weight(i, g.nx);
      bulk += wx * wy * nl.potential(u(i, j));
      if (i + 1 < g.nx) {
        const double d = u(i + 1, j) - u(i, j);
        grad += wy * d * d;
      }
      if (j + 1 < g.ny) {
        const double d = u(i, j + 1) - u(i, j);
        grad += wx * d * d;
      }
    }
  }
  // (d / h)^2 * h^2 = d^2 for the gradient part.
  return 0.5 * eps * grad + cell * bulk / eps;
}

RDState make_rd_state(ScalarField u0, ScalarField v0, SystemCoupling coupling, double L) {
  if (!(u0.geometry() == v0.geometry())) {
    throw std::invalid_argument("make_rd_state: u and v must share the grid");
  }
  double M = 0.0;
  for (double v : v0.values()) M = std::max(M, std::abs(v));
  const double M1 = coupling.invariant_bound(L, M);
  return RDState{std::move(u0), std::move(v0), std::move(coupling), 0.0, L, M1};
}

double rd_dt_bound(const GridGeometry& g, double eps, const BistableNonlinearity& nl,
                   const SystemCoupling& coupling) {
  const double diffusive = g.h * g.h / (2.0 * kDim * coupling.diffusion() * 1.01);
  return std::min(allen_cahn_dt_bound(g, eps, nl), diffusive);
}

namespace {

void rd_update(const RDState& s, RDState& out, const BistableNonlinearity& nl, double eps,
               double dt) {
  const auto& g = s.u.geometry();
  const double inv_eps2 = 1.0 / (eps * eps);
  const double D = s.coupling.diffusion();
  const double* v = s.v.data();
  const double* u = s.u.data();
  bool ok_u = true;
  bool ok_v = true;
  const auto& fhn = s.coupling.fhn();
  const double v_blowup = kBlowUpBound * std::max(1.0, s.v_bound);
  with_reaction(nl, [&](auto f) {
    if (fhn) {
      const std::vector<double>& p1 = fhn->f1_coefficients;
      const double alpha = fhn->alpha;
      const double beta = fhn->beta;
      ok_u = diffuse_react(g, u, out.u.data(), dt, kBlowUpBound, [&](int i, int j, double c) {
        const double vv = v[g.index(i, j)];
        return (f(c) + eps * (-evaluate_polynomial(p1, c) - vv)) * inv_eps2;
      });
      ok_v = diffuse_react(g, v, out.v.data(), dt, v_blowup, [&](int i, int j, double c) {
        const double uu = u[g.index(i, j)];
        return alpha * uu - beta * c;
      }, D);
    } else {
      const SystemCoupling& cp = s.coupling;
      ok_u = diffuse_react(g, u, out.u.data(), dt, kBlowUpBound, [&](int i, int j, double c) {
        const double vv = v[g.index(i, j)];
        return (f(c) + eps * cp.f1(c, vv) + eps * eps * cp.f2(c, vv)) * inv_eps2;
      });
      ok_v = diffuse_react(g, v, out.v.data(), dt, v_blowup, [&](int i, int j, double c) {
        return cp.h(u[g.index(i, j)], c);
      }, D);
    }
  });
  if (!ok_u || !ok_v) {
    std::ostringstream msg;
    msg << "step_rd: " << (ok_u ? "v" : "u") << " blew up at t = " << s.t + dt;
    throw BlowUpError(msg.str(), s.t + dt, ok_u ? out.v.max() : out.u.max());
  }
  const double tol_u = s.u_bound * (1.0 + 1e-12);
  const double tol_v = s.v_bound * (1.0 + 1e-12) + 1e-300;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(out.u.values()[k]) > tol_u || std::abs(out.v.values()[k]) > tol_v) {
      std::ostringstream msg;
      msg << "step_rd: (u, v) = (" << out.u.values()[k] << ", " << out.v.values()[k]
          << ") left the invariant rectangle [-" << s.u_bound << ", " << s.u_bound << "] x [-"
          << s.v_bound << ", " << s.v_bound << "] at t = " << s.t + dt;
      throw InvariantRectangleError(msg.str());
    }
  }
}

}  // namespace

RDState step_rd(const RDState& s, const BistableNonlinearity& nl, double eps, double dt) {
  check_dt(dt, rd_dt_bound(s.u.geometry(), eps, nl, s.coupling), "step_rd");
  RDState out = s;
  rd_update(s, out, nl, eps, dt);
  out.t = s.t + dt;
  return out;
}

RDState simulate_rd(RDState s, const BistableNonlinearity& nl, double eps, double dt,
                    double t_end, std::vector<RDObserver> observers) {
  if (t_end < s.t) throw std::invalid_argument("simulate_rd: t_end precedes the current time");
  check_dt(dt, rd_dt_bound(s.u.geometry(), eps, nl, s.coupling), "simulate_rd");
  std::stable_sort(observers.begin(), observers.end(),
                   [](const RDObserver& a, const RDObserver& b) { return a.time < b.time; });
  RDState scratch = s;
  auto advance_to = [&](double target) {
    while (s.t < target) {
      const double step = step_towards(s.t, target, dt);
      rd_update(s, scratch, nl, eps, step);
      scratch.t = (step == target - s.t) ? target : s.t + step;
      std::swap(s, scratch);
    }
  };
  for (const auto& obs : observers) {
    if (obs.time < s.t || obs.time > t_end) continue;
    advance_to(obs.time);
    if (obs.callback) obs.callback(s);
  }
  advance_to(t_end);
  return s;
}

ScalarField radial_initial_data(const GridGeometry& g, double R0, double steepness,
                                const BistableNonlinearity& nl, Point center) {
  if (!(R0 > 0.0) || !(steepness > 0.0)) {
    throw std::invalid_argument("radial_initial_data: R0 and steepness must be positive");
  }
  const Box box = g.box();
  const double clearance = std::min({center.x - R0 - box.xmin, box.xmax - center.x - R0,
                                     center.y - R0 - box.ymin, box.ymax - center.y - R0});
  if (clearance < 4.0 * g.h) {
    std::ostringstream msg;
    msg << "radial_initial_data: circle of radius " << R0 << " is within " << clearance
        << " of the boundary (need >= 4h = " << 4.0 * g.h << ")";
    throw std::invalid_argument(msg.str());
  }
  const auto& z = nl.zeros();
  return ScalarField::from_function(g, [&](Point p) {
    const double s = std::tanh(steepness * (distance(p, center) - R0));
    return s >= 0.0 ? z.mid + (z.plus - z.mid) * s : z.mid + (z.mid - z.minus) * s;
  });
}

}  // namespace layerlab

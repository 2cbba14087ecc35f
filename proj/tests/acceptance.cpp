// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "layerlab/harness.hpp"
#include "layerlab/interface.hpp"
#include "layerlab/pde.hpp"
#include "layerlab/profile.hpp"
#include "layerlab/sharp.hpp"

using namespace layerlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
  std::string out = "{";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + fmt(f, v[k]);
  return out + "}";
}

bool strictly_decreasing_in_eps(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

double max_over_min(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

template <class Get>
std::vector<double> column(const SweepReport& r, Get get) {
  std::vector<double> out;
  for (const auto& rec : r.records) out.push_back(get(rec));
  return out;
}

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %2d  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

ExperimentConfig radial_sweep() {
  ExperimentConfig c;
  c.eps_list = {0.08, 0.04, 0.02};
  c.domain = {-1.0, 1.0, -1.0, 1.0};
  c.R0 = 0.35;
  c.T = 0.04;
  c.mu = 2.0;
  c.cells_per_eps = 8.0;
  c.write_fields = false;
  return c;
}

bool all_ok(const SweepReport& r, std::string& why) {
  for (const auto& rec : r.records) {
    if (!rec.ok) {
      why = "eps " + fmt("%g", rec.eps) + " aborted: " + rec.diagnostic;
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const auto cubic = make_cubic();

  run(1, "c0 oracle", [&] {
    const double err = std::abs(mobility_constant(cubic) - 3.0 / (2.0 * std::sqrt(2.0)));
    return Outcome{err <= 1e-8, "|c0 - 3/(2 sqrt 2)| = " + fmt("%.2e", err) + " <= 1e-8"};
  });

  run(2, "profile oracle", [&] {
    const auto p = solve_profile(cubic, 10.0, 4000);
    double worst = 0.0;
    for (int k = -80000; k <= 80000; ++k) {
      const double z = k * 1e-4;
      worst = std::max(worst, std::abs(p.evaluate(z) - std::tanh(z / std::sqrt(2.0))));
    }
    return Outcome{worst <= 1e-6, "sup_|z|<=8 |U0 - tanh(z/sqrt 2)| = " + fmt("%.2e", worst) + " <= 1e-6"};
  });

  run(3, "radial limit oracle", [&] {
    const auto r = evolve_radial(0.5, 2, LimitForcing::zero(), 0.05, 1e-5);
    const double exact = std::sqrt(0.25 - 0.1);
    const double rel = std::abs(r.final().R - exact) / exact;
    return Outcome{rel <= 1e-8, "relative error at t = 0.05: " + fmt("%.2e", rel) + " <= 1e-8"};
  });

  run(4, "curve-flow oracle", [&] {
    CurveFlowOptions opt;
    for (int k = 1; k <= 10; ++k) opt.snapshot_times.push_back(0.005 * k);
    const auto traj = evolve_curve(make_circle({0, 0}, 0.5, 256), LimitForcing::zero(), 0.05, 1e-5, opt);
    const double exact = std::sqrt(0.25 - 0.1);
    double radius_err = 0.0;
    for (const auto& p : traj.curves.back().points) radius_err = std::max(radius_err, std::abs(norm(p) - exact));
    double rate_err = 0.0;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
      const double rate = (traj.curves[k].signed_area() - traj.curves[k - 1].signed_area()) /
                          (traj.times[k] - traj.times[k - 1]);
      rate_err = std::max(rate_err, std::abs(rate + 2 * M_PI) / (2 * M_PI));
    }
    return Outcome{radius_err <= 1e-3 && rate_err <= 0.01,
                   "max node radius error " + fmt("%.2e", radius_err) + " <= 1e-3, area rate error " +
                       fmt("%.2e", rate_err) + " <= 1%"};
  });

  const auto base = radial_sweep();
  SweepReport sweep;
  std::string sweep_error;
  try {
    sweep = run_validity_sweep(base);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }

  run(5, "thickness O(eps)", [&] {
    if (!sweep_error.empty()) return Outcome{false, sweep_error};
    std::string why;
    if (!all_ok(sweep, why)) return Outcome{false, why};
    const auto h = column(sweep, [](const SweepRecord& r) { return r.hausdorff_max; });
    const auto ratio = column(sweep, [](const SweepRecord& r) { return r.hausdorff_max / r.eps; });
    const bool dec = strictly_decreasing_in_eps(h);
    const double spread = max_over_min(ratio);
    return Outcome{dec && spread <= 3.0, "hausdorff_max " + join(h) + (dec ? " decreasing" : " NOT decreasing") +
                                             ", hausdorff/eps " + join(ratio) + " max/min " +
                                             fmt("%.3g", spread) + " <= 3"};
  });

  run(6, "profile validity", [&] {
    if (!sweep_error.empty()) return Outcome{false, sweep_error};
    std::string why;
    if (!all_ok(sweep, why)) return Outcome{false, why};
    const auto e = column(sweep, [](const SweepRecord& r) { return r.layer_error_max; });
    const bool dec = strictly_decreasing_in_eps(e);
    const double factor = e.front() / e.back();
    return Outcome{dec && factor >= 2.0, "layer_error_max " + join(e) + (dec ? " decreasing" : " NOT decreasing") +
                                             ", e(0.08)/e(0.02) = " + fmt("%.3g", factor) + " >= 2"};
  });

  run(7, "graph property and theta", [&] {
    if (!sweep_error.empty()) return Outcome{false, sweep_error};
    std::string why;
    if (!all_ok(sweep, why)) return Outcome{false, why};
    bool graph = true;
    double trans = std::numeric_limits<double>::infinity();
    for (const auto& r : sweep.records) {
      graph &= r.graph_ok;
      trans = std::min(trans, r.transversality_min);
    }
    const auto theta = column(sweep, [](const SweepRecord& r) { return r.theta_sup; });
    double growth = 0.0;
    for (std::size_t k = 1; k < theta.size(); ++k) growth = std::max(growth, theta[k] / theta[k - 1]);
    const bool pass = graph && trans > 0.0 && growth <= 1.5;
    return Outcome{pass, std::string("graph_over ") + (graph ? "succeeded" : "FAILED") +
                             " at every observer, min transversality " + fmt("%.3g", trans) +
                             " > 0, theta_sup " + join(theta) + " worst growth per halving " +
                             fmt("%.3g", growth) + " <= 1.5"};
  });

  run(8, "generation time", [&] {
    auto c = base;
    c.eta = 0.1;
    c.c_tube = 6.0;
    // Shallow eps-independent data: at the largest eps the tube edge still
    // sits far from the wells, so the generation phase is actually observed.
    c.steepness = 0.25;
    const auto r = run_generation_study(c);
    std::string why;
    if (!all_ok(r, why)) return Outcome{false, why};
    for (const auto& rec : r.records)
      if (rec.censored) return Outcome{false, "censored at eps " + fmt("%g", rec.eps)};
    const auto ratio = column(r, [](const SweepRecord& x) { return x.generation_ratio; });
    const auto tau = column(r, [](const SweepRecord& x) { return x.generation_time; });
    std::vector<std::pair<double, double>> pairs;
    for (const auto& rec : r.records) pairs.emplace_back(rec.eps, rec.generation_time);
    const auto fit = fit_order(pairs);
    const double spread = max_over_min(ratio);
    const bool pass = spread <= 1.5 && fit.order >= 1.7 && fit.order <= 2.3;
    return Outcome{pass, "steepness 0.25, tau " + join(tau) + ", tau/(eps^2|ln eps|) " + join(ratio) +
                             " max/min " + fmt("%.3g", spread) + " <= 1.5, fitted order " +
                             fmt("%.3f", fit.order) + " in [1.7, 2.3]"};
  });

  run(9, "forced motion sign", [&] {
    auto c = base;
    c.forcing = "constant";
    c.delta = 0.2;
    const auto r = run_validity_sweep(c);
    std::string why;
    if (!all_ok(r, why)) return Outcome{false, why};
    if (!sweep_error.empty()) return Outcome{false, sweep_error};
    const auto h = column(r, [](const SweepRecord& x) { return x.hausdorff_max; });
    const auto ratio = column(r, [](const SweepRecord& x) { return x.hausdorff_max / x.eps; });
    const bool dec = strictly_decreasing_in_eps(h);
    const double spread = max_over_min(ratio);
    bool sim_order = true;
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      sim_order &= r.records[k].radius_T > sweep.records[k].radius_T;
    }
    const bool limit_order = r.limit_radius_T > sweep.limit_radius_T;
    const bool pass = dec && spread <= 3.0 && sim_order && limit_order;
    return Outcome{pass, "hausdorff_max " + join(h) + (dec ? " decreasing" : " NOT decreasing") +
                             ", hausdorff/eps max/min " + fmt("%.3g", spread) + " <= 3, R_forced(T) > R_unforced(T): " +
                             (sim_order ? "yes" : "NO") + " in simulation, " + (limit_order ? "yes" : "NO") +
                             " in the limit (" + fmt("%.4f", r.limit_radius_T) + " vs " +
                             fmt("%.4f", sweep.limit_radius_T) + ")"};
  });

  run(10, "FHN reduction and validity", [&] {
    if (!sweep_error.empty()) return Outcome{false, sweep_error};
    auto dec = base;
    dec.alpha = 0.0;
    dec.beta = 0.0;
    dec.v0 = 0.0;
    const auto d = run_fhn_sweep(dec);
    std::string why;
    if (!all_ok(d, why)) return Outcome{false, why};
    double diff = 0.0;
    for (std::size_t k = 0; k < d.records.size(); ++k) {
      diff = std::max(diff, std::abs(d.records[k].layer_error_max - sweep.records[k].layer_error_max));
    }
    auto cpl = base;
    cpl.eps_list = {0.08, 0.04};
    cpl.alpha = 1.0;
    cpl.beta = 1.0;
    cpl.D = 1.0;
    cpl.v0 = 0.1;
    const auto r = run_fhn_sweep(cpl);
    if (!all_ok(r, why)) return Outcome{false, why};
    const auto le = column(r, [](const SweepRecord& x) { return x.layer_error_max; });
    const auto ve = column(r, [](const SweepRecord& x) { return x.v_error_max; });
    const bool pass = diff <= 1e-10 && strictly_decreasing_in_eps(le) && strictly_decreasing_in_eps(ve);
    return Outcome{pass, "decoupled layer_error_max deviation " + fmt("%.1e", diff) +
                             " <= 1e-10, coupled layer_error_max " + join(le) + ", sup|v - v~| " + join(ve) +
                             " both decreasing"};
  });

  run(11, "structural invariants", [&] {
    std::vector<std::string> broken;
    const auto g = GridGeometry::covering({-1, 1, -1, 1}, 1.0 / 40);
    const double eps = 0.1;
    {
      ACParams p;
      p.eps = eps;
      p.dt = 0.9 * allen_cahn_dt_bound(g, eps, cubic);
      ScalarField u = radial_initial_data(g, 0.5, 5.0, cubic);
      double e_prev = energy(u, eps, cubic);
      bool bounded = true, monotone = true;
      for (int k = 0; k < 300; ++k) {
        u = step_allen_cahn(u, p);
        bounded &= u.min() >= -1.0 && u.max() <= 1.0;
        const double e = energy(u, eps, cubic);
        monotone &= e - e_prev <= 1e-12 * std::abs(e_prev);
        e_prev = e;
      }
      if (!bounded) broken.push_back("maximum principle");
      if (!monotone) broken.push_back("energy monotonicity");
    }
    {
      const auto coupling = SystemCoupling::fitzhugh_nagumo(1.0, 1.0, 1.0);
      RDState s = make_rd_state(radial_initial_data(g, 0.5, 5.0, cubic), ScalarField(g, 0.1), coupling);
      const double dt = 0.9 * rd_dt_bound(g, eps, cubic, coupling);
      bool inside = true;
      for (int k = 0; k < 300; ++k) {
        s = step_rd(s, cubic, eps, dt);
        inside &= s.u.min() >= -2.0 && s.u.max() <= 2.0 && s.v.min() >= -s.v_bound && s.v.max() <= s.v_bound;
      }
      if (!inside) broken.push_back("invariant rectangle");
    }
    double residual = 0.0;
    {
      const auto f = ScalarField::from_function(
          g, [](Point p) { return std::sin(5 * p.x) * std::cos(4 * p.y) + 0.3 * p.x * p.y; });
      for (const auto& c : extract_level_set(f, 0.1))
        for (const auto& p : c.points) residual = std::max(residual, std::abs(f.sample(p) - 0.1));
      if (residual > 1e-10) broken.push_back("level-set residual");
    }
    {
      const auto a = make_ellipse({0.05, 0.0}, 0.45, 0.25, 300);
      const auto b = make_circle({-0.02, 0.03}, 0.33, 211);
      if (hausdorff(a, b) != hausdorff(b, a)) broken.push_back("hausdorff symmetry");
    }
    std::string detail = broken.empty() ? "maximum principle, energy monotonicity, invariant rectangle, "
                                          "level-set residual " + fmt("%.1e", residual) + ", hausdorff symmetry"
                                        : "broken:";
    for (const auto& b : broken) detail += " " + b;
    return Outcome{broken.empty(), detail};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

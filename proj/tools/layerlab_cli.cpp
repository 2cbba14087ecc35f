#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "layerlab/errors.hpp"
#include "layerlab/harness.hpp"
#include "layerlab/interface.hpp"
#include "layerlab/io.hpp"
#include "layerlab/pde.hpp"
#include "layerlab/profile.hpp"
#include "layerlab/sharp.hpp"

namespace fs = std::filesystem;
using namespace layerlab;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAborted = 2;

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string numbered(const char* stem, std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem, k, ext);
  return buf;
}

int cmd_profile(const ExperimentConfig& c, const fs::path& out) {
  const auto p = solve_profile(make_nonlinearity(c), c.z_max, c.profile_samples);
  auto f = open_file(out / "profile.csv");
  f << "z,U0\n";
  const auto z = p.z_samples();
  const auto u = p.u_samples();
  for (std::size_t k = 0; k < z.size(); ++k) f << format_double(z[k]) << ',' << format_double(u[k]) << '\n';
  std::cout << "c0 = " << format_double(mobility_constant(p.nonlinearity())) << '\n';
  return kOk;
}

double equivalent_radius(const std::vector<Curve>& curves) {
  double area = 0.0;
  for (const auto& c : curves)
    if (c.closed) area += c.signed_area();
  return std::sqrt(std::abs(area) / std::numbers::pi);
}

int cmd_simulate(const ExperimentConfig& c, const fs::path& out) {
  const auto nl = make_nonlinearity(c);
  const auto g = GridGeometry::refining(c.domain, c.eps / c.cells_per_eps);
  ACParams p;
  p.eps = c.eps;
  p.nl = nl;
  p.forcing = make_forcing(c);
  p.dt = c.dt_safety * allen_cahn_dt_bound(g, c.eps, nl);

  auto times = c.snapshot_times;
  if (times.empty()) times = observer_times(0.0, c.t_end, c.observers);

  auto scalars = open_file(out / "observers.csv");
  scalars << "t,min,max,energy,components,radius\n";
  std::size_t index = 0;
  auto record = [&](const ScalarField& u, double t) {
    const auto curves = extract_level_set(u, nl.zeros().mid);
    scalars << format_double(t) << ',' << format_double(u.min()) << ',' << format_double(u.max()) << ','
            << format_double(energy(u, c.eps, nl)) << ',' << curves.size() << ','
            << format_double(equivalent_radius(curves)) << '\n';
    if (c.write_fields) write_pgm((out / numbered("u", index, ".pgm")).string(), u, t);
    write_curves_csv((out / numbered("level", index, ".csv")).string(), curves);
    ++index;
  };

  std::vector<Observer> observers;
  const ScalarField u0 = initial_field(c, g, c.eps);
  std::size_t first = 0;
  if (!times.empty() && times.front() == 0.0) {
    record(u0, 0.0);
    first = 1;
  }
  for (std::size_t k = first; k < times.size(); ++k) observers.push_back({times[k], record});
  const auto r = simulate_ac(u0, p, c.t_end, observers);
  std::cout << "eps = " << c.eps << ", h = " << g.h << ", dt = " << p.dt << ", steps = " << r.steps
            << ", t = " << r.t << '\n';
  return kOk;
}

int cmd_limit(const ExperimentConfig& c, const fs::path& out) {
  const auto nl = make_nonlinearity(c);
  const auto g = make_forcing(c);
  const auto F = g ? LimitForcing::from_forcing(*g, nl) : LimitForcing::zero();
  auto times = c.snapshot_times;
  if (times.empty()) times = observer_times(0.0, c.t_end, c.observers);

  auto traj = open_file(out / "trajectory.csv");
  traj << "t,file\n";
  if (c.radial()) {
    const auto r = evolve_radial(c.R0, c.N, F, c.t_end, c.limit_dt);
    auto rad = open_file(out / "radius.csv");
    rad << "t,R\n";
    for (const auto& s : r.samples) rad << format_double(s.t) << ',' << format_double(s.R) << '\n';
    const Point center{0.5 * (c.domain.xmin + c.domain.xmax), 0.5 * (c.domain.ymin + c.domain.ymax)};
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double R = r.radius_at(times[k]);
      const auto nodes = std::max(16, static_cast<int>(std::ceil(2 * std::numbers::pi * R / 2e-3)));
      const std::vector<Curve> cs{make_circle(center, R, nodes)};
      const auto name = numbered("curve", k, ".csv");
      write_curves_csv((out / name).string(), cs);
      traj << format_double(times[k]) << ',' << name << '\n';
    }
    std::cout << "R(" << c.t_end << ") = " << format_double(r.final().R) << '\n';
    return kOk;
  }
  CurveFlowOptions opt;
  opt.remesh_interval = c.remesh_interval;
  opt.snapshot_times = times;
  std::vector<CurveTrajectory> parts;
  for (const auto& curve : read_curves_csv(c.curve_file))
    parts.push_back(evolve_curve(curve, F, c.t_end, c.limit_dt, opt));
  const auto& ts = parts.front().times;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<Curve> cs;
    for (const auto& p : parts) cs.push_back(p.curves[k]);
    const auto name = numbered("curve", k, ".csv");
    write_curves_csv((out / name).string(), cs);
    traj << format_double(ts[k]) << ',' << name << '\n';
  }
  return kOk;
}

int finish(const SweepReport& r, const fs::path& out) {
  write_report(r, out.string());
  std::cout << report_csv(r) << fit_text(r);
  return r.all_ok() ? kOk : kAborted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layerlab: Allen-Cahn layers and their sharp interface limits"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_dir, "output directory");
  const std::vector<std::string> names{"profile", "simulate", "limit", "sweep", "generation", "fhn"};
  const std::vector<std::string> help{
      "tabulate the layer profile as z,U0",
      "run one Allen-Cahn simulation at eps",
      "evolve the sharp interface limit",
      "validity sweep over eps_list",
      "generation time study over eps_list",
      "FitzHugh-Nagumo validity sweep over eps_list"};
  for (std::size_t k = 0; k < names.size(); ++k) {
    auto* sub = app.add_subcommand(names[k], help[k]);
    sub->add_option("--config", config_path, "flat key = value configuration file");
    sub->add_option("--out", out_dir, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  ExperimentConfig c;
  try {
    if (!config_path.empty()) c = load_config(config_path);
    validate(c);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const fs::path out(out_dir);
    fs::create_directories(out);
    if (cmd == "profile") return cmd_profile(c, out);
    if (cmd == "simulate") return cmd_simulate(c, out);
    if (cmd == "limit") return cmd_limit(c, out);
    if (cmd == "sweep") return finish(run_validity_sweep(c, out.string()), out);
    if (cmd == "generation") return finish(run_generation_study(c, out.string()), out);
    return finish(run_fhn_sweep(c, out.string()), out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << cmd << " aborted: " << e.what() << '\n';
    return kAborted;
  }
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "layerlab/errors.hpp"
#include "layerlab/harness.hpp"
#include "layerlab/interface.hpp"
#include "layerlab/pde.hpp"
#include "layerlab/profile.hpp"
#include "layerlab/sharp.hpp"

namespace py = pybind11;
using namespace layerlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Curve to_curve(const Array& a, bool closed) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw std::invalid_argument("curve must have shape (n, 2)");
  Curve c;
  c.closed = closed;
  const auto r = a.unchecked<2>();
  for (py::ssize_t k = 0; k < r.shape(0); ++k) c.points.push_back({r(k, 0), r(k, 1)});
  return c;
}

Array to_array(const Curve& c) {
  Array out({static_cast<py::ssize_t>(c.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < c.size(); ++k) {
    w(k, 0) = c.points[k].x;
    w(k, 1) = c.points[k].y;
  }
  return out;
}

// Rows are y, columns are x.
Array to_array(const ScalarField& f) {
  const auto& g = f.geometry();
  Array out({static_cast<py::ssize_t>(g.ny), static_cast<py::ssize_t>(g.nx)});
  const auto v = f.values();
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ScalarField to_field(const Array& a, double h, std::pair<double, double> origin) {
  if (a.ndim() != 2) throw std::invalid_argument("field must be two-dimensional (ny, nx)");
  GridGeometry g;
  g.ny = static_cast<int>(a.shape(0));
  g.nx = static_cast<int>(a.shape(1));
  g.h = h;
  g.origin = {origin.first, origin.second};
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["eps"] = r.eps;
  d["t_eps"] = r.t_eps;
  d["hausdorff_max"] = r.hausdorff_max;
  d["layer_error_max"] = r.layer_error_max;
  d["theta_sup"] = r.theta_sup;
  d["graph_ok"] = r.graph_ok;
  d["transversality_min"] = r.transversality_min;
  d["generation_time"] = r.generation_time;
  d["generation_ratio"] = r.generation_ratio;
  d["censored"] = r.censored;
  d["v_error_max"] = r.v_error_max;
  d["radius_T"] = r.radius_T;
  d["steps"] = r.steps;
  d["ok"] = r.ok;
  d["diagnostic"] = r.diagnostic;
  d["config_hash"] = r.config_hash;
  return d;
}

py::dict report_dict(const SweepReport& r) {
  py::dict d;
  d["kind"] = r.kind;
  py::list records;
  for (const auto& rec : r.records) records.append(record_dict(rec));
  d["records"] = records;
  py::dict fits;
  for (const auto& f : r.fits) fits[py::str(f.quantity)] = py::make_tuple(f.fit.order, f.fit.constant, f.fit.residual);
  d["fits"] = fits;
  d["limit_radius_T"] = r.limit_radius_T;
  d["csv"] = report_csv(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Allen-Cahn layers, their profile and sharp interface limits.";

  // Later registrations are tried first.
  py::register_exception<Error>(m, "LayerlabError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("mobility_constant", [] { return mobility_constant(make_cubic()); },
        "c0 for the cubic u - u^3");
  m.def("t_eps", [](double eps) { return t_eps(eps, make_cubic()); }, py::arg("eps"));

  m.def(
      "profile",
      [](double z_max, int n) {
        const auto p = solve_profile(make_cubic(), z_max, n);
        const auto z = p.z_samples();
        const auto u = p.u_samples();
        return py::make_tuple(Array(z.size(), z.data()), Array(u.size(), u.data()));
      },
      py::arg("z_max") = 10.0, py::arg("n") = 4000, "(z, U0) samples of the cubic layer profile");

  m.def(
      "evolve_radial",
      [](double R0, int N, double forcing, double t_end, double dt) {
        const auto F = forcing == 0.0 ? LimitForcing::zero() : LimitForcing::constant(forcing);
        const auto r = evolve_radial(R0, N, F, t_end, dt);
        Array out({static_cast<py::ssize_t>(r.samples.size()), py::ssize_t{2}});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t k = 0; k < r.samples.size(); ++k) {
          w(k, 0) = r.samples[k].t;
          w(k, 1) = r.samples[k].R;
        }
        return out;
      },
      py::arg("R0"), py::arg("N") = 2, py::arg("forcing") = 0.0, py::arg("t_end"), py::arg("dt") = 1e-5,
      "rows (t, R) of dR/dt = -(N-1)/R + forcing");

  m.def(
      "evolve_curve",
      [](const Array& curve, double t_end, double dt, double forcing) {
        const auto F = forcing == 0.0 ? LimitForcing::zero() : LimitForcing::constant(forcing);
        return to_array(evolve_curve(to_curve(curve, true), F, t_end, dt).curves.back());
      },
      py::arg("curve"), py::arg("t_end"), py::arg("dt"), py::arg("forcing") = 0.0);

  m.def("circle", [](double cx, double cy, double r, std::size_t n) { return to_array(make_circle({cx, cy}, r, n)); },
        py::arg("cx"), py::arg("cy"), py::arg("r"), py::arg("n"));

  m.def(
      "hausdorff",
      [](const Array& a, const Array& b) { return hausdorff(to_curve(a, true), to_curve(b, true)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "extract_level_set",
      [](const Array& field, double h, std::pair<double, double> origin, double level) {
        py::list out;
        for (const auto& c : extract_level_set(to_field(field, h, origin), level))
          out.append(py::make_tuple(to_array(c), c.closed));
        return out;
      },
      py::arg("field"), py::arg("h"), py::arg("origin"), py::arg("level") = 0.0,
      "list of (points, closed)");

  m.def(
      "simulate",
      [](const std::string& config_text) {
        const auto c = parse_config(config_text);
        validate(c);
        const auto g = GridGeometry::refining(c.domain, c.eps / c.cells_per_eps);
        ACParams p;
        p.eps = c.eps;
        p.nl = make_nonlinearity(c);
        p.forcing = make_forcing(c);
        p.dt = c.dt_safety * allen_cahn_dt_bound(g, c.eps, p.nl);
        const auto r = simulate_ac(initial_field(c, g, c.eps), p, c.t_end);
        py::dict d;
        d["u"] = to_array(r.field);
        d["h"] = g.h;
        d["origin"] = py::make_tuple(g.origin.x, g.origin.y);
        d["t"] = r.t;
        d["steps"] = r.steps;
        return d;
      },
      py::arg("config_text"), "one Allen-Cahn run; returns u at t_end on an (ny, nx) grid");

  m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); });
  m.def("serialize_config", [](const std::string& text) { return serialize(parse_config(text)); });

  m.def(
      "run",
      [](const std::string& kind, const std::string& config_text, const std::string& out_dir) {
        const auto c = parse_config(config_text);
        SweepReport r;
        {
          py::gil_scoped_release release;
          if (kind == "sweep") r = run_validity_sweep(c, out_dir);
          else if (kind == "generation") r = run_generation_study(c, out_dir);
          else if (kind == "fhn") r = run_fhn_sweep(c, out_dir);
          else throw ConfigError("unknown run kind '" + kind + "'");
          if (!out_dir.empty()) write_report(r, out_dir);
        }
        return report_dict(r);
      },
      py::arg("kind"), py::arg("config_text"), py::arg("out_dir") = "",
      "kind is sweep, generation or fhn");
}

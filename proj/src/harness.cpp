#include "layerlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "layerlab/errors.hpp"
#include "layerlab/interface.hpp"
#include "layerlab/io.hpp"
#include "layerlab/pde.hpp"
#include "layerlab/profile.hpp"
#include "layerlab/sharp.hpp"

namespace layerlab {

double t_eps(double eps, const BistableNonlinearity& nl) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("t_eps: need 0 < eps < 1");
  const double rate = nl.derivative(nl.zeros().mid);
  if (!(rate > 0.0)) throw std::invalid_argument("t_eps: f'(a) must be positive");
  return eps * eps * std::abs(std::log(eps)) / rate;
}

OrderFit fit_order(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("fit_order: need at least two pairs");
  double sx = 0, sy = 0;
  for (const auto& [e, err] : pairs) {
    if (!(e > 0.0) || !(err > 0.0)) throw std::invalid_argument("fit_order: values must be positive");
    sx += std::log(e);
    sy += std::log(err);
  }
  const double n = static_cast<double>(pairs.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [e, err] : pairs) {
    sxx += (std::log(e) - mx) * (std::log(e) - mx);
    sxy += (std::log(e) - mx) * (std::log(err) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_order: eps values must differ");
  OrderFit fit;
  fit.order = sxy / sxx;
  const double intercept = my - fit.order * mx;
  fit.constant = std::exp(intercept);
  double ss = 0;
  for (const auto& [e, err] : pairs) {
    const double r = std::log(err) - (intercept + fit.order * std::log(e));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto s = trim(v);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto s = trim(v);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
  }
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::string list_string(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += format_double(v[k]);
  }
  return out;
}

struct Key {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define LL_REAL(field)                                                                       \
  Key {                                                                                      \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(#field, v); }, \
        [](const ExperimentConfig& c) { return format_double(c.field); }                     \
  }
#define LL_INT(field)                                                                     \
  Key {                                                                                   \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = to_int(#field, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                 \
  }
#define LL_LIST(field)                                                                     \
  Key {                                                                                    \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = to_list(#field, v); }, \
        [](const ExperimentConfig& c) { return list_string(c.field); }                     \
  }
#define LL_TEXT(field)                                                                \
  Key {                                                                               \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = trim(v); },       \
        [](const ExperimentConfig& c) { return c.field; }                             \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      LL_LIST(eps_list),
      LL_REAL(mu),
      LL_REAL(T),
      Key{"domain",
          [](ExperimentConfig& c, const std::string& v) {
            const auto d = to_list("domain", v);
            if (d.size() != 4) throw ConfigError("key 'domain': expected xmin, xmax, ymin, ymax");
            c.domain = {d[0], d[1], d[2], d[3]};
          },
          [](const ExperimentConfig& c) {
            return list_string({c.domain.xmin, c.domain.xmax, c.domain.ymin, c.domain.ymax});
          }},
      LL_REAL(R0),
      LL_TEXT(curve_file),
      LL_REAL(steepness),
      LL_TEXT(initial),
      LL_TEXT(nonlinearity),
      LL_TEXT(forcing),
      LL_REAL(delta),
      LL_REAL(cells_per_eps),
      LL_REAL(dt_safety),
      LL_INT(observers),
      LL_REAL(graph_tube),
      LL_REAL(eta),
      LL_REAL(c_tube),
      LL_INT(generation_samples),
      LL_REAL(generation_tol),
      LL_REAL(alpha),
      LL_REAL(beta),
      LL_REAL(D),
      LL_LIST(f1),
      LL_REAL(v0),
      LL_INT(remesh_interval),
      LL_REAL(limit_dt),
      LL_INT(N),
      LL_REAL(eps),
      LL_REAL(t_end),
      LL_LIST(snapshot_times),
      LL_REAL(z_max),
      LL_INT(profile_samples),
      Key{"write_fields",
          [](ExperimentConfig& c, const std::string& v) { c.write_fields = to_bool("write_fields", v); },
          [](const ExperimentConfig& c) { return std::string(c.write_fields ? "true" : "false"); }},
  };
  return table;
}

#undef LL_REAL
#undef LL_INT
#undef LL_LIST
#undef LL_TEXT

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key& k) { return key == k.name; });
    if (it == table.end()) {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    it->set(c, value);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(c) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

BistableNonlinearity make_nonlinearity(const ExperimentConfig& c) {
  if (c.nonlinearity == "cubic") return make_cubic();
  throw ConfigError("unknown nonlinearity '" + c.nonlinearity + "' (supported: cubic)");
}

std::optional<Forcing> make_forcing(const ExperimentConfig& c) {
  if (c.forcing == "none") return std::nullopt;
  if (c.forcing == "constant") return Forcing::constant(c.delta);
  if (c.forcing == "linear_x") return Forcing::linear_x(c.delta);
  throw ConfigError("unknown forcing '" + c.forcing + "' (supported: none, constant, linear_x)");
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(!c.eps_list.empty(), "eps_list must not be empty");
  for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
    require(c.eps_list[k] > 0.0 && c.eps_list[k] < 1.0, "eps_list entries must lie in (0, 1)");
    if (k > 0) require(c.eps_list[k] < c.eps_list[k - 1], "eps_list must be strictly decreasing");
  }
  require(c.mu > 1.0, "mu must exceed 1");
  require(c.T > 0.0, "T must be positive");
  require(c.domain.xmax > c.domain.xmin && c.domain.ymax > c.domain.ymin, "domain is empty");
  require(c.R0 > 0.0, "R0 must be positive");
  require(c.steepness > 0.0, "steepness must be positive");
  require(c.initial == "tanh" || c.initial == "layer", "initial must be tanh or layer");
  const auto nl = make_nonlinearity(c);
  make_forcing(c);
  require(c.cells_per_eps >= 1.0, "cells_per_eps must be at least 1");
  require(c.dt_safety > 0.0 && c.dt_safety <= 1.0, "dt_safety must lie in (0, 1]");
  require(c.observers >= 1, "observers must be positive");
  require(c.graph_tube > 0.0, "graph_tube must be positive");
  const auto& z = nl.zeros();
  require(c.eta > 0.0 && c.eta < std::min(z.mid - z.minus, z.plus - z.mid),
          "eta must lie in (0, min(a - a-, a+ - a))");
  require(c.c_tube > 0.0, "c_tube must be positive");
  require(c.generation_samples >= 1, "generation_samples must be positive");
  require(c.generation_tol > 0.0, "generation_tol must be positive");
  require(c.D >= 0.0, "D must be nonnegative");
  require(c.remesh_interval >= 1, "remesh_interval must be positive");
  require(c.limit_dt > 0.0, "limit_dt must be positive");
  require(c.N >= 2, "N must be at least 2");
  require(c.eps > 0.0 && c.eps < 1.0, "eps must lie in (0, 1)");
  require(c.t_end >= 0.0, "t_end must be nonnegative");
  require(c.z_max >= 5.0, "z_max must be at least 5");
  require(c.profile_samples >= 100, "profile_samples must be at least 100");
}

std::vector<double> observer_times(double lo, double hi, int count) {
  if (count == 1) return {hi};
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = lo + (hi - lo) * k / (count - 1);
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------
// Geometry of the limit interface

namespace {

Point domain_center(const ExperimentConfig& c) { return c.domain.center(); }

std::vector<Curve> load_interface(const ExperimentConfig& c) {
  auto curves = read_curves_csv(c.curve_file);
  if (curves.empty()) throw ConfigError("curve file " + c.curve_file + " holds no curve");
  for (auto& cv : curves) {
    cv.closed = true;
    if (cv.signed_area() < 0.0) std::reverse(cv.points.begin(), cv.points.end());
    validate_curve(cv);
  }
  return curves;
}

// Distance to a union of closed curves, negative inside any of them.
double signed_distance_union(Point q, const std::vector<Curve>& curves) {
  double d = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (const auto& cv : curves) {
    d = std::min(d, closest_point(cv, q).distance);
    if (locate(cv, q) == Side::inside) inside = true;
  }
  return inside ? -d : d;
}

Curve circle_with_spacing(Point center, double R, double spacing) {
  const auto n = std::max<std::size_t>(
      64, static_cast<std::size_t>(std::ceil(2.0 * M_PI * R / spacing)));
  return make_circle(center, R, n);
}

double max_curvature(const Curve& c) {
  const std::size_t n = c.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = c.points[k] - c.points[(k + n - 1) % n];
    const Point b = c.points[(k + 1) % n] - c.points[k];
    const Point d = c.points[(k + 1) % n] - c.points[(k + n - 1) % n];
    worst = std::max(worst, std::abs(2.0 * cross(a, b) / (norm(a) * norm(b) * norm(d))));
  }
  return worst;
}

// The limit interface as a function of time.
class LimitInterface {
 public:
  LimitInterface(const ExperimentConfig& c, const BistableNonlinearity& nl,
                 const std::optional<Forcing>& g, double h)
      : config_(c), center_(domain_center(c)), spacing_(h / 4.0) {
    forcing_ = g ? LimitForcing::from_forcing(*g, nl) : LimitForcing::zero();
    if (c.radial()) {
      try {
        radial_ = evolve_radial(c.R0, 2, forcing_, c.T, c.limit_dt);
      } catch (const ExtinctionError& e) {
        throw ConfigError(std::string("T is beyond the extinction time of the limit flow: ") +
                          e.what());
      }
    } else {
      initial_ = load_interface(c);
    }
  }

  bool radial() const { return config_.radial(); }
  double radius(double t) const { return radial_.radius_at(t); }

  // Polylines of the interface at each requested time.
  std::vector<std::vector<Curve>> curves_at(const std::vector<double>& times) const {
    std::vector<std::vector<Curve>> out(times.size());
    if (radial()) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        out[k] = {circle_with_spacing(center_, radius(times[k]), spacing_)};
      }
      return out;
    }
    CurveFlowOptions opt;
    opt.remesh_interval = config_.remesh_interval;
    opt.target_spacing = 2.0 * spacing_;
    opt.snapshot_times = times;
    for (const auto& c0 : initial_) {
      const auto traj = evolve_curve(c0, forcing_, times.empty() ? 0.0 : times.back(),
                                     config_.limit_dt, opt);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const auto it = std::find(traj.times.begin(), traj.times.end(), times[k]);
        out[k].push_back(it == traj.times.end() ? traj.curves.front()
                                                : traj.curves[it - traj.times.begin()]);
      }
    }
    return out;
  }

  // Signed distance at every node of g at time t.
  std::vector<double> signed_distance_field(const GridGeometry& g, double t) const {
    std::vector<double> d(g.size());
    if (radial()) {
      const double R = radius(t);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) d[g.index(i, j)] = distance(g.node(i, j), center_) - R;
      return d;
    }
    const auto curves = curves_at({t}).front();
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        d[g.index(i, j)] = signed_distance_union(g.node(i, j), curves);
    return d;
  }

 private:
  const ExperimentConfig& config_;
  Point center_;
  double spacing_;
  LimitForcing forcing_;
  RadialTrajectory radial_;
  std::vector<Curve> initial_;
};

struct ObserverStats {
  double time = 0.0;
  double hausdorff = 0.0;
  double layer_error = 0.0;
  double theta_sup = 0.0;
  double transversality = 0.0;
  bool graph_ok = true;
  std::string graph_diagnostic;
  std::vector<Curve> level;
  std::vector<GraphSample> graph;
};

Point centroid_of(const Curve& c) { return c.centroid(); }

ObserverStats measure(const ScalarField& u, double t, const std::vector<Curve>& reference,
                      const LayerProfile& profile, double eps, double graph_tube) {
  ObserverStats s;
  s.time = t;
  const double a = profile.anchor();
  s.level = extract_level_set(u, a);
  if (s.level.empty()) {
    throw EmptyLevelSetError("level set {u = a} is empty at t = " + format_double(t));
  }
  for (const auto& c : s.level) {
    if (!c.closed) throw ContourError("level set reaches the boundary at t = " + format_double(t));
  }
  if (s.level.size() != reference.size()) {
    std::ostringstream msg;
    msg << "component count mismatch at t = " << t << ": " << s.level.size() << " level-set vs "
        << reference.size() << " limit components";
    throw GeometryError(msg.str());
  }
  // Nearest-centroid pairing.
  std::vector<bool> used(s.level.size(), false);
  std::vector<std::size_t> match(reference.size());
  for (std::size_t r = 0; r < reference.size(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.level.size(); ++k) {
      if (used[k]) continue;
      const double d = distance(centroid_of(reference[r]), centroid_of(s.level[k]));
      if (d < best) {
        best = d;
        match[r] = k;
      }
    }
    used[match[r]] = true;
  }
  s.layer_error = layer_error(u, profile, eps);
  s.transversality = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reference.size(); ++r) {
    const Curve& ref = reference[r];
    const Curve& lev = s.level[match[r]];
    s.hausdorff = std::max(s.hausdorff, hausdorff(ref, lev));
    try {
      auto samples = graph_over(ref, lev, graph_tube * eps);
      for (const auto& g : samples) s.theta_sup = std::max(s.theta_sup, std::abs(g.offset) / eps);
      if (r == 0) s.graph = std::move(samples);
    } catch (const GraphPropertyError& e) {
      s.graph_ok = false;
      s.graph_diagnostic = e.what();
    }
    // The tube is kept inside the region where the nearest-point projection
    // onto the reference is single valued.
    const double tube = std::min(graph_tube * eps, 0.5 / max_curvature(ref));
    s.transversality = std::min(s.transversality, transversality(u, ref, tube));
  }
  return s;
}

struct Aggregate {
  double hausdorff = 0.0;
  double layer_error = 0.0;
  double theta_sup = 0.0;
  double transversality = std::numeric_limits<double>::infinity();
  bool graph_ok = true;
  std::string graph_diagnostic;

  void add(const ObserverStats& s) {
    hausdorff = std::max(hausdorff, s.hausdorff);
    layer_error = std::max(layer_error, s.layer_error);
    theta_sup = std::max(theta_sup, s.theta_sup);
    transversality = std::min(transversality, s.transversality);
    if (!s.graph_ok && graph_ok) {
      graph_ok = false;
      graph_diagnostic = s.graph_diagnostic;
    }
  }
};

std::string eps_dir(const std::string& out_dir, double eps) {
  if (out_dir.empty()) return {};
  const auto dir = std::filesystem::path(out_dir) / ("eps_" + format_double(eps));
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}

void write_observer_row(std::ofstream& out, const ObserverStats& s, double v_error) {
  out << format_double(s.time) << ',' << format_double(s.hausdorff) << ','
      << format_double(s.layer_error) << ',' << format_double(s.theta_sup) << ','
      << (s.graph_ok ? 1 : 0) << ',' << format_double(s.transversality) << ','
      << format_double(v_error) << '\n';
}

double equivalent_radius(const std::vector<Curve>& curves) {
  double area = 0.0;
  for (const auto& c : curves) area += c.signed_area();
  return std::sqrt(std::abs(area) / M_PI);
}

void finish_record(SweepRecord& rec, const Aggregate& agg) {
  rec.hausdorff_max = agg.hausdorff;
  rec.layer_error_max = agg.layer_error;
  rec.theta_sup = agg.theta_sup;
  rec.transversality_min = agg.transversality;
  rec.graph_ok = agg.graph_ok;
  if (!agg.graph_ok) rec.diagnostic = agg.graph_diagnostic;
  rec.ok = true;
}

template <class Fn>
void guarded(SweepRecord& rec, Fn&& body) {
  try {
    body();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.diagnostic = e.what();
  }
}

void add_fit(SweepReport& r, const std::string& name, double SweepRecord::*field) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& rec : r.records) {
    if (!rec.ok || rec.censored) continue;
    const double v = rec.*field;
    if (std::isfinite(v) && v > 0.0) pairs.emplace_back(rec.eps, v);
  }
  if (pairs.size() < 2) return;
  r.fits.push_back({name, fit_order(pairs), pairs.size()});
}

}  // namespace

bool SweepReport::all_ok() const {
  return std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.ok; });
}

ScalarField initial_field(const ExperimentConfig& c, const GridGeometry& g, double eps) {
  const auto nl = make_nonlinearity(c);
  const auto& z = nl.zeros();
  const Point center = domain_center(c);
  if (c.initial == "layer") {
    const LayerProfile p = solve_profile(nl, c.z_max, c.profile_samples);
    if (c.radial()) {
      return ScalarField::from_function(
          g, [&](Point x) { return p.evaluate((distance(x, center) - c.R0) / eps); });
    }
    const auto curves = load_interface(c);
    return ScalarField::from_function(
        g, [&](Point x) { return p.evaluate(signed_distance_union(x, curves) / eps); });
  }
  if (c.radial()) return radial_initial_data(g, c.R0, c.steepness, nl, center);
  const auto curves = load_interface(c);
  return ScalarField::from_function(g, [&](Point x) {
    const double s = std::tanh(c.steepness * signed_distance_union(x, curves));
    return s >= 0.0 ? z.mid + (z.plus - z.mid) * s : z.mid + (z.mid - z.minus) * s;
  });
}

SweepReport run_validity_sweep(const ExperimentConfig& c, const std::string& out_dir) {
  validate(c);
  SweepReport report;
  report.kind = "validity";
  report.config = c;
  const auto nl = make_nonlinearity(c);
  const auto forcing = make_forcing(c);
  const LayerProfile profile = solve_profile(nl, c.z_max, c.profile_samples);
  const std::string hash = config_hash(c);

  for (double eps : c.eps_list) {
    SweepRecord rec;
    rec.eps = eps;
    rec.t_eps = t_eps(eps, nl);
    rec.config_hash = hash;
    const double start = c.mu * rec.t_eps;
    if (start >= c.T) throw ConfigError("mu * t_eps exceeds T for eps = " + format_double(eps));
    const GridGeometry g = GridGeometry::refining(c.domain, eps / c.cells_per_eps);
    const LimitInterface limit(c, nl, forcing, g.h);
    if (limit.radial()) report.limit_radius_T = limit.radius(c.T);
    const auto times = observer_times(start, c.T, c.observers);
    const auto reference = limit.curves_at(times);
    const std::string dir = eps_dir(out_dir, eps);

    guarded(rec, [&] {
      ScalarField u0 = initial_field(c, g, eps);
      ACParams p;
      p.eps = eps;
      p.nl = nl;
      p.forcing = forcing;
      p.dt = c.dt_safety * allen_cahn_dt_bound(g, eps, nl);
      Aggregate agg;
      std::ofstream obs;
      if (!dir.empty()) {
        obs = open_text(dir + "/observers.csv");
        obs << "t,hausdorff,layer_error,theta_sup,graph_ok,transversality,v_error\n";
        if (c.write_fields) write_pgm(dir + "/u_0.pgm", u0, 0.0);
      }
      std::vector<Observer> observers;
      for (std::size_t k = 0; k < times.size(); ++k) {
        observers.push_back({times[k], [&, k](const ScalarField& u, double t) {
                               const auto s = measure(u, t, reference[k], profile, eps,
                                                      c.graph_tube);
                               agg.add(s);
                               if (obs.is_open()) write_observer_row(obs, s, kNaN);
                               if (k + 1 == times.size()) {
                                 rec.radius_T = equivalent_radius(s.level);
                                 if (!dir.empty()) {
                                   write_curves_csv(dir + "/level_T.csv", s.level);
                                   write_curves_csv(dir + "/limit_T.csv", reference[k]);
                                   write_theta_csv(dir + "/theta_T.csv", s.graph, eps);
                                   if (c.write_fields) write_pgm(dir + "/u_T.pgm", u, t);
                                 }
                               }
                             }});
      }
      const auto result = simulate_ac(std::move(u0), p, c.T, std::move(observers));
      rec.steps = result.steps;
      finish_record(rec, agg);
    });
    report.records.push_back(rec);
  }
  add_fit(report, "hausdorff_max", &SweepRecord::hausdorff_max);
  add_fit(report, "layer_error_max", &SweepRecord::layer_error_max);
  add_fit(report, "theta_sup", &SweepRecord::theta_sup);
  return report;
}

SweepReport run_generation_study(const ExperimentConfig& c, const std::string& out_dir) {
  validate(c);
  SweepReport report;
  report.kind = "generation";
  report.config = c;
  const auto nl = make_nonlinearity(c);
  const auto forcing = make_forcing(c);
  const auto& z = nl.zeros();
  const std::string hash = config_hash(c);

  for (double eps : c.eps_list) {
    SweepRecord rec;
    rec.eps = eps;
    rec.t_eps = t_eps(eps, nl);
    rec.config_hash = hash;
    const GridGeometry g = GridGeometry::refining(c.domain, eps / c.cells_per_eps);
    const LimitInterface limit(c, nl, forcing, g.h);
    if (limit.radial()) report.limit_radius_T = limit.radius(c.T);
    const std::string dir = eps_dir(out_dir, eps);

    guarded(rec, [&] {
      const double tube = c.c_tube * eps;
      auto developed = [&](const ScalarField& u, double t) {
        const auto d = limit.signed_distance_field(g, t);
        const auto values = u.values();
        for (std::size_t k = 0; k < values.size(); ++k) {
          if (std::abs(d[k]) <= tube) continue;
          const double target = d[k] < 0.0 ? z.minus : z.plus;
          if (std::abs(values[k] - target) > c.eta) return false;
        }
        return true;
      };
      ACParams p;
      p.eps = eps;
      p.nl = nl;
      p.forcing = forcing;
      p.dt = c.dt_safety * allen_cahn_dt_bound(g, eps, nl);

      std::ofstream trace;
      if (!dir.empty()) {
        trace = open_text(dir + "/generation.csv");
        trace << "t,developed\n";
      }
      auto check = [&](const ScalarField& u, double t) {
        const bool ok = developed(u, t);
        if (trace.is_open()) trace << format_double(t) << ',' << (ok ? 1 : 0) << '\n';
        return ok;
      };

      ScalarField u = initial_field(c, g, eps);
      const double spacing = rec.t_eps / c.generation_samples;
      long steps = 0;
      double lo = 0.0;
      double hi = kNaN;
      if (check(u, 0.0)) {
        hi = 0.0;
      } else {
        for (long k = 1;; ++k) {
          const double t = std::min(c.T, spacing * static_cast<double>(k));
          ACParams q = p;
          q.t = lo;
          auto res = simulate_ac(u, q, t);
          steps += res.steps;
          if (check(res.field, t)) {
            hi = t;
            break;
          }
          u = std::move(res.field);
          lo = t;
          if (t >= c.T) break;
        }
        if (!std::isnan(hi)) {
          // u holds the field at lo, where the layer was not yet developed.
          while (hi - lo > c.generation_tol * rec.t_eps) {
            const double mid = 0.5 * (lo + hi);
            ACParams q = p;
            q.t = lo;
            auto res = simulate_ac(u, q, mid);
            steps += res.steps;
            if (check(res.field, mid)) {
              hi = mid;
            } else {
              u = std::move(res.field);
              lo = mid;
            }
          }
        }
      }
      rec.steps = steps;
      rec.ok = true;
      if (std::isnan(hi)) {
        rec.censored = true;
        rec.diagnostic = "thickness condition not met before T";
      } else {
        rec.generation_time = hi;
        rec.generation_ratio = hi / (eps * eps * std::abs(std::log(eps)));
      }
    });
    report.records.push_back(rec);
  }
  add_fit(report, "generation_time", &SweepRecord::generation_time);
  return report;
}

SweepReport run_fhn_sweep(const ExperimentConfig& c, const std::string& out_dir) {
  validate(c);
  if (!c.radial()) throw ConfigError("the fhn sweep needs a radial initial interface");
  SweepReport report;
  report.kind = "fhn";
  report.config = c;
  const auto nl = make_nonlinearity(c);
  const LayerProfile profile = solve_profile(nl, c.z_max, c.profile_samples);
  const double c0 = mobility_constant(nl);
  const auto coupling = SystemCoupling::fitzhugh_nagumo(c.alpha, c.beta, c.D, c.f1);
  const std::string hash = config_hash(c);
  const Point center = domain_center(c);

  for (double eps : c.eps_list) {
    SweepRecord rec;
    rec.eps = eps;
    rec.t_eps = t_eps(eps, nl);
    rec.config_hash = hash;
    const double start = c.mu * rec.t_eps;
    if (start >= c.T) throw ConfigError("mu * t_eps exceeds T for eps = " + format_double(eps));
    const GridGeometry g = GridGeometry::refining(c.domain, eps / c.cells_per_eps);
    const auto times = observer_times(start, c.T, c.observers);
    const std::string dir = eps_dir(out_dir, eps);

    guarded(rec, [&] {
      const ScalarField v0(g, c.v0);
      // Limit system on the same grid, curve nodes spaced like the grid.
      CurveFlowOptions opt;
      opt.remesh_interval = c.remesh_interval;
      opt.snapshot_times = times;
      double limit_dt = c.limit_dt;
      if (c.D > 0.0) limit_dt = std::min(limit_dt, 0.9 * g.h * g.h / (4.0 * c.D * 1.01));
      const auto limit = evolve_rd_limit(circle_with_spacing(center, c.R0, g.h), v0, coupling,
                                         nl, c0, c.T, limit_dt, opt);
      auto limit_index = [&](double t) {
        const auto it = std::find(limit.times.begin(), limit.times.end(), t);
        if (it == limit.times.end()) throw std::logic_error("missing limit snapshot");
        return static_cast<std::size_t>(it - limit.times.begin());
      };
      report.limit_radius_T = equivalent_radius({limit.curves.back()});

      RDState s = make_rd_state(initial_field(c, g, eps), v0, coupling);
      const double dt = c.dt_safety * rd_dt_bound(g, eps, nl, coupling);
      Aggregate agg;
      double v_error = 0.0;
      std::ofstream obs;
      if (!dir.empty()) {
        obs = open_text(dir + "/observers.csv");
        obs << "t,hausdorff,layer_error,theta_sup,graph_ok,transversality,v_error\n";
      }
      std::vector<RDObserver> observers;
      for (std::size_t k = 0; k < times.size(); ++k) {
        observers.push_back({times[k], [&, k](const RDState& st) {
                               const std::size_t li = limit_index(times[k]);
                               const std::vector<Curve> ref{limit.curves[li]};
                               const auto m = measure(st.u, st.t, ref, profile, eps, c.graph_tube);
                               agg.add(m);
                               const double ve = max_abs_difference(st.v, limit.v[li]);
                               v_error = std::max(v_error, ve);
                               if (obs.is_open()) write_observer_row(obs, m, ve);
                               if (k + 1 == times.size()) {
                                 rec.radius_T = equivalent_radius(m.level);
                                 if (!dir.empty()) {
                                   write_curves_csv(dir + "/level_T.csv", m.level);
                                   write_curves_csv(dir + "/limit_T.csv", ref);
                                   write_theta_csv(dir + "/theta_T.csv", m.graph, eps);
                                   if (c.write_fields) {
                                     write_pgm(dir + "/u_T.pgm", st.u, st.t);
                                     write_pgm(dir + "/v_T.pgm", st.v, st.t);
                                   }
                                 }
                               }
                             }});
      }
      simulate_rd(std::move(s), nl, eps, dt, c.T, std::move(observers));
      rec.steps = static_cast<long>(std::ceil(c.T / dt));
      finish_record(rec, agg);
      rec.v_error_max = v_error;
    });
    report.records.push_back(rec);
  }
  add_fit(report, "hausdorff_max", &SweepRecord::hausdorff_max);
  add_fit(report, "layer_error_max", &SweepRecord::layer_error_max);
  add_fit(report, "v_error_max", &SweepRecord::v_error_max);
  return report;
}

// ---------------------------------------------------------------------------
// Report output

std::string report_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "eps,t_eps,status,hausdorff_max,layer_error_max,theta_sup,graph_ok,transversality_min,"
         "generation_time,generation_ratio,censored,v_error_max,radius_T,steps,config_hash,"
         "diagnostic\n";
  for (const auto& rec : r.records) {
    std::string diag = rec.diagnostic;
    std::replace(diag.begin(), diag.end(), '"', '\'');
    std::replace(diag.begin(), diag.end(), '\n', ' ');
    out << format_double(rec.eps) << ',' << format_double(rec.t_eps) << ','
        << (rec.ok ? "ok" : "aborted") << ',' << format_double(rec.hausdorff_max) << ','
        << format_double(rec.layer_error_max) << ',' << format_double(rec.theta_sup) << ','
        << (rec.graph_ok ? 1 : 0) << ',' << format_double(rec.transversality_min) << ','
        << format_double(rec.generation_time) << ',' << format_double(rec.generation_ratio) << ','
        << (rec.censored ? 1 : 0) << ',' << format_double(rec.v_error_max) << ','
        << format_double(rec.radius_T) << ',' << rec.steps << ',' << rec.config_hash << ",\""
        << diag << "\"\n";
  }
  return out.str();
}

std::string fit_text(const SweepReport& r) {
  std::ostringstream out;
  out << "kind = " << r.kind << "\nconfig_hash = " << config_hash(r.config) << "\n";
  if (!std::isnan(r.limit_radius_T)) {
    out << "limit_radius_T = " << format_double(r.limit_radius_T) << "\n";
  }
  for (const auto& f : r.fits) {
    out << f.quantity << ": order = " << format_double(f.fit.order)
        << ", constant = " << format_double(f.fit.constant)
        << ", residual = " << format_double(f.fit.residual) << ", points = " << f.points << "\n";
  }
  return out.str();
}

void write_report(const SweepReport& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  open_text(out_dir + "/report.csv") << report_csv(r);
  open_text(out_dir + "/fit.txt") << fit_text(r);
  open_text(out_dir + "/config.txt") << serialize(r.config);
}

}  // namespace layerlab

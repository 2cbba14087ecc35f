#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "layerlab/curve.hpp"
#include "layerlab/field.hpp"
#include "layerlab/geometry.hpp"
#include "layerlab/nonlinearity.hpp"

namespace layerlab {

// f'(a)^{-1} eps^2 |ln eps|.
double t_eps(double eps, const BistableNonlinearity& nl);

struct OrderFit {
  double order = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // RMS misfit in log space
};

// Least squares for log err = log C + p log eps.
OrderFit fit_order(std::span<const std::pair<double, double>> pairs);

// Flat `key = value` configuration shared by all subcommands. Keys are
// documented in the README; parse_config rejects unknown ones.
struct ExperimentConfig {
  std::vector<double> eps_list{0.08, 0.04, 0.02};
  double mu = 2.0;
  double T = 0.04;
  Box domain{-1.0, 1.0, -1.0, 1.0};
  double R0 = 0.35;
  std::string curve_file;         // non-radial initial interface (CSV)
  double steepness = 5.0;
  std::string initial = "tanh";   // tanh | layer
  std::string nonlinearity = "cubic";
  std::string forcing = "none";   // none | constant | linear_x
  double delta = 0.0;
  double cells_per_eps = 8.0;
  double dt_safety = 0.9;
  int observers = 20;
  double graph_tube = 4.0;        // graph_over tube in units of eps
  double eta = 0.1;
  double c_tube = 6.0;
  int generation_samples = 8;     // coarse observer spacing t_eps / samples
  double generation_tol = 1e-3;   // bisection bracket in units of t_eps
  double alpha = 1.0;
  double beta = 1.0;
  double D = 1.0;
  std::vector<double> f1;         // FitzHugh-Nagumo f1(u) coefficients
  double v0 = 0.1;
  int remesh_interval = 5;
  double limit_dt = 1e-5;
  int N = 2;
  double eps = 0.05;              // single runs (simulate)
  double t_end = 0.04;
  std::vector<double> snapshot_times;
  double z_max = 10.0;
  int profile_samples = 4000;
  bool write_fields = true;

  bool radial() const { return curve_file.empty(); }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Every key in a fixed order; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& c);
// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

BistableNonlinearity make_nonlinearity(const ExperimentConfig& c);
std::optional<Forcing> make_forcing(const ExperimentConfig& c);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SweepRecord {
  double eps = 0.0;
  double t_eps = 0.0;
  double hausdorff_max = kNaN;
  double layer_error_max = kNaN;
  double theta_sup = kNaN;
  double generation_time = kNaN;
  double generation_ratio = kNaN;  // generation_time / (eps^2 |ln eps|)
  bool graph_ok = false;
  double transversality_min = kNaN;
  double v_error_max = kNaN;
  double radius_T = kNaN;          // sqrt(area / pi) of the level set at T
  long steps = 0;
  bool ok = false;
  bool censored = false;
  std::string diagnostic;
  std::string config_hash;
};

struct NamedFit {
  std::string quantity;
  OrderFit fit;
  std::size_t points = 0;
};

struct SweepReport {
  std::string kind;  // validity | generation | fhn
  ExperimentConfig config;
  std::vector<SweepRecord> records;
  std::vector<NamedFit> fits;
  // Limit radius at T for radial runs.
  double limit_radius_T = kNaN;

  bool all_ok() const;
};

// Per-eps diagnostics are written under out_dir when it is non-empty.
SweepReport run_validity_sweep(const ExperimentConfig& c, const std::string& out_dir = "");
SweepReport run_generation_study(const ExperimentConfig& c, const std::string& out_dir = "");
SweepReport run_fhn_sweep(const ExperimentConfig& c, const std::string& out_dir = "");

// report.csv, fit.txt and config.txt.
void write_report(const SweepReport& r, const std::string& out_dir);
std::string report_csv(const SweepReport& r);
std::string fit_text(const SweepReport& r);

// Observer times: `count` uniformly spaced points of [lo, hi].
std::vector<double> observer_times(double lo, double hi, int count);

// Initial field for a config on a grid: the radial tanh data, or tanh of the
// signed distance to the configured curve, or the developed layer
// U0(d / eps) when initial = layer.
ScalarField initial_field(const ExperimentConfig& c, const GridGeometry& g, double eps);

}  // namespace layerlab

#pragma once

#include <functional>
#include <vector>

#include "layerlab/curve.hpp"
#include "layerlab/field.hpp"
#include "layerlab/nonlinearity.hpp"

namespace layerlab {

struct RadialState {
  double R = 0.0;
  double t = 0.0;
  int N = 2;
};

struct RadialTrajectory {
  std::vector<RadialState> samples;

  const RadialState& final() const { return samples.back(); }
  // Linear interpolation between samples; t must lie in the sampled range.
  double radius_at(double t) const;
};

// Normal velocity contributed by the forcing, c0 int_{a-}^{a+} g(x, t, r) dr.
class LimitForcing {
 public:
  using Fn = std::function<double(Point, double)>;

  LimitForcing() = default;
  explicit LimitForcing(Fn fn);

  static LimitForcing zero();
  static LimitForcing constant(double value);
  // c0 times the r-integral of the limit of g over [a-, a+].
  static LimitForcing from_forcing(const Forcing& g, const BistableNonlinearity& nl);

  double operator()(Point p, double t) const;
  bool is_zero() const { return !fn_ && value_ == 0.0; }

 private:
  Fn fn_;
  double value_ = 0.0;
};

// Classical RK4 for dR/dt = -(N-1)/R + F((R, 0), t), landing exactly on
// t_end. Throws ExtinctionError when a step would carry R through zero.
RadialTrajectory evolve_radial(double R0, int N, const LimitForcing& F, double t_end, double dt);

struct CurveFlowOptions {
  int remesh_interval = 5;
  double target_spacing = 0.0;  // 0: mean spacing of the initial curve
  std::vector<double> snapshot_times;
};

struct CurveTrajectory {
  std::vector<double> times;
  std::vector<Curve> curves;
};

// Explicit front tracking of V_n = -kappa + F. Steps longer than
// (min segment)^2 / 4 are split into equal substeps. The trajectory holds the
// initial curve, every requested snapshot and the final curve.
CurveTrajectory evolve_curve(const Curve& c, const LimitForcing& F, double t_end, double dt,
                             const CurveFlowOptions& options = {});

struct RDLimitTrajectory {
  std::vector<double> times;
  std::vector<Curve> curves;
  std::vector<ScalarField> v;
};

// Operator-split step of the limit system: the step function u~ (a- inside
// the curve, a+ outside), an Euler step of v_t = D Lap v + h(u~, v), and the
// curve moved with V_n = -kappa - c0 int f1(r, v) dr using v at the start of
// the step.
RDLimitTrajectory evolve_rd_limit(const Curve& c, const ScalarField& v0,
                                  const SystemCoupling& coupling, const BistableNonlinearity& nl,
                                  double c0, double t_end, double dt,
                                  const CurveFlowOptions& options = {});

// Tabulated I(v) = int_{a-}^{a+} f1(r, v) dr on a v-grid of spacing 1e-3 with
// cubic (Catmull-Rom) interpolation; values outside the table are integrated
// directly.
class CouplingIntegral {
 public:
  CouplingIntegral(const SystemCoupling& coupling, const BistableNonlinearity& nl, double v_lo,
                   double v_hi, double spacing = 1e-3);

  double operator()(double v) const;
  double exact(double v) const;

 private:
  SystemCoupling coupling_;
  double a_minus_;
  double a_plus_;
  double v_lo_;
  double spacing_;
  std::vector<double> table_;
};

// Step function u~ on the grid nodes.
ScalarField step_function(const GridGeometry& g, const Curve& c, const BistableNonlinearity& nl);

Side inside_outside(const Curve& c, Point q);

}  // namespace layerlab

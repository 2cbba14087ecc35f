#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "layerlab/field.hpp"
#include "layerlab/nonlinearity.hpp"

namespace layerlab {

// 5-point Laplacian with mirror ghosts (second-order homogeneous Neumann).
ScalarField laplacian_neumann(const ScalarField& f);

struct ACParams {
  double eps = 0.05;
  BistableNonlinearity nl = make_cubic();
  std::optional<Forcing> forcing;  // empty means g = 0
  double dt = 0.0;
  double t = 0.0;
};

// Largest admissible explicit step,
//   1 / (1.01 (4 / h^2 + max|f'| / eps^2)),
// which is below both the diffusive and the reaction limit and keeps the
// update monotone (discrete maximum principle).
double allen_cahn_dt_bound(const GridGeometry& g, double eps, const BistableNonlinearity& nl);

// Values outside [-kBlowUpBound, kBlowUpBound] abort the run.
inline constexpr double kBlowUpBound = 10.0;

// u + dt (Lap u + (f(u) - eps g(x,t,u)) / eps^2); advances p.t.
ScalarField step_allen_cahn(const ScalarField& u, ACParams& p);

struct Observer {
  double time = 0.0;
  std::function<void(const ScalarField& u, double t)> callback;
};

struct SimulationResult {
  ScalarField field;
  double t = 0.0;
  long steps = 0;
};

// Steps (P^eps) to t_end, shortening steps to land exactly on every observer
// time and on t_end.
SimulationResult simulate_ac(ScalarField u0, ACParams& p, double t_end,
                             std::vector<Observer> observers = {});

// Discrete Lyapunov functional int (eps |grad u|^2 / 2 + W(u) / eps) with
// trapezoid node weights and one-sided (edge) differences. The mirror
// Laplacian is exactly its weighted gradient, so explicit steps below
// allen_cahn_dt_bound never increase it when g = 0.
double energy(const ScalarField& u, double eps, const BistableNonlinearity& nl);

struct RDState {
  ScalarField u;
  ScalarField v;
  SystemCoupling coupling;
  double t = 0.0;
  double u_bound = 2.0;  // L of the invariant rectangle
  double v_bound = 1.0;  // M1 of the invariant rectangle
};

// Builds the state with M1 from the sign condition on h for |u| <= L and
// M = max |v0|.
RDState make_rd_state(ScalarField u0, ScalarField v0, SystemCoupling coupling, double L = 2.0);

// min(allen_cahn_dt_bound, h^2 / (4 D 1.01)).
double rd_dt_bound(const GridGeometry& g, double eps, const BistableNonlinearity& nl,
                   const SystemCoupling& coupling);

// Simultaneous forward Euler step of both components, Neumann on both.
RDState step_rd(const RDState& s, const BistableNonlinearity& nl, double eps, double dt);

struct RDObserver {
  double time = 0.0;
  std::function<void(const RDState& s)> callback;
};

RDState simulate_rd(RDState s, const BistableNonlinearity& nl, double eps, double dt,
                    double t_end, std::vector<RDObserver> observers = {});

// Smooth eps-independent data with zero set the circle |x - center| = R0:
// a + (a+ - a) tanh(k (r - R0)) outside, a + (a - a-) tanh(k (r - R0)) inside.
ScalarField radial_initial_data(const GridGeometry& g, double R0, double steepness,
                                const BistableNonlinearity& nl, Point center = {0.0, 0.0});

}  // namespace layerlab

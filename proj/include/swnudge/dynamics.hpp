#pragma once

#include <functional>
#include <vector>

#include "swnudge/grid.hpp"

namespace swnudge {

enum class WindProfile { zero, single_gyre, double_gyre };

// Physical constants of the rotating shallow-water basin. Defaults are the
// reduced-gravity mid-latitude setup used throughout the experiments.
struct ModelParams {
  double g_reduced = 0.02;       // m s^-2
  double h_bar = 500.0;          // m, equilibrium thickness
  double f0 = 7e-5;              // s^-1, Coriolis at mid-basin
  double beta = 2e-11;           // m^-1 s^-1, Coriolis gradient
  double friction = 9e-8;        // s^-1 (R)
  double viscosity = 5.0;        // m^2 s^-1 (A)
  double alpha_a = 1.0;          // dissipation switch
  double alpha_tau = 1.0;        // forcing switch
  double tau_max = 0.05;         // wind-stress amplitude
  double rho = 1000.0;           // kg m^-3
  double coriolis_length = 2e6;  // m (D), reference span for the beta term
  WindProfile wind = WindProfile::double_gyre;
};

// Full model state: thickness h (must stay positive) and velocity v.
struct FlowState {
  ScalarField h;
  VectorField v;
  double t = 0.0;
};

// State of the linearised system: deviations about (h_bar, 0).
struct LinearState {
  ScalarField dh;
  VectorField dv;
  double t = 0.0;
};

// Tendencies. For the full nonlinear model `w_t` is the transport (h v)
// tendency; for the simplified and linearised models it is the velocity
// tendency.
struct FlowTendency {
  ScalarField h_t;
  VectorField w_t;
};

// Zonal wind-stress profile; the double-gyre default is
// tau(y) = -tau_max * cos(2 pi y / ly), so the mid-basin value is +tau_max.
double wind_stress(double y, double ly, const ModelParams& p);

// f(y) = f0 + beta (y - D/2)
double coriolis(double y, const ModelParams& p);

// Forcing sampled once per run: the Coriolis parameter as a scalar field and
// the wind forcing already scaled to a transport tendency, as a vector field.
// Keeping these as fields lets symmetry checks transform them alongside the
// state.
struct ForcingFields {
  ScalarField coriolis_f;
  VectorField wind;
};
ForcingFields make_forcing(const Grid& g, const ModelParams& p);

void validate_state(const FlowState& s);

FlowState equilibrium_state(const Grid& g, const ModelParams& p);

// Tendency of (h, hv) for the full model:
//   d(hv)/dt = -(div(hv) + hv . grad) v - g' h grad h - f k x (hv)
//              + (alpha_a A lap - R)(hv) + alpha_tau tau(y)/rho x-hat
//   dh/dt    = -div(hv)
// The h equation uses the wall-flux-aware divergence; walls are free slip
// (normal transport tendency zeroed on each wall).
FlowTendency rhs_nonlinear(const FlowState& s, const ModelParams& p, const ForcingFields& forcing);

// Tendency of (h, v) for the simplified model:
//   dv/dt = -(v . grad) v - g grad h,  dh/dt = -div(h v)
FlowTendency rhs_simplified(const FlowState& s, double g);

// Tendency of the linearisation about (h_bar, 0):
//   d dv/dt = -g grad dh,  d dh/dt = -h_bar div dv
FlowTendency rhs_linearized(const LinearState& s, double h_bar, double g);

// One classical Runge-Kutta step of a generic first-order system.
using RhsFn = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;
std::vector<double> step_rk4(const std::vector<double>& y, double t, double dt, const RhsFn& rhs);

// Advisory stability number dt * sqrt(2 g h_bar) / min(dx, dy); steppers
// refuse values above 1 unless forced.
double cfl_check(const Grid& g, const ModelParams& p, double dt);

FlowState step_nonlinear(const FlowState& s, const ModelParams& p, const ForcingFields& forcing,
                         double dt, bool force_cfl = false);
FlowState step_simplified(const FlowState& s, double g, double dt, bool force_cfl = false);
LinearState step_linearized(const LinearState& s, double h_bar, double g, double dt,
                            bool force_cfl = false);

}  // namespace swnudge

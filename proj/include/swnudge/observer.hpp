#pragma once

#include "swnudge/dynamics.hpp"
#include "swnudge/grid.hpp"
#include "swnudge/kernels.hpp"

namespace swnudge {

enum class ObserverModel { simplified, nonlinear };

struct ObserverConfig {
  KernelSpec kernel_h;
  KernelSpec kernel_v;
  ObserverModel model = ObserverModel::simplified;
};

// Estimated state. Invariant maintained by the run loop: after each step and
// enforce_boundary call, the boundary cells of h_hat equal the observation.
struct ObserverState {
  ScalarField h_hat;
  VectorField v_hat;
  double t = 0.0;
};

// Height correction: k * (h_obs - h_hat).
ScalarField correction_h(const ScalarField& h_obs, const ScalarField& h_hat,
                         const DiscreteKernel& k);

// Velocity/transport correction: componentwise k * grad(h_obs - h_hat).
// The gradient is taken first, then each component is convolved.
VectorField correction_v(const ScalarField& h_obs, const ScalarField& h_hat,
                         const DiscreteKernel& k);

// Model tendency on (h_hat, v_hat) plus the two correction terms. The
// correction for v acts on the velocity tendency here and on the transport
// tendency in the nonlinear variant. Wall-normal tendencies are zeroed after
// the corrections are added.
FlowTendency observer_rhs_simplified(const ObserverState& o, const ScalarField& h_obs,
                                     const ObserverConfig& cfg, double g_reduced);

FlowTendency observer_rhs_nonlinear(const ObserverState& o, const ScalarField& h_obs,
                                    const ObserverConfig& cfg, const ModelParams& params,
                                    const ForcingFields& forcing);

// One RK4 step of the observer ODE. The observation is held fixed over the
// step; corrections are evaluated inside every stage from the stage estimate.
// Callers complete the step with enforce_boundary.
ObserverState step_observer_simplified(const ObserverState& o, const ScalarField& h_obs,
                                       const ObserverConfig& cfg, double g_reduced, double dt,
                                       bool force_cfl = false);

ObserverState step_observer_nonlinear(const ObserverState& o, const ScalarField& h_obs,
                                      const ObserverConfig& cfg, const ModelParams& params,
                                      const ForcingFields& forcing, double dt,
                                      bool force_cfl = false);

// Overwrites the boundary cells of h_hat with the observed values. Interior
// cells and v_hat are untouched.
void enforce_boundary(ObserverState& o, const ScalarField& h_obs);

}  // namespace swnudge

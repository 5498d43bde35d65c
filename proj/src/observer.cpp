#include "swnudge/observer.hpp"

#include <algorithm>
#include <cmath>

namespace swnudge {

ScalarField correction_h(const ScalarField& h_obs, const ScalarField& h_hat,
                         const DiscreteKernel& k) {
  require_same_grid(h_obs, h_hat);
  ScalarField err(h_obs.grid());
  for (int i = 0; i < err.size(); ++i) err.at(i) = h_obs.at(i) - h_hat.at(i);
  return convolve(k, err);
}

VectorField correction_v(const ScalarField& h_obs, const ScalarField& h_hat,
                         const DiscreteKernel& k) {
  require_same_grid(h_obs, h_hat);
  ScalarField err(h_obs.grid());
  for (int i = 0; i < err.size(); ++i) err.at(i) = h_obs.at(i) - h_hat.at(i);
  const VectorField ge = gradient(err);
  return VectorField{convolve(k, ge.x), convolve(k, ge.y)};
}

namespace {

void zero_wall_normal(VectorField& w) {
  const Grid& g = w.grid();
  for (int j = 0; j < g.ny; ++j) {
    w.x(0, j) = 0.0;
    w.x(g.nx - 1, j) = 0.0;
  }
  for (int i = 0; i < g.nx; ++i) {
    w.y(i, 0) = 0.0;
    w.y(i, g.ny - 1) = 0.0;
  }
}

void add_corrections(FlowTendency& td, const ObserverState& o, const ScalarField& h_obs,
                     const DiscreteKernel& kh, const DiscreteKernel& kv) {
  const ScalarField fh = correction_h(h_obs, o.h_hat, kh);
  const VectorField fv = correction_v(h_obs, o.h_hat, kv);
  for (int i = 0; i < td.h_t.size(); ++i) {
    td.h_t.at(i) += fh.at(i);
    td.w_t.x.at(i) += fv.x.at(i);
    td.w_t.y.at(i) += fv.y.at(i);
  }
  zero_wall_normal(td.w_t);
}

}  // namespace

FlowTendency observer_rhs_simplified(const ObserverState& o, const ScalarField& h_obs,
                                     const ObserverConfig& cfg, double g_reduced) {
  const DiscreteKernel kh = build_kernel(cfg.kernel_h);
  const DiscreteKernel kv = build_kernel(cfg.kernel_v);
  FlowTendency td = rhs_simplified(FlowState{o.h_hat, o.v_hat, o.t}, g_reduced);
  add_corrections(td, o, h_obs, kh, kv);
  return td;
}

FlowTendency observer_rhs_nonlinear(const ObserverState& o, const ScalarField& h_obs,
                                    const ObserverConfig& cfg, const ModelParams& params,
                                    const ForcingFields& forcing) {
  const DiscreteKernel kh = build_kernel(cfg.kernel_h);
  const DiscreteKernel kv = build_kernel(cfg.kernel_v);
  FlowTendency td = rhs_nonlinear(FlowState{o.h_hat, o.v_hat, o.t}, params, forcing);
  add_corrections(td, o, h_obs, kh, kv);
  return td;
}

namespace {

void guard_cfl_observer(const Grid& g, double g_reduced, double h_ref, double dt, bool force) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double c = dt * std::sqrt(2.0 * g_reduced * h_ref) / std::min(g.dx, g.dy);
  if (c > 1.0 && !force)
    throw CflViolation("time step violates the advisory stability bound (cfl=" +
                       std::to_string(c) + "); pass the force flag to override");
}

}  // namespace

ObserverState step_observer_simplified(const ObserverState& o, const ScalarField& h_obs,
                                       const ObserverConfig& cfg, double g_reduced, double dt,
                                       bool force_cfl) {
  require_same_grid(o.h_hat, h_obs);
  const Grid& g = o.h_hat.grid();
  const double hmax = *std::max_element(o.h_hat.data().begin(), o.h_hat.data().end());
  guard_cfl_observer(g, g_reduced, hmax, dt, force_cfl);
  const DiscreteKernel kh = build_kernel(cfg.kernel_h);
  const DiscreteKernel kv = build_kernel(cfg.kernel_v);

  const int n = g.size();
  std::vector<double> y(static_cast<size_t>(3) * n);
  for (int k = 0; k < n; ++k) {
    y[k] = o.h_hat.at(k);
    y[n + k] = o.v_hat.x.at(k);
    y[2 * n + k] = o.v_hat.y.at(k);
  }
  auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
    ObserverState st{ScalarField(g), VectorField(g), 0.0};
    for (int k = 0; k < n; ++k) {
      st.h_hat.at(k) = yy[k];
      st.v_hat.x.at(k) = yy[n + k];
      st.v_hat.y.at(k) = yy[2 * n + k];
    }
    FlowTendency td = rhs_simplified(FlowState{st.h_hat, st.v_hat, 0.0}, g_reduced);
    add_corrections(td, st, h_obs, kh, kv);
    for (int k = 0; k < n; ++k) {
      dydt[k] = td.h_t.at(k);
      dydt[n + k] = td.w_t.x.at(k);
      dydt[2 * n + k] = td.w_t.y.at(k);
    }
  };
  const std::vector<double> ynew = step_rk4(y, o.t, dt, rhs);
  ObserverState out{ScalarField(g), VectorField(g), o.t + dt};
  for (int k = 0; k < n; ++k) {
    out.h_hat.at(k) = ynew[k];
    out.v_hat.x.at(k) = ynew[n + k];
    out.v_hat.y.at(k) = ynew[2 * n + k];
  }
  return out;
}

ObserverState step_observer_nonlinear(const ObserverState& o, const ScalarField& h_obs,
                                      const ObserverConfig& cfg, const ModelParams& params,
                                      const ForcingFields& forcing, double dt, bool force_cfl) {
  require_same_grid(o.h_hat, h_obs);
  const Grid& g = o.h_hat.grid();
  for (double h : o.h_hat.data())
    if (!(h > 0.0)) throw InvalidState("estimated thickness must stay positive");
  const double hmax = *std::max_element(o.h_hat.data().begin(), o.h_hat.data().end());
  guard_cfl_observer(g, params.g_reduced, hmax, dt, force_cfl);
  const DiscreteKernel kh = build_kernel(cfg.kernel_h);
  const DiscreteKernel kv = build_kernel(cfg.kernel_v);

  const int n = g.size();
  std::vector<double> y(static_cast<size_t>(3) * n);
  for (int k = 0; k < n; ++k) {
    y[k] = o.h_hat.at(k);
    y[n + k] = o.h_hat.at(k) * o.v_hat.x.at(k);
    y[2 * n + k] = o.h_hat.at(k) * o.v_hat.y.at(k);
  }
  auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
    ObserverState st{ScalarField(g), VectorField(g), 0.0};
    for (int k = 0; k < n; ++k) {
      const double h = yy[k];
      if (!(h > 0.0)) throw InvalidState("estimated thickness became nonpositive during a stage");
      st.h_hat.at(k) = h;
      st.v_hat.x.at(k) = yy[n + k] / h;
      st.v_hat.y.at(k) = yy[2 * n + k] / h;
    }
    FlowTendency td = rhs_nonlinear(FlowState{st.h_hat, st.v_hat, 0.0}, params, forcing);
    add_corrections(td, st, h_obs, kh, kv);
    for (int k = 0; k < n; ++k) {
      dydt[k] = td.h_t.at(k);
      dydt[n + k] = td.w_t.x.at(k);
      dydt[2 * n + k] = td.w_t.y.at(k);
    }
  };
  const std::vector<double> ynew = step_rk4(y, o.t, dt, rhs);
  ObserverState out{ScalarField(g), VectorField(g), o.t + dt};
  for (int k = 0; k < n; ++k) {
    const double h = ynew[k];
    if (!(h > 0.0)) throw InvalidState("estimated thickness became nonpositive");
    out.h_hat.at(k) = h;
    out.v_hat.x.at(k) = ynew[n + k] / h;
    out.v_hat.y.at(k) = ynew[2 * n + k] / h;
  }
  return out;
}

void enforce_boundary(ObserverState& o, const ScalarField& h_obs) {
  require_same_grid(o.h_hat, h_obs);
  const Grid& g = o.h_hat.grid();
  for (int i = 0; i < g.nx; ++i) {
    o.h_hat(i, 0) = h_obs(i, 0);
    o.h_hat(i, g.ny - 1) = h_obs(i, g.ny - 1);
  }
  for (int j = 0; j < g.ny; ++j) {
    o.h_hat(0, j) = h_obs(0, j);
    o.h_hat(g.nx - 1, j) = h_obs(g.nx - 1, j);
  }
}

}  // namespace swnudge

#include "swnudge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swnudge {

double wind_stress(double y, double ly, const ModelParams& p) {
  switch (p.wind) {
    case WindProfile::zero:
      return 0.0;
    case WindProfile::single_gyre:
      return -p.tau_max * std::cos(std::numbers::pi * y / ly);
    case WindProfile::double_gyre:
      return -p.tau_max * std::cos(2.0 * std::numbers::pi * y / ly);
  }
  return 0.0;
}

double coriolis(double y, const ModelParams& p) {
  return p.f0 + p.beta * (y - 0.5 * p.coriolis_length);
}

ForcingFields make_forcing(const Grid& g, const ModelParams& p) {
  ForcingFields f{ScalarField(g), VectorField(g)};
  for (int j = 0; j < g.ny; ++j) {
    const double fc = coriolis(g.y(j), p);
    const double wx = p.alpha_tau * wind_stress(g.y(j), g.ly(), p) / p.rho;
    for (int i = 0; i < g.nx; ++i) {
      f.coriolis_f(i, j) = fc;
      f.wind.x(i, j) = wx;
    }
  }
  return f;
}

void validate_state(const FlowState& s) {
  require_same_grid(s.h, s.v.x);
  require_same_grid(s.h, s.v.y);
  for (double h : s.h.data())
    if (!(h > 0.0)) throw InvalidState("thickness must stay positive everywhere");
}

FlowState equilibrium_state(const Grid& g, const ModelParams& p) {
  return FlowState{ScalarField(g, p.h_bar), VectorField(g), 0.0};
}

namespace {

// Free-slip rigid walls: the wall-normal transport/velocity tendency is
// pinned to zero, so a state starting with zero normal flow keeps it.
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

}  // namespace

FlowTendency rhs_nonlinear(const FlowState& s, const ModelParams& p, const ForcingFields& forcing) {
  const Grid& g = s.h.grid();
  require_same_grid(s.h, forcing.coriolis_f);

  VectorField w(g);  // transport h v
  for (int k = 0; k < s.h.size(); ++k) {
    w.x.at(k) = s.h.at(k) * s.v.x.at(k);
    w.y.at(k) = s.h.at(k) * s.v.y.at(k);
  }

  const ScalarField divw = divergence(w);
  const VectorField grad_vx = gradient(s.v.x);
  const VectorField grad_vy = gradient(s.v.y);
  const VectorField grad_h = gradient(s.h);
  const ScalarField lap_wx = laplacian(w.x);
  const ScalarField lap_wy = laplacian(w.y);

  FlowTendency out{ScalarField(g), VectorField(g)};
  const double ca = p.alpha_a * p.viscosity;
  for (int k = 0; k < s.h.size(); ++k) {
    const double adv_x = divw.at(k) * s.v.x.at(k) +
                         (w.x.at(k) * grad_vx.x.at(k) + w.y.at(k) * grad_vx.y.at(k));
    const double adv_y = divw.at(k) * s.v.y.at(k) +
                         (w.x.at(k) * grad_vy.x.at(k) + w.y.at(k) * grad_vy.y.at(k));
    const double pre_x = p.g_reduced * s.h.at(k) * grad_h.x.at(k);
    const double pre_y = p.g_reduced * s.h.at(k) * grad_h.y.at(k);
    const double cor_x = forcing.coriolis_f.at(k) * w.y.at(k);
    const double cor_y = -(forcing.coriolis_f.at(k) * w.x.at(k));
    const double vis_x = ca * lap_wx.at(k) - p.friction * w.x.at(k);
    const double vis_y = ca * lap_wy.at(k) - p.friction * w.y.at(k);
    out.w_t.x.at(k) = ((-adv_x) + (-pre_x)) + ((cor_x + vis_x) + forcing.wind.x.at(k));
    out.w_t.y.at(k) = ((-adv_y) + (-pre_y)) + ((cor_y + vis_y) + forcing.wind.y.at(k));
  }

  const ScalarField divw_noflux = divergence_noflux(w);
  for (int k = 0; k < s.h.size(); ++k) out.h_t.at(k) = -divw_noflux.at(k);

  zero_wall_normal(out.w_t);
  return out;
}

FlowTendency rhs_simplified(const FlowState& s, double g_reduced) {
  const Grid& g = s.h.grid();
  const VectorField grad_vx = gradient(s.v.x);
  const VectorField grad_vy = gradient(s.v.y);
  const VectorField grad_h = gradient(s.h);

  FlowTendency out{ScalarField(g), VectorField(g)};
  for (int k = 0; k < s.h.size(); ++k) {
    const double adv_x = s.v.x.at(k) * grad_vx.x.at(k) + s.v.y.at(k) * grad_vx.y.at(k);
    const double adv_y = s.v.x.at(k) * grad_vy.x.at(k) + s.v.y.at(k) * grad_vy.y.at(k);
    out.w_t.x.at(k) = (-adv_x) + (-(g_reduced * grad_h.x.at(k)));
    out.w_t.y.at(k) = (-adv_y) + (-(g_reduced * grad_h.y.at(k)));
  }

  VectorField w(g);
  for (int k = 0; k < s.h.size(); ++k) {
    w.x.at(k) = s.h.at(k) * s.v.x.at(k);
    w.y.at(k) = s.h.at(k) * s.v.y.at(k);
  }
  const ScalarField divw = divergence_noflux(w);
  for (int k = 0; k < s.h.size(); ++k) out.h_t.at(k) = -divw.at(k);

  zero_wall_normal(out.w_t);
  return out;
}

FlowTendency rhs_linearized(const LinearState& s, double h_bar, double g_reduced) {
  const Grid& g = s.dh.grid();
  const VectorField grad_dh = gradient(s.dh);
  FlowTendency out{ScalarField(g), VectorField(g)};
  for (int k = 0; k < s.dh.size(); ++k) {
    out.w_t.x.at(k) = -(g_reduced * grad_dh.x.at(k));
    out.w_t.y.at(k) = -(g_reduced * grad_dh.y.at(k));
  }
  const ScalarField divv = divergence_noflux(s.dv);
  for (int k = 0; k < s.dh.size(); ++k) out.h_t.at(k) = -(h_bar * divv.at(k));
  zero_wall_normal(out.w_t);
  return out;
}

std::vector<double> step_rk4(const std::vector<double>& y, double t, double dt, const RhsFn& rhs) {
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(t, y, k1);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(t + 0.5 * dt, tmp, k2);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(t + 0.5 * dt, tmp, k3);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(t + dt, tmp, k4);
  std::vector<double> out(n);
  const double c = dt / 6.0;
  for (size_t i = 0; i < n; ++i)
    out[i] = y[i] + c * ((k1[i] + 2.0 * k2[i]) + (2.0 * k3[i] + k4[i]));
  return out;
}

double cfl_check(const Grid& g, const ModelParams& p, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  return dt * std::sqrt(2.0 * p.g_reduced * p.h_bar) / std::min(g.dx, g.dy);
}

namespace {

void guard_cfl(const Grid& g, double g_reduced, double h_ref, double dt, bool force) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double c = dt * std::sqrt(2.0 * g_reduced * h_ref) / std::min(g.dx, g.dy);
  if (c > 1.0 && !force)
    throw CflViolation("time step violates the advisory stability bound (cfl=" +
                       std::to_string(c) + "); pass the force flag to override");
}

}  // namespace

FlowState step_nonlinear(const FlowState& s, const ModelParams& p, const ForcingFields& forcing,
                         double dt, bool force_cfl) {
  validate_state(s);
  const Grid& g = s.h.grid();
  const double hmax = *std::max_element(s.h.data().begin(), s.h.data().end());
  guard_cfl(g, p.g_reduced, hmax, dt, force_cfl);

  const int n = g.size();
  std::vector<double> y(static_cast<size_t>(3) * n);
  for (int k = 0; k < n; ++k) {
    y[k] = s.h.at(k);
    y[n + k] = s.h.at(k) * s.v.x.at(k);
    y[2 * n + k] = s.h.at(k) * s.v.y.at(k);
  }
  auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
    FlowState st{ScalarField(g), VectorField(g), 0.0};
    for (int k = 0; k < n; ++k) {
      const double h = yy[k];
      if (!(h > 0.0)) throw InvalidState("thickness became nonpositive during a stage");
      st.h.at(k) = h;
      st.v.x.at(k) = yy[n + k] / h;
      st.v.y.at(k) = yy[2 * n + k] / h;
    }
    const FlowTendency td = rhs_nonlinear(st, p, forcing);
    for (int k = 0; k < n; ++k) {
      dydt[k] = td.h_t.at(k);
      dydt[n + k] = td.w_t.x.at(k);
      dydt[2 * n + k] = td.w_t.y.at(k);
    }
  };
  const std::vector<double> ynew = step_rk4(y, s.t, dt, rhs);
  FlowState out{ScalarField(g), VectorField(g), s.t + dt};
  for (int k = 0; k < n; ++k) {
    const double h = ynew[k];
    if (!(h > 0.0)) throw InvalidState("thickness became nonpositive");
    out.h.at(k) = h;
    out.v.x.at(k) = ynew[n + k] / h;
    out.v.y.at(k) = ynew[2 * n + k] / h;
  }
  return out;
}

FlowState step_simplified(const FlowState& s, double g_reduced, double dt, bool force_cfl) {
  validate_state(s);
  const Grid& g = s.h.grid();
  const double hmax = *std::max_element(s.h.data().begin(), s.h.data().end());
  guard_cfl(g, g_reduced, hmax, dt, force_cfl);

  const int n = g.size();
  std::vector<double> y(static_cast<size_t>(3) * n);
  for (int k = 0; k < n; ++k) {
    y[k] = s.h.at(k);
    y[n + k] = s.v.x.at(k);
    y[2 * n + k] = s.v.y.at(k);
  }
  auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
    FlowState st{ScalarField(g), VectorField(g), 0.0};
    for (int k = 0; k < n; ++k) {
      st.h.at(k) = yy[k];
      st.v.x.at(k) = yy[n + k];
      st.v.y.at(k) = yy[2 * n + k];
    }
    const FlowTendency td = rhs_simplified(st, g_reduced);
    for (int k = 0; k < n; ++k) {
      dydt[k] = td.h_t.at(k);
      dydt[n + k] = td.w_t.x.at(k);
      dydt[2 * n + k] = td.w_t.y.at(k);
    }
  };
  const std::vector<double> ynew = step_rk4(y, s.t, dt, rhs);
  FlowState out{ScalarField(g), VectorField(g), s.t + dt};
  for (int k = 0; k < n; ++k) {
    out.h.at(k) = ynew[k];
    out.v.x.at(k) = ynew[n + k];
    out.v.y.at(k) = ynew[2 * n + k];
  }
  validate_state(out);
  return out;
}

LinearState step_linearized(const LinearState& s, double h_bar, double g_reduced, double dt,
                            bool force_cfl) {
  const Grid& g = s.dh.grid();
  guard_cfl(g, g_reduced, h_bar, dt, force_cfl);
  const int n = g.size();
  std::vector<double> y(static_cast<size_t>(3) * n);
  for (int k = 0; k < n; ++k) {
    y[k] = s.dh.at(k);
    y[n + k] = s.dv.x.at(k);
    y[2 * n + k] = s.dv.y.at(k);
  }
  auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
    LinearState st{ScalarField(g), VectorField(g), 0.0};
    for (int k = 0; k < n; ++k) {
      st.dh.at(k) = yy[k];
      st.dv.x.at(k) = yy[n + k];
      st.dv.y.at(k) = yy[2 * n + k];
    }
    const FlowTendency td = rhs_linearized(st, h_bar, g_reduced);
    for (int k = 0; k < n; ++k) {
      dydt[k] = td.h_t.at(k);
      dydt[n + k] = td.w_t.x.at(k);
      dydt[2 * n + k] = td.w_t.y.at(k);
    }
  };
  const std::vector<double> ynew = step_rk4(y, s.t, dt, rhs);
  LinearState out{ScalarField(g), VectorField(g), s.t + dt};
  for (int k = 0; k < n; ++k) {
    out.dh.at(k) = ynew[k];
    out.dv.x.at(k) = ynew[n + k];
    out.dv.y.at(k) = ynew[2 * n + k];
  }
  return out;
}

}  // namespace swnudge

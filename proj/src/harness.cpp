#include "swnudge/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <numbers>
#include <ostream>

#include "swnudge/field_io.hpp"

namespace swnudge {

namespace {

void check_flow_sane(const ScalarField& h, const VectorField& v, double h_bar, const char* who,
                     int step) {
  const double bound = 100.0 * std::max(h_bar, 1.0);
  for (double x : h.data())
    if (!std::isfinite(x) || x <= 0.0 || std::abs(x - h_bar) > bound)
      throw NumericalFailure(std::string(who) + " integration blew up at step " +
                                 std::to_string(step),
                             step);
  for (double x : v.x.data())
    if (!std::isfinite(x))
      throw NumericalFailure(std::string(who) + " integration blew up at step " +
                                 std::to_string(step),
                             step);
  for (double x : v.y.data())
    if (!std::isfinite(x))
      throw NumericalFailure(std::string(who) + " integration blew up at step " +
                                 std::to_string(step),
                             step);
}

void entry_cfl_guard(const TwinConfig& cfg) {
  const double c = cfl_check(cfg.grid, cfg.params, cfg.dt);
  if (c > 1.0 && !cfg.force_cfl)
    throw CflViolation("configured time step violates the advisory stability bound (cfl=" +
                       std::to_string(c) + "); set force_cfl to run anyway");
}

FlowState step_truth(const FlowState& s, const TwinConfig& cfg, const ForcingFields& forcing) {
  if (cfg.model == TwinModel::nonlinear)
    return step_nonlinear(s, cfg.params, forcing, cfg.dt, true);
  return step_simplified(s, cfg.params.g_reduced, cfg.dt, true);
}

}  // namespace

FlowState initial_truth(const TwinConfig& cfg) {
  const Grid& g = cfg.grid;
  if (const auto* lm = std::get_if<LowModePerturbation>(&cfg.truth_init)) {
    require(lm->amplitude_h >= 0.0 && lm->amplitude_v >= 0.0, "amplitudes must be nonnegative");
    require(!lm->modes.empty(), "low-mode perturbation needs at least one mode");
    FlowState s = equilibrium_state(g, cfg.params);
    const double scale = 1.0 / static_cast<double>(lm->modes.size());
    for (const auto& [p, q] : lm->modes) {
      require(p >= 1 && q >= 1, "mode indices must be positive");
      const double kx = p * std::numbers::pi / g.lx();
      const double ky = q * std::numbers::pi / g.ly();
      // Velocity as the gradient of a cosine potential: curl-free, so the
      // whole perturbation lies in the subspace the height observations can
      // reach. A rotational component would be frozen by the linearised
      // dynamics and invisible to gradient-shaped corrections, stalling the
      // velocity error at its rotational fraction forever.
      const double kn = std::hypot(kx, ky);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double cx = std::cos(kx * g.x(i)), sx = std::sin(kx * g.x(i));
          const double cy = std::cos(ky * g.y(j)), sy = std::sin(ky * g.y(j));
          s.h(i, j) += scale * lm->amplitude_h * cx * cy;
          s.v.x(i, j) += scale * lm->amplitude_v * (kx / kn) * sx * cy;
          s.v.y(i, j) += scale * lm->amplitude_v * (ky / kn) * cx * sy;
        }
    }
    validate_state(s);
    return s;
  }
  if (const auto* sp = std::get_if<Spinup>(&cfg.truth_init)) {
    require(sp->steps >= 0, "spinup length must be nonnegative");
    entry_cfl_guard(cfg);
    const ForcingFields forcing = make_forcing(g, cfg.params);
    FlowState s = equilibrium_state(g, cfg.params);
    for (int step = 1; step <= sp->steps; ++step) {
      s = step_truth(s, cfg, forcing);
      check_flow_sane(s.h, s.v, cfg.params.h_bar, "spinup", step);
    }
    s.t = 0.0;
    return s;
  }
  const auto& snap = std::get<FromSnapshot>(cfg.truth_init);
  FlowState s{load_field(snap.prefix + "_h.swf"),
              VectorField{load_field(snap.prefix + "_vx.swf"), load_field(snap.prefix + "_vy.swf")},
              0.0};
  require(s.h.grid() == g, "snapshot grid does not match the configured grid");
  require_same_grid(s.h, s.v.x);
  require_same_grid(s.h, s.v.y);
  validate_state(s);
  return s;
}

std::vector<FlowState> generate_truth(const TwinConfig& cfg) {
  require(cfg.n_steps >= 1, "n_steps must be at least 1");
  entry_cfl_guard(cfg);
  const ForcingFields forcing = make_forcing(cfg.grid, cfg.params);
  FlowState s = initial_truth(cfg);

  std::vector<FlowState> traj;
  traj.push_back(s);
  for (int step = 1; step <= cfg.n_steps; ++step) {
    s = step_truth(s, cfg, forcing);
    check_flow_sane(s.h, s.v, cfg.params.h_bar, "truth", step);
    if (step == cfg.n_steps || (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0))
      traj.push_back(s);
  }
  return traj;
}

ScalarField observe(const ScalarField& h, double noise_fraction, std::mt19937_64& rng) {
  require(noise_fraction >= 0.0, "noise fraction must be nonnegative");
  if (noise_fraction == 0.0) return h;

  // Per-cell statistics (not quadrature-weighted): the noise level tracks the
  // plain sample std of the height field at this instant.
  const int n = h.size();
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += h.at(i);
  mean /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += (h.at(i) - mean) * (h.at(i) - mean);
  var /= n;
  const double sigma = noise_fraction * std::sqrt(var);

  ScalarField out = h;
  int i = 0;
  while (i < n) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    out.at(i) += sigma * (r * std::cos(a));
    ++i;
    if (i < n) {
      out.at(i) += sigma * (r * std::sin(a));
      ++i;
    }
  }
  return out;
}

ErrorTriple relative_error(const FlowState& truth, const ObserverState& est,
                           const FlowState& equilibrium) {
  require_same_grid(truth.h, est.h_hat);
  require_same_grid(truth.h, equilibrium.h);
  const double den_h = l2_norm(truth.h - equilibrium.h);
  const double den_vx = l2_norm(truth.v.x - equilibrium.v.x);
  const double den_vy = l2_norm(truth.v.y - equilibrium.v.y);
  if (den_h == 0.0 || den_vx == 0.0 || den_vy == 0.0)
    throw UndefinedMetric("truth coincides with equilibrium; relative error undefined");
  ErrorTriple e;
  e.e_h = l2_norm(est.h_hat - truth.h) / den_h;
  e.e_vx = l2_norm(est.v_hat.x - truth.v.x) / den_vx;
  e.e_vy = l2_norm(est.v_hat.y - truth.v.y) / den_vy;
  return e;
}

namespace {

void save_snapshots(const SnapshotSink& sink, int step, const FlowState& truth,
                    const ObserverState& est) {
  namespace fs = std::filesystem;
  const auto path = [&](const char* var) {
    return (fs::path(sink.dir) /
            (sink.run_id + "_" + var + "_" + std::to_string(step) + ".swf"))
        .string();
  };
  save_field(path("h"), truth.h);
  save_field(path("vx"), truth.v.x);
  save_field(path("vy"), truth.v.y);
  save_field(path("hhat"), est.h_hat);
  save_field(path("vxhat"), est.v_hat.x);
  save_field(path("vyhat"), est.v_hat.y);
}

}  // namespace

RunResult run_twin(const TwinConfig& cfg, const SnapshotSink* sink) {
  require(cfg.n_steps >= 1, "n_steps must be at least 1");
  require(cfg.noise_fraction >= 0.0, "noise fraction must be nonnegative");
  entry_cfl_guard(cfg);

  const ForcingFields forcing = make_forcing(cfg.grid, cfg.params);
  const FlowState equil = equilibrium_state(cfg.grid, cfg.params);
  FlowState truth = initial_truth(cfg);
  ObserverState est{equil.h, equil.v, 0.0};
  std::mt19937_64 rng(cfg.rng_seed);

  RunResult res{ErrorSeries{}, truth, est};
  auto record = [&](int step) {
    const ErrorTriple e = relative_error(truth, est, equil);
    res.series.times.push_back(step * cfg.dt);
    res.series.e_h.push_back(e.e_h);
    res.series.e_vx.push_back(e.e_vx);
    res.series.e_vy.push_back(e.e_vy);
  };
  record(0);
  if (sink && cfg.snapshot_every > 0) save_snapshots(*sink, 0, truth, est);

  for (int step = 1; step <= cfg.n_steps; ++step) {
    const ScalarField h_obs = observe(truth.h, cfg.noise_fraction, rng);
    try {
      if (cfg.observer.model == ObserverModel::nonlinear)
        est = step_observer_nonlinear(est, h_obs, cfg.observer, cfg.params, forcing, cfg.dt, true);
      else
        est = step_observer_simplified(est, h_obs, cfg.observer, cfg.params.g_reduced, cfg.dt,
                                       true);
    } catch (const NumericalFailure&) {
      throw NumericalFailure("observer integration blew up at step " + std::to_string(step), step);
    } catch (const InvalidState&) {
      throw NumericalFailure("observer integration blew up at step " + std::to_string(step), step);
    }
    try {
      truth = step_truth(truth, cfg, forcing);
    } catch (const NumericalFailure&) {
      throw NumericalFailure("truth integration blew up at step " + std::to_string(step), step);
    } catch (const InvalidState&) {
      throw NumericalFailure("truth integration blew up at step " + std::to_string(step), step);
    }
    check_flow_sane(truth.h, truth.v, cfg.params.h_bar, "truth", step);
    check_flow_sane(est.h_hat, est.v_hat, cfg.params.h_bar, "observer", step);
    enforce_boundary(est, h_obs);
    record(step);
    if (sink && cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0)
      save_snapshots(*sink, step, truth, est);
  }
  res.truth_final = truth;
  res.est_final = est;
  return res;
}

namespace {

struct OneFit {
  double c = 0.0, plateau = 0.0, r2 = 0.0;
  bool no_decay = false;
};

OneFit fit_one(const std::vector<double>& t, const std::vector<double>& e) {
  OneFit f;
  const size_t n = e.size();
  const size_t tail = std::max<size_t>(1, n / 10);
  double acc = 0.0;
  for (size_t i = n - tail; i < n; ++i) acc += e[i];
  f.plateau = acc / tail;

  std::vector<double> xs, ys;
  for (size_t i = 0; i < n; ++i)
    if (e[i] > 5.0 * f.plateau && e[i] > 0.0) {
      xs.push_back(t[i]);
      ys.push_back(std::log(e[i]));
    }
  if (xs.size() < 2) {
    f.no_decay = true;
    return f;
  }
  const size_t m = xs.size();
  double xm = 0.0, ym = 0.0;
  for (size_t i = 0; i < m; ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    f.no_decay = true;
    return f;
  }
  const double slope = sxy / sxx;
  f.c = -slope;
  double ssres = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double pred = ym + slope * (xs[i] - xm);
    ssres += (ys[i] - pred) * (ys[i] - pred);
  }
  f.r2 = 1.0 - ssres / syy;
  return f;
}

}  // namespace

RateFit fit_rates(const ErrorSeries& series) {
  require(series.times.size() >= 10, "rate fitting needs at least 10 samples");
  require(series.e_h.size() == series.times.size() && series.e_vx.size() == series.times.size() &&
              series.e_vy.size() == series.times.size(),
          "error series arrays must have equal length");
  const OneFit fh = fit_one(series.times, series.e_h);
  const OneFit fx = fit_one(series.times, series.e_vx);
  const OneFit fy = fit_one(series.times, series.e_vy);
  RateFit r;
  r.c_h = fh.c;
  r.c_vx = fx.c;
  r.c_vy = fy.c;
  r.plateau_h = fh.plateau;
  r.plateau_vx = fx.plateau;
  r.plateau_vy = fy.plateau;
  r.r2_h = fh.r2;
  r.r2_vx = fx.r2;
  r.r2_vy = fy.r2;
  r.no_decay_h = fh.no_decay;
  r.no_decay_vx = fx.no_decay;
  r.no_decay_vy = fy.no_decay;
  return r;
}

std::vector<SweepRow> sweep(const TwinConfig& base, const std::vector<SweepPoint>& variations,
                            int jobs) {
  require(!variations.empty(), "sweep needs at least one variation");
  if (jobs < 1) jobs = 1;

  auto run_one = [&base](const SweepPoint& pt) {
    SweepRow row;
    row.point = pt;
    TwinConfig cfg = base;
    cfg.observer.kernel_h =
        KernelSpec{GaussianSpec{pt.alpha, pt.beta_h}, base.observer.kernel_h.truncation_radius};
    cfg.observer.kernel_v = KernelSpec{GaussianSpec{pt.alpha, 0.1 * pt.beta_h},
                                       base.observer.kernel_v.truncation_radius};
    cfg.noise_fraction = pt.noise_fraction;
    if (pt.dt_override) cfg.dt = *pt.dt_override;
    try {
      const RunResult res = run_twin(cfg);
      row.fit = fit_rates(res.series);
      row.status = (row.fit.no_decay_h && row.fit.no_decay_vx && row.fit.no_decay_vy) ? "no_decay"
                                                                                      : "ok";
    } catch (const NumericalFailure& e) {
      row.status = "unstable:step=" + std::to_string(e.step);
    } catch (const UndefinedMetric&) {
      row.status = "undefined_metric";
    } catch (const Error& e) {
      row.status = std::string("error:") + e.what();
    }
    return row;
  };

  std::vector<SweepRow> rows(variations.size());
  if (jobs == 1) {
    for (size_t i = 0; i < variations.size(); ++i) rows[i] = run_one(variations[i]);
    return rows;
  }
  for (size_t start = 0; start < variations.size(); start += jobs) {
    const size_t end = std::min(variations.size(), start + jobs);
    std::vector<std::future<SweepRow>> futs;
    for (size_t i = start; i < end; ++i)
      futs.push_back(std::async(std::launch::async, run_one, variations[i]));
    for (size_t i = start; i < end; ++i) rows[i] = futs[i - start].get();
  }
  return rows;
}

namespace {

void put_g17(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_error_csv(std::ostream& out, const ErrorSeries& series) {
  out << "step,time_s,e_h,e_vx,e_vy\n";
  for (size_t i = 0; i < series.times.size(); ++i) {
    out << i << ',';
    put_g17(out, series.times[i]);
    out << ',';
    put_g17(out, series.e_h[i]);
    out << ',';
    put_g17(out, series.e_vx[i]);
    out << ',';
    put_g17(out, series.e_vy[i]);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "alpha,beta_h,noise_fraction,c_h,c_vx,c_vy,plateau_h,plateau_vx,plateau_vy,r2_h,status\n";
  for (const SweepRow& row : rows) {
    const double vals[] = {row.point.alpha,   row.point.beta_h,  row.point.noise_fraction,
                           row.fit.c_h,       row.fit.c_vx,      row.fit.c_vy,
                           row.fit.plateau_h, row.fit.plateau_vx, row.fit.plateau_vy,
                           row.fit.r2_h};
    for (double v : vals) {
      put_g17(out, v);
      out << ',';
    }
    out << row.status << '\n';
  }
}

}  // namespace swnudge

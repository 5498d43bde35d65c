#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "swnudge/dynamics.hpp"
#include "swnudge/observer.hpp"

namespace swnudge {

// Truth initialization choices. The low-mode perturbation superposes the
// listed sine/cosine modes around equilibrium, each scaled so the summed
// height deviation peaks at amplitude_h and the velocity at amplitude_v.
struct LowModePerturbation {
  double amplitude_h = 2.0;    // m
  double amplitude_v = 0.008;  // m/s
  std::vector<std::pair<int, int>> modes = {{1, 1}, {2, 1}, {1, 2}};
};

// Integrate the selected model from equilibrium under its forcing for this
// many steps, then restart the clock; only meaningful with wind forcing.
struct Spinup {
  int steps = 17520;
};

// Load <prefix>_h.swf, <prefix>_vx.swf, <prefix>_vy.swf.
struct FromSnapshot {
  std::string prefix;
};

using InitSpec = std::variant<LowModePerturbation, Spinup, FromSnapshot>;

enum class TwinModel { simplified, nonlinear };

struct TwinConfig {
  TwinModel model = TwinModel::simplified;
  Grid grid{81, 81, 25000.0, 25000.0};
  double dt = 1800.0;  // s
  int n_steps = 5760;
  ModelParams params{};
  ObserverConfig observer{};
  double noise_fraction = 0.0;  // 0 = perfect observations
  std::uint64_t rng_seed = 1;
  InitSpec truth_init = LowModePerturbation{};
  int snapshot_every = 0;  // 0 = no snapshots
  bool force_cfl = false;
};

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> e_h;
  std::vector<double> e_vx;
  std::vector<double> e_vy;
};

// Least-squares exponential fit per variable. no_decay_* marks an empty fit
// window (the series never rises 5x above its own plateau).
struct RateFit {
  double c_h = 0.0, c_vx = 0.0, c_vy = 0.0;  // s^-1
  double plateau_h = 0.0, plateau_vx = 0.0, plateau_vy = 0.0;
  double r2_h = 0.0, r2_vx = 0.0, r2_vy = 0.0;
  bool no_decay_h = false, no_decay_vx = false, no_decay_vy = false;

  // A fit is trustworthy only when every variable decayed and fit well.
  bool reliable() const {
    return !no_decay_h && !no_decay_vx && !no_decay_vy && r2_h >= 0.9 && r2_vx >= 0.9 &&
           r2_vy >= 0.9;
  }
};

struct ErrorTriple {
  double e_h = 0.0, e_vx = 0.0, e_vy = 0.0;
};

struct RunResult {
  ErrorSeries series;
  FlowState truth_final;
  ObserverState est_final;
};

// Destination for SWF1 snapshots: files land in dir as
// "<run_id>_<var>_<step>.swf" with var in {h, vx, vy, hhat, vxhat, vyhat}.
struct SnapshotSink {
  std::string dir;
  std::string run_id;
};

// One sweep row: Gaussian gain pair (alpha, beta_h) with the standard
// beta_v = 0.1 beta_h coupling, plus the row's noise level. dt_override
// (with force_cfl on the base config) supports instability-injection rows.
struct SweepPoint {
  double alpha = 1.0;
  double beta_h = 5e-7;
  double noise_fraction = 0.0;
  std::optional<double> dt_override;
};

struct SweepRow {
  SweepPoint point;
  RateFit fit;
  std::string status;  // "ok", "no_decay", "unstable:step=N", "error:..."
};

// Builds the truth state at t = 0 from cfg.truth_init.
FlowState initial_truth(const TwinConfig& cfg);

// Integrates the truth model alone. Returns the trajectory sampled at
// snapshot_every steps (always including the initial and final states).
std::vector<FlowState> generate_truth(const TwinConfig& cfg);

// h plus i.i.d. zero-mean Gaussian noise per cell, std = noise_fraction times
// the instantaneous spatial std of h. noise_fraction 0 returns h unchanged
// without consuming randomness. The Gaussian sampler is pinned (Box-Muller on
// the raw engine) so identical seeds give identical fields everywhere.
ScalarField observe(const ScalarField& h, double noise_fraction, std::mt19937_64& rng);

// Relative L2 errors against the truth, normalized by the truth's deviation
// from equilibrium. Throws UndefinedMetric when a denominator vanishes.
ErrorTriple relative_error(const FlowState& truth, const ObserverState& est,
                           const FlowState& equilibrium);

// Runs the twin experiment: per step observe, advance the observer with that
// observation, advance the truth, enforce the observation boundary, record
// errors. Index 0 of the series is the initial condition.
RunResult run_twin(const TwinConfig& cfg, const SnapshotSink* sink = nullptr);

// Fits exponential decay rates: plateau = mean of the final 10% of samples,
// fit window = samples above 5x plateau, least squares on log error vs time.
RateFit fit_rates(const ErrorSeries& series);

// Runs one twin per variation (jobs > 1 runs them concurrently); rows come
// back in input order with per-row failures recorded in status.
std::vector<SweepRow> sweep(const TwinConfig& base, const std::vector<SweepPoint>& variations,
                            int jobs = 1);

// CSV: "step,time_s,e_h,e_vx,e_vy"
void write_error_csv(std::ostream& out, const ErrorSeries& series);
// CSV: "alpha,beta_h,noise_fraction,c_h,c_vx,c_vy,plateau_h,plateau_vx,plateau_vy,r2_h,status"
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace swnudge

#include "swnudge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "swnudge/dynamics.hpp"
#include "swnudge/errors.hpp"

namespace swnudge {

double ModalCoefficients::delta() const { return std::numbers::pi / (N + 1); }

double kernel_multiplier(const DiscreteKernel& k, double delta, int p, int q) {
  const int r = k.radius();
  std::vector<double> cp(r + 1), cq(r + 1);
  for (int a = 0; a <= r; ++a) {
    cp[a] = std::cos(p * a * delta);
    cq[a] = std::cos(q * a * delta);
  }
  double m = 0.0;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) m += k.at(a, b) * cp[std::abs(a)] * cq[std::abs(b)];
  return m;
}

ModalCoefficients kernel_fourier_coeffs(const KernelSpec& kernel_h, const KernelSpec& kernel_v,
                                        double g, double h_bar, int N) {
  require(N >= 1, "mode count must be at least 1");
  require(g > 0.0 && h_bar > 0.0, "g and h_bar must be positive");
  const DiscreteKernel kh = build_kernel(kernel_h);
  const DiscreteKernel kv = build_kernel(kernel_v);

  ModalCoefficients mc;
  mc.N = N;
  mc.g_hbar = g * h_bar;
  mc.f2.resize(static_cast<size_t>(N) * N);
  mc.g2.resize(static_cast<size_t>(N) * N);
  const double delta = mc.delta();
  for (int p = 1; p <= N; ++p)
    for (int q = 1; q <= N; ++q) {
      const int i = mc.idx(p, q);
      mc.g2[i] = kernel_multiplier(kh, delta, p, q);
      mc.f2[i] = mc.g_hbar + h_bar * kernel_multiplier(kv, delta, p, q);
    }

  for (int p = 1; p <= N; ++p)
    for (int q = 1; q <= N; ++q) {
      const int i = mc.idx(p, q);
      if (!(mc.g2[i] > 0.0))
        throw AssumptionViolated("damping coefficient g2 is not positive at mode (" +
                                     std::to_string(p) + "," + std::to_string(q) + ")",
                                 p, q);
      if (mc.f2[i] < mc.g_hbar * (1.0 - 1e-12))
        throw AssumptionViolated("stiffness coefficient f2 drops below g*h_bar at mode (" +
                                     std::to_string(p) + "," + std::to_string(q) + ")",
                                 p, q);
    }

  // Tail behaviour along the diagonal: both multiplier families must relax
  // toward their limits (g2 -> 0, f2 -> g h_bar) without rising again.
  const double g2_slack = 1e-12 * mc.g2[mc.idx(1, 1)];
  const double f2_slack = 1e-12 * mc.f2[mc.idx(1, 1)];
  for (int k = 2; k <= N; ++k) {
    if (mc.g2[mc.idx(k, k)] > mc.g2[mc.idx(k - 1, k - 1)] + g2_slack)
      throw AssumptionViolated("damping multiplier tail is not non-increasing at mode (" +
                                   std::to_string(k) + "," + std::to_string(k) + ")",
                               k, k);
    if (mc.f2[mc.idx(k, k)] > mc.f2[mc.idx(k - 1, k - 1)] + f2_slack)
      throw AssumptionViolated("stiffness multiplier tail is not non-increasing at mode (" +
                                   std::to_string(k) + "," + std::to_string(k) + ")",
                               k, k);
  }
  return mc;
}

ModeSolution mode_eigenvalues(int p, int q, const ModalCoefficients& mc) {
  require(p >= 1 && p <= mc.N && q >= 1 && q <= mc.N, "mode index out of range");
  const double g2 = mc.g2[mc.idx(p, q)];
  const double f2 = mc.f2[mc.idx(p, q)];
  const double k2 = static_cast<double>(p) * p + static_cast<double>(q) * q;
  const double disc = g2 * g2 - 4.0 * f2 * k2;

  ModeSolution ms;
  ms.p = p;
  ms.q = q;
  if (disc < 0.0) {
    ms.regime = ModeRegime::oscillatory;
    ms.omega = 0.5 * std::sqrt(-disc);
    ms.lambda_plus = {-0.5 * g2, ms.omega};
    ms.lambda_minus = {-0.5 * g2, -ms.omega};
  } else if (disc > 0.0) {
    ms.regime = ModeRegime::overdamped;
    ms.omega = 0.5 * std::sqrt(disc);
    const double slow_fast = -0.5 * (g2 + std::sqrt(disc));  // most negative root
    ms.lambda_minus = slow_fast;
    ms.lambda_plus = f2 * k2 / slow_fast;  // product of roots, avoids cancellation
  } else {
    ms.regime = ModeRegime::critical;
    ms.omega = 0.0;
    ms.lambda_plus = ms.lambda_minus = -0.5 * g2;
  }
  return ms;
}

void set_mode_initial(ModeSolution& ms, double a0, double a1) {
  const double g2 = ms.g2();
  ms.A = a0;
  switch (ms.regime) {
    case ModeRegime::oscillatory:
    case ModeRegime::overdamped:
      ms.B = (a1 + 0.5 * g2 * a0) / ms.omega;
      break;
    case ModeRegime::critical:
      ms.B = a1 + 0.5 * g2 * a0;
      break;
  }
}

std::pair<double, double> evaluate_mode(const ModeSolution& ms, double t) {
  const double g2 = ms.g2();
  switch (ms.regime) {
    case ModeRegime::oscillatory: {
      const double e = std::exp(-0.5 * g2 * t);
      const double c = std::cos(ms.omega * t), s = std::sin(ms.omega * t);
      const double u = e * (ms.A * c + ms.B * s);
      const double ut = e * (-0.5 * g2 * (ms.A * c + ms.B * s) + ms.omega * (ms.B * c - ms.A * s));
      return {u, ut};
    }
    case ModeRegime::overdamped: {
      const double cp = 0.5 * (ms.A + ms.B), cm = 0.5 * (ms.A - ms.B);
      const double lp = ms.lambda_plus.real(), lm = ms.lambda_minus.real();
      const double ep = std::exp(lp * t), em = std::exp(lm * t);
      return {cp * ep + cm * em, lp * cp * ep + lm * cm * em};
    }
    case ModeRegime::critical: {
      const double e = std::exp(-0.5 * g2 * t);
      const double u = (ms.A + ms.B * t) * e;
      return {u, e * (ms.B - 0.5 * g2 * (ms.A + ms.B * t))};
    }
  }
  return {0.0, 0.0};
}

SineTransform::SineTransform(int m) : m_(m) {
  require(m >= 1, "transform size must be at least 1");
  s_.resize(static_cast<size_t>(m) * m);
  const double d = std::numbers::pi / (m + 1);
  for (int p = 1; p <= m; ++p)
    for (int i = 1; i <= m; ++i)
      s_[static_cast<size_t>(p - 1) * m + (i - 1)] = std::sin(p * i * d);
}

namespace {

// C = A * B for row-major m x m matrices.
void matmul(int m, const double* a, const double* b, double* c) {
  std::fill(c, c + static_cast<size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const double aik = a[static_cast<size_t>(i) * m + k];
      const double* brow = b + static_cast<size_t>(k) * m;
      double* crow = c + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) crow[j] += aik * brow[j];
    }
}

void check_reference_grid(const Grid& g, int m) {
  require(g.nx == m + 2 && g.ny == m + 2, "field does not match the transform size");
  require(std::abs(g.lx() - std::numbers::pi) <= 1e-9 && std::abs(g.ly() - std::numbers::pi) <= 1e-9,
          "field does not sample the [0,pi]^2 reference domain");
}

}  // namespace

std::vector<double> SineTransform::forward(const ScalarField& u) const {
  check_reference_grid(u.grid(), m_);
  const int m = m_;
  std::vector<double> interior(static_cast<size_t>(m) * m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      interior[static_cast<size_t>(i - 1) * m + (j - 1)] = u(i, j);
  std::vector<double> t1(interior.size()), out(interior.size());
  matmul(m, s_.data(), interior.data(), t1.data());
  matmul(m, t1.data(), s_.data(), out.data());
  const double scale = 4.0 / ((m + 1.0) * (m + 1.0));
  for (double& v : out) v *= scale;
  return out;
}

ScalarField SineTransform::inverse(const std::vector<double>& coeffs, const Grid& g) const {
  check_reference_grid(g, m_);
  require(static_cast<int>(coeffs.size()) == m_ * m_, "coefficient count mismatch");
  const int m = m_;
  std::vector<double> t1(coeffs.size()), interior(coeffs.size());
  matmul(m, s_.data(), coeffs.data(), t1.data());
  matmul(m, t1.data(), s_.data(), interior.data());
  ScalarField out(g);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      out(i, j) = interior[static_cast<size_t>(i - 1) * m + (j - 1)];
  return out;
}

ScalarField SineTransform::laplacian(const ScalarField& u) const {
  std::vector<double> coeffs = forward(u);
  const int m = m_;
  for (int p = 1; p <= m; ++p)
    for (int q = 1; q <= m; ++q)
      coeffs[static_cast<size_t>(p - 1) * m + (q - 1)] *=
          -(static_cast<double>(p) * p + static_cast<double>(q) * q);
  return inverse(coeffs, u.grid());
}

Grid spectral_grid(int N) {
  require(N >= 1, "mode count must be at least 1");
  const double d = std::numbers::pi / (N + 1);
  return Grid(N + 2, N + 2, d, d);
}

namespace {

// Index folding for the odd-periodic extension about walls 0 and n-1.
std::pair<int, double> fold_odd(int i, int n) {
  const int m = 2 * (n - 1);
  int k = ((i % m) + m) % m;
  if (k <= n - 1) return {k, 1.0};
  return {m - k, -1.0};
}

}  // namespace

ScalarField convolve_odd_periodic(const DiscreteKernel& k, const ScalarField& f) {
  const Grid& g = f.grid();
  const int r = k.radius();
  if (r == 0) {
    ScalarField out(g);
    const double w0 = k.at(0, 0);
    for (int i = 0; i < f.size(); ++i) out.at(i) = w0 * f.at(i);
    return out;
  }
  const int w = g.nx + 2 * r;
  const int hgt = g.ny + 2 * r;
  std::vector<double> padded(static_cast<size_t>(w) * hgt);
  for (int jj = 0; jj < hgt; ++jj) {
    const auto [j, sj] = fold_odd(jj - r, g.ny);
    for (int ii = 0; ii < w; ++ii) {
      const auto [i, si] = fold_odd(ii - r, g.nx);
      padded[static_cast<size_t>(jj) * w + ii] = sj * si * f(i, j);
    }
  }
  std::vector<double> flat(static_cast<size_t>(g.nx) * g.ny);
  convolve_prepadded(k, padded, g.nx, g.ny, flat);
  ScalarField out(g);
  for (int i = 0; i < out.size(); ++i) out.at(i) = flat[i];
  return out;
}

namespace {

void check_dirichlet(const ScalarField& u, const char* what) {
  const Grid& g = u.grid();
  double scale = 0.0;
  for (double v : u.data()) scale = std::max(scale, std::abs(v));
  const double tol = 1e-9 * (1.0 + scale);
  for (int i = 0; i < g.nx; ++i)
    if (std::abs(u(i, 0)) > tol || std::abs(u(i, g.ny - 1)) > tol)
      throw InvalidArgument(std::string(what) + " must vanish on the boundary");
  for (int j = 0; j < g.ny; ++j)
    if (std::abs(u(0, j)) > tol || std::abs(u(g.nx - 1, j)) > tol)
      throw InvalidArgument(std::string(what) + " must vanish on the boundary");
}

ScalarField with_zero_boundary(const ScalarField& u) {
  ScalarField out = u;
  const Grid& g = u.grid();
  for (int i = 0; i < g.nx; ++i) out(i, 0) = out(i, g.ny - 1) = 0.0;
  for (int j = 0; j < g.ny; ++j) out(0, j) = out(g.nx - 1, j) = 0.0;
  return out;
}

}  // namespace

ModalSolutionResult modal_solution(const ScalarField& u0, const ScalarField& u1,
                                   const ModalCoefficients& mc, double t) {
  require_same_grid(u0, u1);
  const Grid& g = u0.grid();
  require(g.square() && g.nx == mc.N + 2, "field grid does not match the coefficient set");
  check_dirichlet(u0, "initial displacement");
  check_dirichlet(u1, "initial velocity");

  const SineTransform st(mc.N);
  const std::vector<double> a0 = st.forward(with_zero_boundary(u0));
  const std::vector<double> a1 = st.forward(with_zero_boundary(u1));

  std::vector<double> c(a0.size()), cdot(a0.size());
  for (int p = 1; p <= mc.N; ++p)
    for (int q = 1; q <= mc.N; ++q) {
      const int i = mc.idx(p, q);
      ModeSolution ms = mode_eigenvalues(p, q, mc);
      set_mode_initial(ms, a0[i], a1[i]);
      const auto [cu, cut] = evaluate_mode(ms, t);
      c[i] = cu;
      cdot[i] = cut;
    }
  return ModalSolutionResult{st.inverse(c, g), st.inverse(cdot, g)};
}

ScalarField DeltaPlusKernel::apply(const ScalarField& f) const {
  ScalarField out = convolve_odd_periodic(kernel, f);
  for (int i = 0; i < out.size(); ++i) out.at(i) = delta_gain * f.at(i) + kernel_gain * out.at(i);
  return out;
}

ErrorTrajectory direct_integrate_error(const ScalarField& u0, const ScalarField& u1,
                                       const DiscreteKernel& kernel_h,
                                       const DeltaPlusKernel& psi_v, double T, double dt,
                                       int sample_every) {
  require_same_grid(u0, u1);
  const Grid& g = u0.grid();
  require(g.square() && g.nx >= 3, "error integration needs a square reference grid");
  require(std::abs(g.lx() - std::numbers::pi) <= 1e-9, "grid must sample [0,pi]^2");
  require(dt > 0.0 && T >= 0.0, "need dt > 0 and T >= 0");
  require(sample_every >= 1, "sample_every must be at least 1");
  check_dirichlet(u0, "initial displacement");
  check_dirichlet(u1, "initial velocity");

  const int N = g.nx - 2;
  const SineTransform st(N);

  // Fastest resolved mode against the RK4 imaginary-axis stability limit.
  double mass_abs = 0.0;
  for (double wv : psi_v.kernel.weights()) mass_abs += std::abs(wv);
  const double c2 = std::abs(psi_v.delta_gain) + std::abs(psi_v.kernel_gain) * mass_abs;
  double damp_abs = 0.0;
  for (double wv : kernel_h.weights()) damp_abs += std::abs(wv);
  const double omega_max = std::sqrt(c2 * 2.0) * N;
  const double stiff = std::hypot(0.5 * damp_abs, omega_max);
  if (stiff * dt > 2.8)
    throw CflViolation("time step too large for the fastest resolved mode (|lambda| dt = " +
                       std::to_string(stiff * dt) + ")");

  ScalarField u = with_zero_boundary(u0);
  ScalarField w = with_zero_boundary(u1);

  // Blow-up detector. The plain H1 form is not the right invariant here: a
  // mode trades u for u_t at ratio sqrt(f2), so for stiff psi_v it swings by
  // orders of magnitude while the dynamics stays perfectly stable. The
  // f2-weighted form sum(aw^2 + f2 k2 au^2) decays along exact solutions
  // (dE/dt = -<w, phi_h w> <= 0), so a 10x rise flags genuine instability.
  std::vector<double> f2k2(static_cast<size_t>(N) * N);
  const double delta = std::numbers::pi / (N + 1);
  for (int p = 1; p <= N; ++p)
    for (int q = 1; q <= N; ++q) {
      const double f2 = psi_v.delta_gain +
                        psi_v.kernel_gain * kernel_multiplier(psi_v.kernel, delta, p, q);
      f2k2[static_cast<size_t>(p - 1) * N + (q - 1)] =
          std::max(f2, 1e-30) * (p * p + q * q);
    }
  const auto wave_energy = [&](const ScalarField& uu, const ScalarField& ww) {
    const std::vector<double> au = st.forward(uu);
    const std::vector<double> aw = st.forward(ww);
    double e2 = 0.0;
    for (size_t i = 0; i < f2k2.size(); ++i) e2 += aw[i] * aw[i] + f2k2[i] * au[i] * au[i];
    return std::sqrt(e2);
  };
  const double e0 = wave_energy(u, w);
  const long check_every = std::min<long>(sample_every, 32);

  const long nsteps = std::llround(T / dt);
  ErrorTrajectory traj;
  traj.times.push_back(0.0);
  traj.u.push_back(u);
  traj.ut.push_back(w);

  const int n = g.size();
  std::vector<double> y(static_cast<size_t>(2) * n);
  for (int i = 0; i < n; ++i) {
    y[i] = u.at(i);
    y[n + i] = w.at(i);
  }
  auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
    ScalarField uu(g), ww(g);
    for (int i = 0; i < n; ++i) {
      uu.at(i) = yy[i];
      ww.at(i) = yy[n + i];
    }
    const ScalarField acc = psi_v.apply(st.laplacian(uu));
    const ScalarField drag = convolve_odd_periodic(kernel_h, ww);
    for (int i = 0; i < n; ++i) {
      dydt[i] = yy[n + i];
      dydt[n + i] = acc.at(i) - drag.at(i);
    }
  };

  for (long step = 1; step <= nsteps; ++step) {
    y = step_rk4(y, (step - 1) * dt, dt, rhs);
    double amax = 0.0;
    for (int i = 0; i < n; ++i) {
      u.at(i) = y[i];
      w.at(i) = y[n + i];
      amax = std::max(amax, std::max(std::abs(y[i]), std::abs(y[n + i])));
    }
    if (!std::isfinite(amax))
      throw NumericalFailure("error-equation integration became unstable",
                             static_cast<int>(step));
    if ((step % check_every == 0 || step % sample_every == 0) && e0 > 0.0 &&
        wave_energy(u, w) > 10.0 * e0)
      throw NumericalFailure("error-equation integration became unstable",
                             static_cast<int>(step));
    if (step % sample_every == 0) {
      traj.times.push_back(step * dt);
      traj.u.push_back(u);
      traj.ut.push_back(w);
    }
  }
  return traj;
}

std::vector<double> hilbert_norm_series(const ErrorTrajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.u.size());
  for (size_t i = 0; i < traj.u.size(); ++i) out.push_back(h1_energy(traj.u[i], traj.ut[i]));
  return out;
}

std::pair<double, double> tuning_heuristic(double L0, double omega0, double xi0, double g,
                                           double h_bar) {
  require(L0 > 0.0 && omega0 >= 0.0 && xi0 >= 0.0, "tuning targets must be nonnegative");
  require(g > 0.0 && h_bar > 0.0, "g and h_bar must be positive");
  const double lhs = L0 * L0 * omega0 * omega0;
  if (lhs < g * h_bar)
    throw InvalidTuning("target pulsation too slow: need L0^2 omega0^2 >= g h_bar");
  const double beta_v = (lhs - g * h_bar) / h_bar;
  const double beta_h = 2.0 * xi0 * omega0;
  return {beta_v, beta_h};
}

double off_diagonal_leakage(const DiscreteKernel& k, int N, int p, int q) {
  require(p >= 1 && p <= N && q >= 1 && q <= N, "mode index out of range");
  const Grid g = spectral_grid(N);
  const int r = k.radius();
  require(g.nx - 1 - r >= r, "kernel radius too large for the requested mode grid");

  ScalarField e(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) e(i, j) = std::sin(p * g.x(i)) * std::sin(q * g.y(j));
  const ScalarField conv = convolve(k, e);
  const double m = kernel_multiplier(k, g.dx, p, q);

  double resid = 0.0, denom = 0.0;
  for (int j = r; j <= g.ny - 1 - r; ++j)
    for (int i = r; i <= g.nx - 1 - r; ++i) {
      resid = std::max(resid, std::abs(conv(i, j) - m * e(i, j)));
      denom = std::max(denom, std::abs(m * e(i, j)));
    }
  if (denom == 0.0) return resid == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return resid / denom;
}

double scale_gain_to_spectral(double beta, double physical_length) {
  require(physical_length > 0.0, "physical length must be positive");
  return beta * (physical_length / std::numbers::pi);
}

OverdampedScan scan_overdamped(const ModalCoefficients& mc) {
  OverdampedScan scan;
  for (int p = 1; p <= mc.N; ++p)
    for (int q = 1; q <= mc.N; ++q) {
      const int i = mc.idx(p, q);
      const double k2 = static_cast<double>(p) * p + static_cast<double>(q) * q;
      const double disc = mc.g2[i] * mc.g2[i] - 4.0 * mc.f2[i] * k2;
      scan.radius = std::max(scan.radius, mc.g2[i] * mc.g2[i] / (4.0 * mc.f2[i]));
      if (disc >= 0.0) {
        ++scan.count;
        scan.max_p2q2 = std::max(scan.max_p2q2, static_cast<long>(k2));
      }
    }
  return scan;
}

void write_mode_report(std::ostream& out, const ModalCoefficients& mc) {
  out << "p,q,f2,g2,discriminant,regime,re_lambda,im_lambda\n";
  char buf[512];
  for (int p = 1; p <= mc.N; ++p)
    for (int q = 1; q <= mc.N; ++q) {
      const ModeSolution ms = mode_eigenvalues(p, q, mc);
      const int i = mc.idx(p, q);
      const double k2 = static_cast<double>(p) * p + static_cast<double>(q) * q;
      const double disc = mc.g2[i] * mc.g2[i] - 4.0 * mc.f2[i] * k2;
      const char* regime = ms.regime == ModeRegime::oscillatory  ? "oscillatory"
                           : ms.regime == ModeRegime::overdamped ? "overdamped"
                                                                 : "critical";
      const double re = ms.lambda_plus.real();
      const double im = ms.regime == ModeRegime::oscillatory ? ms.omega : 0.0;
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%s,%.17g,%.17g\n", p, q, mc.f2[i],
                    mc.g2[i], disc, regime, re, im);
      out << buf;
    }
}

}  // namespace swnudge

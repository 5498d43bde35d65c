#pragma once

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

#include "swnudge/grid.hpp"
#include "swnudge/kernels.hpp"

namespace swnudge {

// Everything here lives on the unit-square reference domain [0,pi]^2 with
// homogeneous Dirichlet walls and the sine basis e_pq = sin(p x) sin(q y),
// p,q = 1..N. The reference grid for N modes has N+2 points per axis and
// spacing pi/(N+1). A gain of the physical configuration maps onto this
// domain via scale_gain_to_spectral.

// Per-mode coefficients of the error wave operator
//   u_tt = psi_v * lap u - phi_h * u_t,  psi_v = g h_bar delta0 + h_bar phi_v:
// f2[p][q] = g h_bar + h_bar m_v(p,q) and g2[p][q] = m_h(p,q), where m is the
// diagonal multiplier of the discrete kernel on the sine basis.
struct ModalCoefficients {
  int N = 0;
  double g_hbar = 0.0;
  std::vector<double> f2;
  std::vector<double> g2;

  int idx(int p, int q) const { return (p - 1) * N + (q - 1); }
  double delta() const;  // reference grid spacing pi/(N+1)
};

enum class ModeRegime { oscillatory, overdamped, critical };

// Eigenstructure of one mode of u_tt + g2 u_t + f2 (p^2+q^2) u = 0 plus the
// initial-data coefficients of the closed-form solution (A, B are zero until
// set_mode_initial fills them):
//   oscillatory: u = e^(-g2 t/2) (A cos wt + B sin wt)
//   overdamped:  u = e^(-g2 t/2) (A cosh wt + B sinh wt)
//   critical:    u = e^(-g2 t/2) (A + B t)
struct ModeSolution {
  int p = 0, q = 0;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  ModeRegime regime = ModeRegime::oscillatory;
  double omega = 0.0;
  double A = 0.0, B = 0.0;

  double g2() const { return -(lambda_plus.real() + lambda_minus.real()); }
};

// Diagonal multiplier of a discrete kernel against the sine basis with grid
// spacing delta: sum_ab w(a,b) cos(p a delta) cos(q b delta). Exact for the
// odd-periodic extension and pointwise exact wherever the stencil does not
// cross the boundary.
double kernel_multiplier(const DiscreteKernel& k, double delta, int p, int q);

// Builds the modal coefficients for modes 1..N from the two gain kernels and
// validates the standing assumptions of the convergence analysis: g2 > 0,
// f2 >= g h_bar, and a non-increasing diagonal tail. Violations throw
// AssumptionViolated naming the offending mode.
ModalCoefficients kernel_fourier_coeffs(const KernelSpec& kernel_h, const KernelSpec& kernel_v,
                                        double g, double h_bar, int N);

// Solves lambda^2 + g2 lambda + f2 (p^2+q^2) = 0 and classifies the regime
// from the discriminant g2^2 - 4 f2 (p^2+q^2).
ModeSolution mode_eigenvalues(int p, int q, const ModalCoefficients& mc);

// Fills A, B from the mode's initial value a0 and initial velocity a1.
void set_mode_initial(ModeSolution& ms, double a0, double a1);

// Evaluates (c(t), c'(t)) for the mode. Overdamped modes are evaluated in the
// split-exponential form so large horizons cannot overflow.
std::pair<double, double> evaluate_mode(const ModeSolution& ms, double t);

// Dense DST-I on the m interior points per axis of an (m+2)^2 reference grid.
class SineTransform {
 public:
  explicit SineTransform(int m);

  int interior() const { return m_; }

  // coeffs[(p-1)*m + (q-1)] = (2/(m+1))^2 sum_ij u(i,j) sin(p i d) sin(q j d)
  std::vector<double> forward(const ScalarField& u) const;
  // synthesis onto grid g (boundary cells set to zero)
  ScalarField inverse(const std::vector<double>& coeffs, const Grid& g) const;

  // DST round trip with multiplier -(p^2+q^2): the Laplacian restricted to
  // the span of the resolved sine modes.
  ScalarField laplacian(const ScalarField& u) const;

 private:
  int m_;
  std::vector<double> s_;  // s_[(p-1)*m + (i-1)] = sin(p i pi / (m+1))
};

// The reference grid carrying N interior sine modes per axis.
Grid spectral_grid(int N);

// Convolution with odd-periodic extension about both walls (period 2(n-1)),
// the extension under which the kernel acts diagonally on the sine basis.
ScalarField convolve_odd_periodic(const DiscreteKernel& k, const ScalarField& f);

// Closed-form solution of the error wave equation at time t from initial
// displacement u0 and initial velocity u1 (both Dirichlet). Returns u(t) and
// u_t(t) on the grid of u0.
struct ModalSolutionResult {
  ScalarField u;
  ScalarField ut;
};
ModalSolutionResult modal_solution(const ScalarField& u0, const ScalarField& u1,
                                   const ModalCoefficients& mc, double t);

// psi_v as an operator: w -> delta_gain * w + kernel_gain * (kernel * w).
struct DeltaPlusKernel {
  double delta_gain = 0.0;
  double kernel_gain = 0.0;
  DiscreteKernel kernel{0, {0.0}};

  ScalarField apply(const ScalarField& f) const;
};

struct ErrorTrajectory {
  std::vector<double> times;
  std::vector<ScalarField> u;
  std::vector<ScalarField> ut;
};

// RK4 integration of u_tt = psi_v * lap u - phi_h * u_t as a first-order
// system. The Laplacian is applied spectrally; the convolutions use the
// odd-periodic extension. Samples every sample_every steps (the initial state
// is always the first sample). Non-finite values, or growth of the decaying
// wave energy (the f2-weighted modal form) past 10x its initial value, raise
// NumericalFailure carrying the step.
ErrorTrajectory direct_integrate_error(const ScalarField& u0, const ScalarField& u1,
                                       const DiscreteKernel& kernel_h,
                                       const DeltaPlusKernel& psi_v, double T, double dt,
                                       int sample_every = 1);

// h1_energy at every sample of the trajectory.
std::vector<double> hilbert_norm_series(const ErrorTrajectory& traj);

// Gain pair (beta_v, beta_h) placing the slowest mode at pulsation omega0 and
// damping ratio xi0 for a basin of size L0:
//   h_bar beta_v = L0^2 omega0^2 - g h_bar,  beta_h = 2 xi0 omega0.
// Requires L0^2 omega0^2 >= g h_bar.
std::pair<double, double> tuning_heuristic(double L0, double omega0, double xi0, double g,
                                           double h_bar);

// Sup-norm deviation of the zero-extension convolution of e_pq from its
// diagonal action m(p,q) e_pq, measured over cells whose stencil stays inside
// the domain, relative to the diagonal amplitude.
double off_diagonal_leakage(const DiscreteKernel& k, int N, int p, int q);

// Gains configured on a physical basin of side physical_length carry over to
// the reference domain scaled by physical_length / pi, keeping the corrected
// dynamics at unit-scale rates.
double scale_gain_to_spectral(double beta, double physical_length);

struct OverdampedScan {
  int count = 0;        // modes with nonnegative discriminant
  long max_p2q2 = 0;    // largest p^2+q^2 among them (0 if none)
  double radius = 0.0;  // proven bound: every overdamped mode has p^2+q^2 <= radius
};
OverdampedScan scan_overdamped(const ModalCoefficients& mc);

// CSV: "p,q,f2,g2,discriminant,regime,re_lambda,im_lambda". For overdamped
// modes re_lambda reports the slow (least negative) root.
void write_mode_report(std::ostream& out, const ModalCoefficients& mc);

}  // namespace swnudge

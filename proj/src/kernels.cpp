#include "swnudge/kernels.hpp"

#include <cmath>

namespace swnudge {

DiscreteKernel::DiscreteKernel(int radius, std::vector<double> weights)
    : radius_(radius), w_(std::move(weights)) {
  if (radius_ < 0) throw InvalidArgument("kernel radius must be nonnegative");
  const size_t n = static_cast<size_t>(2 * radius_ + 1);
  if (w_.size() != n * n) throw InvalidArgument("kernel weight count does not match radius");
}

DiscreteKernel build_kernel(const KernelSpec& spec) {
  if (spec.is_dirac()) {
    const DiracSpec& d = std::get<DiracSpec>(spec.shape);
    if (!(d.gain >= 0.0)) throw InvalidArgument("dirac gain must be nonnegative");
    return DiscreteKernel(0, {d.gain});
  }
  const GaussianSpec& gs = std::get<GaussianSpec>(spec.shape);
  if (!(gs.alpha > 0.0)) throw InvalidArgument("gaussian alpha must be positive");
  if (!(gs.beta >= 0.0)) throw InvalidArgument("gaussian beta must be nonnegative");
  const int r = spec.truncation_radius;
  if (r < 0) throw InvalidArgument("truncation radius must be nonnegative");
  const int n = 2 * r + 1;
  std::vector<double> w(static_cast<size_t>(n) * n);
  // The weight depends on the integer squared offset only, so every dihedral
  // image of an offset receives the identical double.
  for (int dj = -r; dj <= r; ++dj)
    for (int di = -r; di <= r; ++di)
      w[static_cast<size_t>(dj + r) * n + (di + r)] =
          gs.beta * std::exp(-gs.alpha * static_cast<double>(di * di + dj * dj));
  return DiscreteKernel(r, std::move(w));
}

double kernel_mass(const DiscreteKernel& k) {
  double s = 0.0;
  for (double w : k.weights()) s += w;
  return s;
}

void convolve_prepadded(const DiscreteKernel& k, const std::vector<double>& padded, int nx, int ny,
                        std::vector<double>& out) {
  const int r = k.radius();
  const int w = nx + 2 * r;
  if (padded.size() != static_cast<size_t>(w) * (ny + 2 * r))
    throw InvalidArgument("padded buffer size does not match grid and radius");
  out.assign(static_cast<size_t>(nx) * ny, 0.0);

  // Centre tap first, ...
  const double w0 = k.at(0, 0);
  for (int j = 0; j < ny; ++j) {
    const double* p = padded.data() + static_cast<size_t>(j + r) * w + r;
    double* o = out.data() + static_cast<size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) o[i] = w0 * p[i];
  }
  // ... then quarter-turn orbits in canonical representative order. The four
  // samples of orbit (a, b) are paired as (d, -d) and (Rd, -Rd); pair sums
  // and their combination commute bitwise under rotation, so each cell's
  // accumulated value is rotation-equivariant bit for bit when the four
  // orbit weights agree. Orbit-symmetric kernels (every kernel this library
  // builds) take the cheaper factored form; general weights keep their own
  // taps, so an asymmetric kernel produces an honestly asymmetric result.
  bool orbit_symmetric = true;
  for (int a = 1; a <= r && orbit_symmetric; ++a)
    for (int b = 0; b <= r; ++b) {
      const double wk = k.at(a, b);
      if (k.at(-a, -b) != wk || k.at(-b, a) != wk || k.at(b, -a) != wk) {
        orbit_symmetric = false;
        break;
      }
    }
  for (int a = 1; a <= r; ++a) {
    for (int b = 0; b <= r; ++b) {
      const int off_a = b * w + a;   // offset of (a, b)
      const int off_b = a * w - b;   // offset of (-b, a)
      if (orbit_symmetric) {
        const double wk = k.at(a, b);
        for (int j = 0; j < ny; ++j) {
          const double* p = padded.data() + static_cast<size_t>(j + r) * w + r;
          double* o = out.data() + static_cast<size_t>(j) * nx;
          for (int i = 0; i < nx; ++i)
            o[i] += wk * ((p[i - off_a] + p[i + off_a]) + (p[i - off_b] + p[i + off_b]));
        }
      } else {
        const double w_pp = k.at(a, b);
        const double w_mm = k.at(-a, -b);
        const double w_mp = k.at(-b, a);
        const double w_pm = k.at(b, -a);
        for (int j = 0; j < ny; ++j) {
          const double* p = padded.data() + static_cast<size_t>(j + r) * w + r;
          double* o = out.data() + static_cast<size_t>(j) * nx;
          for (int i = 0; i < nx; ++i)
            o[i] += (w_pp * p[i - off_a] + w_mm * p[i + off_a]) +
                    (w_mp * p[i - off_b] + w_pm * p[i + off_b]);
        }
      }
    }
  }
}

ScalarField convolve(const DiscreteKernel& k, const ScalarField& f) {
  const Grid& g = f.grid();
  const int r = k.radius();
  const int nx = g.nx, ny = g.ny;
  ScalarField out(g);
  if (r == 0) {
    const double w0 = k.at(0, 0);
    for (int idx = 0; idx < f.size(); ++idx) out.at(idx) = w0 * f.at(idx);
    return out;
  }
  const int w = nx + 2 * r;
  std::vector<double> padded(static_cast<size_t>(w) * (ny + 2 * r), 0.0);
  for (int j = 0; j < ny; ++j) {
    const double* src = f.data().data() + static_cast<size_t>(j) * nx;
    double* dst = padded.data() + static_cast<size_t>(j + r) * w + r;
    for (int i = 0; i < nx; ++i) dst[i] = src[i];
  }
  convolve_prepadded(k, padded, nx, ny, out.data());
  return out;
}

}  // namespace swnudge

#pragma once

#include <variant>
#include <vector>

#include "swnudge/grid.hpp"

namespace swnudge {

// Isotropic gain kernel sampled in grid-cell units:
// w(di, dj) = beta * exp(-alpha * (di^2 + dj^2)).
struct GaussianSpec {
  double alpha = 1.0;  // inverse squared width, per cell^2
  double beta = 1.0;   // amplitude; carries the gain's physical units
};

// Point gain: a 1x1 stencil of weight `gain`. Degenerate limit of the
// Gaussian family; convolving with it is plain pointwise scaling.
struct DiracSpec {
  double gain = 1.0;
};

struct KernelSpec {
  std::variant<GaussianSpec, DiracSpec> shape = GaussianSpec{};
  int truncation_radius = 10;  // cells; ignored for Dirac

  bool is_dirac() const { return std::holds_alternative<DiracSpec>(shape); }
};

// Sampled stencil of (2r+1)^2 weights, centre at (r, r). Weights are computed
// from the integer squared offset, so the full dihedral symmetry holds
// bit-exactly by construction.
class DiscreteKernel {
 public:
  DiscreteKernel(int radius, std::vector<double> weights);

  int radius() const { return radius_; }
  // |di| <= r, |dj| <= r
  double at(int di, int dj) const {
    return w_[static_cast<size_t>(dj + radius_) * (2 * radius_ + 1) + (di + radius_)];
  }
  const std::vector<double>& weights() const { return w_; }

 private:
  int radius_;
  std::vector<double> w_;
};

DiscreteKernel build_kernel(const KernelSpec& spec);

// Sum of all stencil weights. For a Gaussian this approximates
// beta * pi / alpha once the truncation radius covers the mass.
double kernel_mass(const DiscreteKernel& k);

// Discrete convolution: out(x) = sum_d w(d) f(x - d), with f extended by
// zero outside the grid. Per output cell the stencil is accumulated centre
// first, then quarter-turn orbits {d, Rd, R^2d, R^3d} in a fixed canonical
// order with opposite offsets paired; that ordering makes the result commute
// with rotate90 bit-exactly on square grids.
ScalarField convolve(const DiscreteKernel& k, const ScalarField& f);

// Same accumulation core, but the caller supplies the (nx+2r) x (ny+2r)
// padded sample buffer and with it the extension rule. Row-major, the field
// proper starting at offset (r, r).
void convolve_prepadded(const DiscreteKernel& k, const std::vector<double>& padded, int nx, int ny,
                        std::vector<double>& out);

}  // namespace swnudge

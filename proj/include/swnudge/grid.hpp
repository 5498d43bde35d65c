#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "swnudge/errors.hpp"

namespace swnudge {

// Uniform collocated grid on [0, (nx-1)*dx] x [0, (ny-1)*dy].
// Nodes sit on the domain boundary; node (i, j) is at (i*dx, j*dy).
struct Grid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double dx_, double dy_) : nx(nx_), ny(ny_), dx(dx_), dy(dy_) {
    if (nx < 3 || ny < 3) throw InvalidGrid("grid needs at least 3 points per axis");
    if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidGrid("grid spacing must be positive");
  }

  int size() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  double x(int i) const { return i * dx; }
  double y(int j) const { return j * dy; }
  double lx() const { return (nx - 1) * dx; }
  double ly() const { return (ny - 1) * dy; }
  bool square() const { return nx == ny && dx == dy; }

  bool operator==(const Grid&) const = default;
};

// Scalar field sampled at grid nodes, row-major (j outer, i inner).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {}

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return v_[grid_.idx(i, j)]; }
  double operator()(int i, int j) const { return v_[grid_.idx(i, j)]; }
  double& at(int k) { return v_[k]; }
  double at(int k) const { return v_[k]; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  bool empty() const { return v_.empty(); }

 private:
  Grid grid_;
  std::vector<double> v_;
};

// Vector field: one scalar field per component, on a shared grid.
struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  explicit VectorField(const Grid& g, double fill = 0.0) : x(g, fill), y(g, fill) {}
  VectorField(ScalarField x_, ScalarField y_) : x(std::move(x_)), y(std::move(y_)) {}
  const Grid& grid() const { return x.grid(); }
};

void require_same_grid(const ScalarField& a, const ScalarField& b);

// Second-order centred differences in the interior, second-order one-sided
// closures on the boundary rows/columns.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& w);
ScalarField laplacian(const ScalarField& f);

// Divergence variant for transport fields with impermeable walls: interior
// nodes use the centred stencil; wall nodes use the half-cell flux balance
// with the wall flux pinned to zero. Summed against trapezoidal cell areas
// this operator telescopes exactly, which is what makes mass conservative.
ScalarField divergence_noflux(const VectorField& w);

// Quarter-turn (counter-clockwise) about the grid centre; square grids only.
// out(a, b) = in(b, n-1-a); vector components map as (wx, wy) -> (-wy, wx).
ScalarField rotate90(const ScalarField& f);
VectorField rotate90(const VectorField& w);

enum class Fill { zero, periodic };

// Shift field values by (sx, sy) cells: out(i, j) = in(i-sx, j-sy),
// vacated cells filled per policy.
ScalarField translate(const ScalarField& f, int sx, int sy, Fill fill);

// Trapezoidal quadrature over the domain: boundary nodes own half cells,
// corners quarter cells. This is the discrete integral behind every norm
// and the conserved mass functional.
double integral(const ScalarField& f);

// sqrt( sum f^2 dA )
double l2_norm(const ScalarField& f);

// sqrt( sum (|grad u|^2 + w^2) dA ): the energy norm of the error system.
double h1_energy(const ScalarField& u, const ScalarField& w);

// Pointwise helpers (grids must match).
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
void axpy(double a, const ScalarField& x, ScalarField& y);  // y += a*x

}  // namespace swnudge

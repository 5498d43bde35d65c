#include "swnudge/grid.hpp"

#include <cmath>

namespace swnudge {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
}

namespace {

// One-sided second-order first derivative at the low/high end of a line.
// low:  (-3 f0 + 4 f1 - f2) / (2h);  high: (3 fn - 4 fn-1 + fn-2) / (2h)
inline double d_low(double f0, double f1, double f2, double h) {
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}
inline double d_high(double fn, double fn1, double fn2, double h) {
  return (3.0 * fn - 4.0 * fn1 + fn2) / (2.0 * h);
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const int nx = g.nx, ny = g.ny;
  const double dx = g.dx, dy = g.dy;
  for (int j = 0; j < ny; ++j) {
    const double* row = f.data().data() + static_cast<size_t>(j) * nx;
    double* gx = out.x.data().data() + static_cast<size_t>(j) * nx;
    gx[0] = d_low(row[0], row[1], row[2], dx);
    for (int i = 1; i < nx - 1; ++i) gx[i] = (row[i + 1] - row[i - 1]) / (2.0 * dx);
    gx[nx - 1] = d_high(row[nx - 1], row[nx - 2], row[nx - 3], dx);
  }
  for (int i = 0; i < nx; ++i) {
    out.y(i, 0) = d_low(f(i, 0), f(i, 1), f(i, 2), dy);
    out.y(i, ny - 1) = d_high(f(i, ny - 1), f(i, ny - 2), f(i, ny - 3), dy);
  }
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) out.y(i, j) = (f(i, j + 1) - f(i, j - 1)) / (2.0 * dy);
  return out;
}

ScalarField divergence(const VectorField& w) {
  require_same_grid(w.x, w.y);
  const Grid& g = w.grid();
  ScalarField out(g);
  const int nx = g.nx, ny = g.ny;
  const double dx = g.dx, dy = g.dy;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double ddx;
      if (i == 0)
        ddx = d_low(w.x(0, j), w.x(1, j), w.x(2, j), dx);
      else if (i == nx - 1)
        ddx = d_high(w.x(nx - 1, j), w.x(nx - 2, j), w.x(nx - 3, j), dx);
      else
        ddx = (w.x(i + 1, j) - w.x(i - 1, j)) / (2.0 * dx);
      double ddy;
      if (j == 0)
        ddy = d_low(w.y(i, 0), w.y(i, 1), w.y(i, 2), dy);
      else if (j == ny - 1)
        ddy = d_high(w.y(i, ny - 1), w.y(i, ny - 2), w.y(i, ny - 3), dy);
      else
        ddy = (w.y(i, j + 1) - w.y(i, j - 1)) / (2.0 * dy);
      out(i, j) = ddx + ddy;
    }
  }
  return out;
}

ScalarField divergence_noflux(const VectorField& w) {
  require_same_grid(w.x, w.y);
  const Grid& g = w.grid();
  ScalarField out(g);
  const int nx = g.nx, ny = g.ny;
  const double dx = g.dx, dy = g.dy;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double ddx;
      if (i == 0)
        ddx = (w.x(0, j) + w.x(1, j)) / dx;
      else if (i == nx - 1)
        ddx = -(w.x(nx - 1, j) + w.x(nx - 2, j)) / dx;
      else
        ddx = (w.x(i + 1, j) - w.x(i - 1, j)) / (2.0 * dx);
      double ddy;
      if (j == 0)
        ddy = (w.y(i, 0) + w.y(i, 1)) / dy;
      else if (j == ny - 1)
        ddy = -(w.y(i, ny - 1) + w.y(i, ny - 2)) / dy;
      else
        ddy = (w.y(i, j + 1) - w.y(i, j - 1)) / (2.0 * dy);
      out(i, j) = ddx + ddy;
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const int nx = g.nx, ny = g.ny;
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  // Second derivative: centred 3-point inside, one-sided 4-point (second
  // order) on the boundary: (2 f0 - 5 f1 + 4 f2 - f3) / h^2. A 3-point line
  // has no second-order closure; it degrades to the plain 3-point stencil.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double fxx;
      if (i == 0)
        fxx = (nx > 3) ? (2.0 * f(0, j) - 5.0 * f(1, j) + 4.0 * f(2, j) - f(3, j)) * ix2
                       : (f(0, j) - 2.0 * f(1, j) + f(2, j)) * ix2;
      else if (i == nx - 1)
        fxx = (nx > 3)
                  ? (2.0 * f(nx - 1, j) - 5.0 * f(nx - 2, j) + 4.0 * f(nx - 3, j) - f(nx - 4, j)) *
                        ix2
                  : (f(nx - 1, j) - 2.0 * f(nx - 2, j) + f(nx - 3, j)) * ix2;
      else
        fxx = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * ix2;
      double fyy;
      if (j == 0)
        fyy = (ny > 3) ? (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) * iy2
                       : (f(i, 0) - 2.0 * f(i, 1) + f(i, 2)) * iy2;
      else if (j == ny - 1)
        fyy = (ny > 3)
                  ? (2.0 * f(i, ny - 1) - 5.0 * f(i, ny - 2) + 4.0 * f(i, ny - 3) - f(i, ny - 4)) *
                        iy2
                  : (f(i, ny - 1) - 2.0 * f(i, ny - 2) + f(i, ny - 3)) * iy2;
      else
        fyy = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * iy2;
      out(i, j) = fxx + fyy;
    }
  }
  return out;
}

ScalarField rotate90(const ScalarField& f) {
  const Grid& g = f.grid();
  if (!g.square()) throw UnsupportedTransform("rotate90 requires a square grid");
  const int n = g.nx;
  ScalarField out(g);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) out(a, b) = f(b, n - 1 - a);
  return out;
}

VectorField rotate90(const VectorField& w) {
  require_same_grid(w.x, w.y);
  const Grid& g = w.grid();
  if (!g.square()) throw UnsupportedTransform("rotate90 requires a square grid");
  const int n = g.nx;
  VectorField out(g);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      out.x(a, b) = -w.y(b, n - 1 - a);
      out.y(a, b) = w.x(b, n - 1 - a);
    }
  }
  return out;
}

ScalarField translate(const ScalarField& f, int sx, int sy, Fill fill) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const int nx = g.nx, ny = g.ny;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int si = i - sx, sj = j - sy;
      if (fill == Fill::periodic) {
        si = ((si % nx) + nx) % nx;
        sj = ((sj % ny) + ny) % ny;
        out(i, j) = f(si, sj);
      } else {
        out(i, j) = (si >= 0 && si < nx && sj >= 0 && sj < ny) ? f(si, sj) : 0.0;
      }
    }
  }
  return out;
}

namespace {

inline double trap_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

}  // namespace

double integral(const ScalarField& f) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double wj = trap_weight(j, g.ny);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += trap_weight(i, g.nx) * f(i, j);
    sum += wj * row;
  }
  return sum * g.dx * g.dy;
}

double l2_norm(const ScalarField& f) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double wj = trap_weight(j, g.ny);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double v = f(i, j);
      row += trap_weight(i, g.nx) * v * v;
    }
    sum += wj * row;
  }
  return std::sqrt(sum * g.dx * g.dy);
}

double h1_energy(const ScalarField& u, const ScalarField& w) {
  require_same_grid(u, w);
  const Grid& g = u.grid();
  VectorField gu = gradient(u);
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double wj = trap_weight(j, g.ny);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double gx = gu.x(i, j), gy = gu.y(i, j), wv = w(i, j);
      row += trap_weight(i, g.nx) * (gx * gx + gy * gy + wv * wv);
    }
    sum += wj * row;
  }
  return std::sqrt(sum * g.dx * g.dy);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out = a;
  for (int k = 0; k < out.size(); ++k) out.at(k) += b.at(k);
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out = a;
  for (int k = 0; k < out.size(); ++k) out.at(k) -= b.at(k);
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out = a;
  for (int k = 0; k < out.size(); ++k) out.at(k) *= s;
  return out;
}

void axpy(double a, const ScalarField& x, ScalarField& y) {
  require_same_grid(x, y);
  for (int k = 0; k < y.size(); ++k) y.at(k) += a * x.at(k);
}

}  // namespace swnudge

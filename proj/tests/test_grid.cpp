#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "swnudge/errors.hpp"
#include "swnudge/field_io.hpp"
#include "swnudge/grid.hpp"

using namespace swnudge;

namespace {

template <class F>
ScalarField make_field(const Grid& g, F f) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (int k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f.at(k)));
  return m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.at(k) - b.at(k)));
  return m;
}

ScalarField random_field(const Grid& g, std::uint64_t seed, double center = 0.0,
                         double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  ScalarField f(g);
  for (int k = 0; k < f.size(); ++k) f.at(k) = center + d(rng);
  return f;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("construction enforces structural invariants") {
    CHECK_THROWS_AS(Grid(2, 5, 1.0, 1.0), InvalidGrid);
    CHECK_THROWS_AS(Grid(5, 2, 1.0, 1.0), InvalidGrid);
    CHECK_THROWS_AS(Grid(5, 5, 0.0, 1.0), InvalidGrid);
    CHECK_THROWS_AS(Grid(5, 5, 1.0, -1.0), InvalidGrid);

    const Grid g(4, 3, 0.5, 2.0);
    CHECK(g.size() == 12);
    CHECK(g.idx(1, 2) == 2 * 4 + 1);
    CHECK(g.lx() == 1.5);
    CHECK(g.ly() == 4.0);
    CHECK(!g.square());
    CHECK(Grid(5, 5, 2.0, 2.0).square());
  }

  TEST_CASE("gradient and divergence are exact on affine fields") {
    const Grid g(17, 13, 0.3, 0.7);
    const ScalarField f = make_field(g, [](double x, double y) { return 2.0 + 3.0 * x - 5.0 * y; });
    const VectorField grad = gradient(f);
    // Both the centred interior stencil and the one-sided wall closure
    // reproduce affine fields to round-off.
    for (int k = 0; k < f.size(); ++k) {
      CHECK(grad.x.at(k) == doctest::Approx(3.0).epsilon(1e-12));
      CHECK(grad.y.at(k) == doctest::Approx(-5.0).epsilon(1e-12));
    }

    VectorField w(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        w.x(i, j) = 1.0 + 2.0 * g.x(i);
        w.y(i, j) = 4.0 - 3.0 * g.y(j);
      }
    const ScalarField div = divergence(w);
    for (int k = 0; k < div.size(); ++k) CHECK(div.at(k) == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TEST_CASE("derivative stencils converge at second order") {
    const auto err_at = [](int n) {
      const Grid g(n, n, 1.0 / (n - 1), 1.0 / (n - 1));
      const ScalarField f =
          make_field(g, [](double x, double y) { return std::sin(3.0 * x) * std::cos(2.0 * y); });
      const VectorField grad = gradient(f);
      const ScalarField lap = laplacian(f);
      double eg = 0.0, el = 0.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double x = g.x(i), y = g.y(j);
          eg = std::max(eg, std::abs(grad.x(i, j) - 3.0 * std::cos(3.0 * x) * std::cos(2.0 * y)));
          eg = std::max(eg, std::abs(grad.y(i, j) + 2.0 * std::sin(3.0 * x) * std::sin(2.0 * y)));
          el = std::max(el, std::abs(lap(i, j) + 13.0 * std::sin(3.0 * x) * std::cos(2.0 * y)));
        }
      return std::pair{eg, el};
    };
    const auto [eg1, el1] = err_at(33);
    const auto [eg2, el2] = err_at(65);
    const double order_g = std::log2(eg1 / eg2);
    const double order_l = std::log2(el1 / el2);
    CHECK(order_g > 1.8);
    CHECK(order_g < 2.3);
    CHECK(order_l > 1.8);
    CHECK(order_l < 2.3);
  }

  TEST_CASE("laplacian matches gradient-of-divergence oracle on quadratics") {
    const Grid g(11, 9, 0.25, 0.5);
    const ScalarField f = make_field(
        g, [](double x, double y) { return x * x + 2.0 * y * y - x * y + x - 3.0; });
    const ScalarField lap = laplacian(f);
    for (int k = 0; k < lap.size(); ++k) CHECK(lap.at(k) == doctest::Approx(6.0).epsilon(1e-10));
  }

  TEST_CASE("no-flux divergence conserves mass against trapezoid weights") {
    const Grid g(23, 19, 0.4, 0.6);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField w(g);
    for (int k = 0; k < w.x.size(); ++k) w.x.at(k) = d(rng);
    for (int k = 0; k < w.y.size(); ++k) w.y.at(k) = d(rng);
    // The wall-normal components must vanish for the flux form to telescope.
    for (int j = 0; j < g.ny; ++j) w.x(0, j) = w.x(g.nx - 1, j) = 0.0;
    for (int i = 0; i < g.nx; ++i) w.y(i, 0) = w.y(i, g.ny - 1) = 0.0;

    const ScalarField div = divergence_noflux(w);
    CHECK(std::abs(integral(div)) < 1e-13 * g.size());
  }

  TEST_CASE("no-flux divergence agrees with the centred stencil in the interior") {
    const Grid g(15, 15, 0.5, 0.5);
    VectorField w(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        w.x(i, j) = std::sin(g.x(i)) * g.y(j);
        w.y(i, j) = std::cos(g.y(j)) + g.x(i);
      }
    const ScalarField a = divergence_noflux(w);
    const ScalarField b = divergence(w);
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) CHECK(a(i, j) == b(i, j));
  }

  TEST_CASE("quarter rotations compose to the identity bitwise") {
    const Grid g(12, 12, 0.5, 0.5);
    const ScalarField f = random_field(g, 3);
    const ScalarField r4 = rotate90(rotate90(rotate90(rotate90(f))));
    CHECK(max_abs_diff(f, r4) == 0.0);

    // Index map: the rotated field at (a, b) reads the source at (b, n-1-a).
    const ScalarField r = rotate90(f);
    CHECK(r(0, 0) == f(0, 11));
    CHECK(r(3, 5) == f(5, 12 - 1 - 3));

    CHECK_THROWS_AS(rotate90(random_field(Grid(5, 7, 1.0, 1.0), 1)), UnsupportedTransform);
  }

  TEST_CASE("vector rotation turns the components with the frame") {
    const Grid g(9, 9, 1.0, 1.0);
    VectorField w(g);
    for (int k = 0; k < w.x.size(); ++k) {
      w.x.at(k) = 2.0 + k;
      w.y.at(k) = -1.0 - k;
    }
    const VectorField r = rotate90(w);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        CHECK(r.x(i, j) == -w.y(j, g.nx - 1 - i));
        CHECK(r.y(i, j) == w.x(j, g.nx - 1 - i));
      }
  }

  TEST_CASE("translate shifts with the requested fill") {
    const Grid g(5, 4, 1.0, 1.0);
    ScalarField f(g);
    for (int k = 0; k < f.size(); ++k) f.at(k) = k + 1.0;

    const ScalarField z = translate(f, 2, 1, Fill::zero);
    CHECK(z(2, 1) == f(0, 0));
    CHECK(z(4, 3) == f(2, 2));
    CHECK(z(1, 2) == 0.0);   // source column is off the left edge
    CHECK(z(3, 0) == 0.0);   // source row is off the bottom edge

    const ScalarField p = translate(f, 2, 1, Fill::periodic);
    CHECK(p(2, 1) == f(0, 0));
    CHECK(p(0, 0) == f(3, 3));  // wraps both axes
  }

  TEST_CASE("trapezoid integral and norms match closed forms") {
    const Grid g(21, 31, 0.05, 0.1);
    const ScalarField c = make_field(g, [](double, double) { return 3.0; });
    CHECK(integral(c) == doctest::Approx(3.0 * g.lx() * g.ly()).epsilon(1e-13));
    CHECK(l2_norm(c) == doctest::Approx(3.0 * std::sqrt(g.lx() * g.ly())).epsilon(1e-13));

    // Linear-in-x integrand: trapezoid weights are exact for it.
    const ScalarField lin = make_field(g, [](double x, double) { return x; });
    CHECK(integral(lin) == doctest::Approx(0.5 * g.lx() * g.lx() * g.ly()).epsilon(1e-13));

    // H-norm of (u, w) with u linear: |grad u| = 2 everywhere exactly.
    const ScalarField u = make_field(g, [](double x, double y) { return 2.0 * x; });
    const ScalarField w = make_field(g, [](double, double) { return 1.0; });
    const double expect = std::sqrt(5.0 * g.lx() * g.ly());
    CHECK(h1_energy(u, w) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("field arithmetic and grid checks") {
    const Grid g(7, 7, 1.0, 1.0);
    const ScalarField a = random_field(g, 1), b = random_field(g, 2);
    const ScalarField s = a + b, d = a - b, m = 2.5 * a;
    for (int k = 0; k < a.size(); ++k) {
      CHECK(s.at(k) == a.at(k) + b.at(k));
      CHECK(d.at(k) == a.at(k) - b.at(k));
      CHECK(m.at(k) == 2.5 * a.at(k));
    }
    ScalarField y = b;
    axpy(-1.5, a, y);
    for (int k = 0; k < a.size(); ++k) CHECK(y.at(k) == b.at(k) - 1.5 * a.at(k));

    const ScalarField other = random_field(Grid(7, 8, 1.0, 1.0), 3);
    CHECK_THROWS_AS(require_same_grid(a, other), InvalidArgument);
  }

  TEST_CASE("snapshot format round-trips bit for bit") {
    const Grid g(6, 5, 0.25, 1.5);
    const ScalarField f = random_field(g, 42, 500.0, 3.0);
    std::stringstream buf;
    write_field(buf, f);
    const ScalarField back = read_field(buf);
    CHECK(back.grid() == g);
    CHECK(max_abs_diff(f, back) == 0.0);
  }

  TEST_CASE("snapshot reader rejects junk") {
    std::stringstream empty;
    CHECK_THROWS_AS(read_field(empty), IoError);

    std::stringstream bad("XXXXGARBAGEGARBAGEGARBAGE");
    CHECK_THROWS_AS(read_field(bad), IoError);

    // Valid header, truncated payload.
    const Grid g(4, 4, 1.0, 1.0);
    std::stringstream buf;
    write_field(buf, random_field(g, 5));
    std::string bytes = buf.str();
    bytes.resize(bytes.size() - 8);
    std::stringstream cut(bytes);
    CHECK_THROWS_AS(read_field(cut), IoError);

    CHECK_THROWS_AS(load_field("/nonexistent/file.swf"), IoError);
  }
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "swnudge/errors.hpp"
#include "swnudge/grid.hpp"
#include "swnudge/kernels.hpp"

using namespace swnudge;

namespace {

ScalarField random_field(const Grid& g, std::uint64_t seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  ScalarField f(g);
  for (int k = 0; k < f.size(); ++k) f.at(k) = d(rng);
  return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.at(k) - b.at(k)));
  return m;
}

// Direct double-loop reference with zero extension; independent of the
// orbit-ordered production path.
ScalarField convolve_reference(const DiscreteKernel& k, const ScalarField& f) {
  const Grid& g = f.grid();
  const int r = k.radius();
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      for (int b = -r; b <= r; ++b)
        for (int a = -r; a <= r; ++a) {
          const int ii = i - a, jj = j - b;
          if (ii >= 0 && ii < g.nx && jj >= 0 && jj < g.ny) acc += k.at(a, b) * f(ii, jj);
        }
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("gaussian stencil weights and symmetry") {
    const DiscreteKernel k = build_kernel({GaussianSpec{0.7, 2.5}, 4});
    CHECK(k.radius() == 4);
    CHECK(k.at(0, 0) == 2.5);
    CHECK(k.at(1, 2) == 2.5 * std::exp(-0.7 * 5.0));
    // Full dihedral symmetry holds bitwise: the weight depends on a*a + b*b.
    for (int b = 0; b <= 4; ++b)
      for (int a = 0; a <= 4; ++a) {
        const double w = k.at(a, b);
        CHECK(k.at(-a, b) == w);
        CHECK(k.at(a, -b) == w);
        CHECK(k.at(-a, -b) == w);
        CHECK(k.at(b, a) == w);
      }
  }

  TEST_CASE("kernel specs are validated") {
    CHECK_THROWS_AS(build_kernel({GaussianSpec{0.0, 1.0}, 10}), InvalidArgument);
    CHECK_THROWS_AS(build_kernel({GaussianSpec{-1.0, 1.0}, 10}), InvalidArgument);
    CHECK_THROWS_AS(build_kernel({GaussianSpec{1.0, -1.0}, 10}), InvalidArgument);
    CHECK_THROWS_AS(build_kernel({GaussianSpec{1.0, 1.0}, -1}), InvalidArgument);
    CHECK_THROWS_AS(build_kernel({DiracSpec{-2.0}, 0}), InvalidArgument);
    CHECK(KernelSpec{DiracSpec{1.0}, 0}.is_dirac());
    CHECK(!KernelSpec{GaussianSpec{1.0, 1.0}, 10}.is_dirac());
  }

  TEST_CASE("unit-gain mass approaches pi for the reference width") {
    // sum over Z^2 of exp(-(a^2+b^2)) = theta-function value 3.14224...,
    // within 0.03% of the continuum integral pi.
    const double mass = kernel_mass(build_kernel({GaussianSpec{1.0, 1.0}, 10}));
    CHECK(mass == doctest::Approx(3.14224).epsilon(1e-4));
    CHECK(mass == doctest::Approx(std::numbers::pi).epsilon(2e-3));

    // Truncation at radius 10 has already converged for alpha = 1.
    const double mass12 = kernel_mass(build_kernel({GaussianSpec{1.0, 1.0}, 12}));
    CHECK(mass == doctest::Approx(mass12).epsilon(1e-12));

    // General scaling: mass ~ beta * pi / alpha once the tail is covered.
    const double m2 = kernel_mass(build_kernel({GaussianSpec{0.5, 3.0}, 10}));
    CHECK(m2 == doctest::Approx(3.0 * std::numbers::pi / 0.5).epsilon(5e-3));
  }

  TEST_CASE("very narrow gaussian degenerates to a single cell") {
    const DiscreteKernel k = build_kernel({GaussianSpec{1000.0, 0.7}, 10});
    CHECK(k.at(0, 0) == 0.7);
    for (int b = -10; b <= 10; ++b)
      for (int a = -10; a <= 10; ++a)
        if (a != 0 || b != 0) CHECK(k.at(a, b) == 0.0);
    CHECK(kernel_mass(k) == 0.7);
  }

  TEST_CASE("dirac kernel scales the field bitwise") {
    const DiscreteKernel k = build_kernel({DiracSpec{5.0}, 10});
    CHECK(k.radius() == 0);
    const Grid g(9, 7, 1.0, 1.0);
    const ScalarField f = random_field(g, 11);
    const ScalarField c = convolve(k, f);
    for (int i = 0; i < f.size(); ++i) CHECK(c.at(i) == 5.0 * f.at(i));
  }

  TEST_CASE("convolution matches the direct reference sum") {
    const Grid g(19, 16, 1.0, 1.0);
    const ScalarField f = random_field(g, 21);
    for (const int r : {1, 3, 5}) {
      const DiscreteKernel k = build_kernel({GaussianSpec{0.3, 1.0}, r});
      const ScalarField a = convolve(k, f);
      const ScalarField b = convolve_reference(k, f);
      CHECK(max_abs_diff(a, b) < 1e-13);
    }
  }

  TEST_CASE("convolution is linear") {
    const Grid g(14, 14, 1.0, 1.0);
    const DiscreteKernel k = build_kernel({GaussianSpec{0.8, 1.3}, 3});
    const ScalarField f = random_field(g, 1), h = random_field(g, 2);
    const ScalarField lhs = convolve(k, 2.0 * f + h);
    const ScalarField rhs = 2.0 * convolve(k, f) + convolve(k, h);
    CHECK(max_abs_diff(lhs, rhs) < 1e-13);
  }

  TEST_CASE("impulse response reads back the stencil") {
    const Grid g(25, 25, 1.0, 1.0);
    const DiscreteKernel k = build_kernel({GaussianSpec{0.6, 0.9}, 5});
    ScalarField delta(g);
    delta(12, 12) = 1.0;
    const ScalarField resp = convolve(k, delta);
    double sum_sq = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int a = i - 12, b = j - 12;
        const double expect = (std::abs(a) <= 5 && std::abs(b) <= 5) ? k.at(a, b) : 0.0;
        CHECK(resp(i, j) == expect);
        sum_sq += resp(i, j) * resp(i, j);
      }
    double w2 = 0.0;
    for (double w : k.weights()) w2 += w * w;
    CHECK(sum_sq == doctest::Approx(w2).epsilon(1e-13));
  }

  TEST_CASE("white noise comes out with variance sum(w^2) sigma^2") {
    const Grid g(67, 67, 1.0, 1.0);
    const DiscreteKernel k = build_kernel({GaussianSpec{1.0, 1.0}, 10});
    double w2 = 0.0;
    for (double w : k.weights()) w2 += w * w;
    const double sigma = 0.35;

    // Cells at least 2r+1 apart have disjoint stencils, so their filtered
    // values are independent samples.
    const int cells[3] = {12, 33, 54};
    const int n_seeds = 300;
    std::vector<double> samples;
    samples.reserve(9 * n_seeds);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (int s = 0; s < n_seeds; ++s) {
      ScalarField noise(g);
      for (int i = 0; i < noise.size(); ++i) noise.at(i) = gauss(rng);
      const ScalarField c = convolve(k, noise);
      for (int cj : cells)
        for (int ci : cells) samples.push_back(c(ci, cj));
    }
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= samples.size();
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= (samples.size() - 1);
    // 2700 independent samples put the sample variance within ~2.7% (1 sigma)
    // of truth; 15% is a >5 sigma band and still catches any factor error.
    CHECK(var == doctest::Approx(w2 * sigma * sigma).epsilon(0.15));
  }

  TEST_CASE("convolution commutes with quarter rotations bitwise") {
    const Grid g(20, 20, 1.0, 1.0);
    const ScalarField f = random_field(g, 31);
    const DiscreteKernel k = build_kernel({GaussianSpec{0.9, 1.1}, 6});
    CHECK(max_abs_diff(rotate90(convolve(k, f)), convolve(k, rotate90(f))) == 0.0);
  }

  TEST_CASE("an asymmetric stencil keeps its own taps") {
    // One bumped tap: the convolution must not silently symmetrise it.
    std::vector<double> w(9, 0.0);
    w[4] = 1.0;      // centre
    w[5] = 0.25;     // (di, dj) = (1, 0)
    const DiscreteKernel k(1, w);
    const Grid g(8, 8, 1.0, 1.0);
    ScalarField delta(g);
    delta(4, 4) = 1.0;
    const ScalarField c = convolve(k, delta);
    CHECK(c(5, 4) == 0.25);  // out(x) = sum w(d) f(x - d) puts the tap at +x
    CHECK(c(3, 4) == 0.0);
    CHECK(c(4, 5) == 0.0);
    const double d = max_abs_diff(rotate90(convolve(k, random_field(g, 8))),
                                  convolve(k, rotate90(random_field(g, 8))));
    CHECK(d > 0.0);
  }

  TEST_CASE("interior translation equivariance") {
    const Grid g(31, 31, 1.0, 1.0);
    const DiscreteKernel k = build_kernel({GaussianSpec{1.0, 1.0}, 4});
    const ScalarField f = random_field(g, 17);
    const int sx = 3, sy = 2, r = 4;
    const ScalarField a = translate(convolve(k, f), sx, sy, Fill::zero);
    const ScalarField b = convolve(k, translate(f, sx, sy, Fill::zero));
    for (int j = r + sy; j < g.ny - r; ++j)
      for (int i = r + sx; i < g.nx - r; ++i) CHECK(a(i, j) == b(i, j));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rtlab/grids.hpp"
#include "rtlab/rng.hpp"

using namespace rtlab;
using namespace rtlab::grids;

namespace {

// independent root oracle: bisection on P4 over bracketing intervals
double legendre4(double x) {
  return (35.0 * x * x * x * x - 30.0 * x * x + 3.0) / 8.0;
}

double bisect_p4(double lo, double hi) {
  double flo = legendre4(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = legendre4(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("two-point rule has the closed form") {
  const auto q = gauss_legendre(2);
  CHECK(q.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(q.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(q.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("four-point nodes match the bisection oracle") {
  const auto q = gauss_legendre(4);
  const double r1 = bisect_p4(0.1, 0.6);
  const double r2 = bisect_p4(0.6, 0.99);
  CHECK(std::abs(q.nodes[2] - r1) < 1e-12);
  CHECK(std::abs(q.nodes[3] - r2) < 1e-12);
  CHECK(q.nodes[2] == doctest::Approx(0.33998104).epsilon(1e-7));
  CHECK(q.nodes[3] == doctest::Approx(0.86113631).epsilon(1e-7));
}

TEST_CASE("normalized measure: total one, mean zero, <v^2> = 1/3") {
  for (int n : {2, 4, 8, 16, 64, 128}) {
    const auto q = gauss_legendre(n);
    double w = 0.0, wv = 0.0, wv2 = 0.0;
    for (int j = 0; j < q.size(); ++j) {
      w += q.weights[j];
      wv += q.weights[j] * q.nodes[j];
      wv2 += q.weights[j] * q.nodes[j] * q.nodes[j];
    }
    CHECK(std::abs(w - 1.0) <= 1e-14);
    CHECK(std::abs(wv) <= 1e-14);
    CHECK(std::abs(wv2 - 1.0 / 3.0) <= 1e-12);
    for (int j = 0; j < q.size(); ++j) CHECK(q.nodes[j] != 0.0);
    for (int j = 1; j < q.size(); ++j) CHECK(q.nodes[j] > q.nodes[j - 1]);
  }
}

TEST_CASE("quadrature is exact for polynomials up to degree 2n-1") {
  for (int n : {2, 4, 8}) {
    const auto q = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int j = 0; j < q.size(); ++j) s += q.weights[j] * std::pow(q.nodes[j], deg);
      const double exact = (deg % 2 == 0) ? 1.0 / (deg + 1) : 0.0;  // (1/2) int_-1^1 v^deg
      CHECK(std::abs(s - exact) <= 1e-12);
    }
  }
}

TEST_CASE("invalid quadrature orders are rejected") {
  CHECK_THROWS_AS(gauss_legendre(3), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(130), std::invalid_argument);
}

TEST_CASE("collision on closed-form slices") {
  const auto q = gauss_legendre(2);
  SUBCASE("constants are in the null space") {
    std::vector<double> f(q.size(), 3.7);
    for (double v : collision_apply(f, q)) CHECK(std::abs(v) <= 1e-14);
  }
  SUBCASE("odd input: <f> = 0, L f = -f") {
    std::vector<double> f(q.nodes);
    const auto lf = collision_apply(f, q);
    for (int j = 0; j < q.size(); ++j) CHECK(lf[j] == doctest::Approx(-f[j]).epsilon(1e-14));
  }
  SUBCASE("v^2 input: L f = 1/3 - v^2") {
    std::vector<double> f(q.size());
    for (int j = 0; j < q.size(); ++j) f[j] = q.nodes[j] * q.nodes[j];
    const auto lf = collision_apply(f, q);
    for (int j = 0; j < q.size(); ++j)
      CHECK(lf[j] == doctest::Approx(1.0 / 3.0 - f[j]).epsilon(1e-14));
  }
}

TEST_CASE("mass conservation and null space over random slices") {
  const auto q = gauss_legendre(8);
  SplitMix64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> f(q.size());
    for (auto& v : f) v = rng.next_symmetric(10.0);
    const auto lf = collision_apply(f, q);
    double mean = 0.0;
    for (int j = 0; j < q.size(); ++j) mean += q.weights[j] * lf[j];
    CHECK(std::abs(mean) <= 1e-13);
  }
}

TEST_CASE("length mismatch is rejected") {
  const auto q = gauss_legendre(4);
  std::vector<double> f(3, 1.0);
  CHECK_THROWS_AS(collision_apply(f, q), std::invalid_argument);
}

TEST_CASE("slab grid validates its shape") {
  const SlabGrid g(10, 20, 2.0);
  CHECK(g.dx() * g.nx == doctest::Approx(1.0).epsilon(1e-16));
  CHECK(g.dt() * g.nt == doctest::Approx(2.0).epsilon(1e-16));
  CHECK_THROWS_AS(SlabGrid(3, 10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SlabGrid(10, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SlabGrid(10, 10, 0.0), std::invalid_argument);
}

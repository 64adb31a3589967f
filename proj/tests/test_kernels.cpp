#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rtlab/kernels.hpp"

using namespace rtlab;
using namespace rtlab::grids;
using namespace rtlab::transport;
using namespace rtlab::kernels;

namespace {

TransportProblem standard_problem(double kn = 0.2) {
  TransportProblem p;
  p.grid = SlabGrid(64, 64, 1.0);
  p.quad = gauss_legendre(8);
  p.kn = kn;
  p.optics = OpticalField::background(64, 1.0, 1.0);
  p.inflow = [](double t, Side s) { return s == Side::left ? t : 0.0; };
  return p;
}

std::vector<double> box_perturbation(const SlabGrid& g, double amp) {
  std::vector<double> tilde(g.nx, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.cell_center(i);
    if (x > 0.4 && x < 0.6) tilde[i] = amp;
  }
  return tilde;
}

}  // namespace

TEST_CASE("absorption kernel closed forms") {
  SlabGrid g(8, 8, 1.0);
  const auto q = gauss_legendre(4);
  AngularFlux f0(8, 8, 4), gz(8, 8, 4);
  for (auto& v : f0.data) v = 1.0;

  SUBCASE("zero adjoint gives the zero kernel") {
    const auto row = gamma_absorption(f0, gz, 0.3, g, q);
    for (double v : row.gamma) CHECK(v == 0.0);
  }
  SUBCASE("unit solutions over T = 1 give -kn") {
    AngularFlux g1(8, 8, 4);
    for (auto& v : g1.data) v = 1.0;
    const auto row = gamma_absorption(f0, g1, 0.3, g, q);
    for (double v : row.gamma) CHECK(v == doctest::Approx(-0.3).epsilon(1e-14));
  }
}

TEST_CASE("absorption kernel is nonpositive for nonnegative data") {
  auto p = standard_problem();
  const auto f0 = solve_forward(p);
  const auto g = solve_adjoint(p, {32, Side::right});
  const auto row = gamma_absorption(f0, g, p.kn, p.grid, p.quad);
  for (double v : row.gamma) CHECK(v <= 1e-15);
}

TEST_CASE("scattering kernel annihilates isotropic states") {
  auto p = standard_problem();
  const auto g = solve_adjoint(p, {32, Side::right});
  AngularFlux f0(p.grid.nt, p.grid.nx, p.quad.size());
  for (int k = 0; k <= p.grid.nt; ++k)
    for (int i = 0; i < p.grid.nx; ++i)
      for (int j = 0; j < p.quad.size(); ++j)
        f0.at(k, i, j) = std::sin(3.0 * p.grid.cell_center(i)) + 0.1 * k;
  const auto row = gamma_scattering(f0, g, p.kn, p.grid, p.quad);
  for (double v : row.gamma) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("scattering kernel on linear-in-v states, two nodes") {
  SlabGrid g(8, 8, 1.0);
  const auto q = gauss_legendre(2);
  AngularFlux f0(8, 8, 2), gg(8, 8, 2);
  std::vector<double> a(8), b(8), c(8), d(8);
  for (int i = 0; i < 8; ++i) {
    a[i] = 1.0 + 0.1 * i;
    b[i] = 0.5 - 0.05 * i;
    c[i] = 0.3 + 0.2 * i;
    d[i] = -0.4 + 0.07 * i;
  }
  for (int k = 0; k <= 8; ++k)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 2; ++j) {
        f0.at(k, i, j) = a[i] + b[i] * q.nodes[j];
        gg.at(k, i, j) = c[i] + d[i] * q.nodes[j];
      }
  const double kn = 0.25;
  const auto row = gamma_scattering(f0, gg, kn, g, q);
  for (int i = 0; i < 8; ++i)
    CHECK(row.gamma[i] == doctest::Approx(-(1.0 / kn) * b[i] * d[i] / 3.0).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
  SlabGrid g(8, 8, 1.0);
  const auto q = gauss_legendre(4);
  AngularFlux f0(8, 8, 4), gsmall(8, 6, 4);
  CHECK_THROWS_AS(gamma_absorption(f0, gsmall, 0.3, g, q), std::invalid_argument);
}

TEST_CASE("b data on closed forms and the frozen standard value") {
  auto p = standard_problem();
  const auto f0 = solve_forward(p);
  const auto m0 = outflow(f0, p.quad);
  SUBCASE("identical signals give zero") {
    CHECK(b_data(m0, m0, 32, Side::right) == 0.0);
  }
  SUBCASE("unperturbed re-solve stays below discretization noise") {
    const auto f1 = solve_forward(p);
    const auto m1 = outflow(f1, p.quad);
    CHECK(std::abs(b_data(m1, m0, 32, Side::right)) <= 1e-10);
  }
  SUBCASE("golden number for the box perturbation at kn = 0.2") {
    TransportProblem pp = p;
    pp.optics.sigma_a_tilde = box_perturbation(p.grid, 0.01);
    const auto fp = solve_forward(pp);
    const auto mp = outflow(fp, p.quad);
    CHECK(b_data(mp, m0, 32, Side::right) ==
          doctest::Approx(-1.3246089548197594e-06).epsilon(1e-9));
  }
}

TEST_CASE("duality identity") {
  auto p = standard_problem();
  SUBCASE("zero perturbation is degenerate") {
    const auto rep = duality_residual(p, std::vector<double>(64, 0.0), 32, Side::right);
    CHECK(rep.degenerate);
    CHECK(rep.residual == 0.0);
    CHECK(std::abs(rep.lhs) <= 1e-12);
    CHECK(std::abs(rep.rhs) <= 1e-12);
  }
  SUBCASE("residual is small and the mismatch is quadratic in the amplitude") {
    const auto rep1 = duality_residual(p, box_perturbation(p.grid, 0.01), 32, Side::right);
    CHECK(rep1.residual <= 0.1);
    const auto rep2 = duality_residual(p, box_perturbation(p.grid, 0.005), 32, Side::right);
    const double ratio = std::abs(rep1.lhs - rep1.rhs) / std::abs(rep2.lhs - rep2.rhs);
    CHECK(ratio >= 2.0);
    CHECK(ratio <= 6.0);
  }
  SUBCASE("oversized perturbations are refused") {
    CHECK_THROWS_AS(duality_residual(p, std::vector<double>(64, 0.2), 32, Side::right),
                    std::invalid_argument);
  }
}

TEST_CASE("scattering-variant duality holds too") {
  auto p = standard_problem();
  p.variant = Variant::scattering;
  p.optics = OpticalField::background(64, 2.0, 1.0);
  const auto rep = duality_residual(p, box_perturbation(p.grid, 0.1), 32, Side::right);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.residual <= 0.1);
}

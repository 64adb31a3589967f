#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rtlab/diffusion.hpp"
#include "rtlab/inversion.hpp"
#include "rtlab/transport.hpp"

using namespace rtlab;
using namespace rtlab::grids;
using namespace rtlab::diffusion;
using namespace rtlab::transport;

namespace {
const auto kZero = [](double) { return 0.0; };
const auto kOne = [](double) { return 1.0; };
}  // namespace

TEST_CASE("constant steady state is reached") {
  const int nx = 32;
  SlabGrid g(nx, 600, 30.0);  // t = 10/C with C = 1/3
  std::vector<double> ss(nx, 1.0), sa(nx, 0.0), r0(nx, 0.0);
  const auto rho = solve_heat(g, ss, sa, 1.0 / 3.0, r0, kOne, kOne);
  for (int i = 0; i < nx; ++i) CHECK(std::abs(rho.at(g.nt, i) - 1.0) <= 1e-6);
}

TEST_CASE("separated eigenmode decays at the exact rate, second order in dx") {
  for (int nx : {32, 64}) {
    SlabGrid g(nx, 2 * nx, 0.5);
    std::vector<double> ss(nx, 1.0), sa(nx, 0.0), r0(nx);
    for (int i = 0; i < nx; ++i) r0[i] = std::sin(M_PI * g.cell_center(i));
    const auto rho = solve_heat(g, ss, sa, 1.0 / 3.0, r0, kZero, kZero);
    double err = 0.0;
    for (int k = 0; k <= g.nt; ++k)
      for (int i = 0; i < nx; ++i) {
        const double exact =
            std::exp(-M_PI * M_PI / 3.0 * g.time_level(k)) * std::sin(M_PI * g.cell_center(i));
        err = std::max(err, std::abs(rho.at(k, i) - exact));
      }
    CHECK(err <= 0.5 / (static_cast<double>(nx) * nx));
  }
}

TEST_CASE("variable-coefficient solve matches a 4x-refined self-reference") {
  auto run = [](int nx) {
    SlabGrid g(nx, 2 * nx, 0.5);
    std::vector<double> ss(nx), sa(nx, 0.2), r0(nx, 0.0);
    for (int i = 0; i < nx; ++i) ss[i] = 1.0 + 0.5 * g.cell_center(i);
    auto bl = [](double t) { return std::min(1.0, 2.0 * t); };
    return solve_heat(g, ss, sa, 1.0 / 3.0, r0, bl, kZero);
  };
  const auto fine = run(256);
  for (int nx : {32, 64}) {
    const auto coarse = run(nx);
    const int rs = 256 / nx;
    double err = 0.0;
    for (int k = 0; k <= 2 * nx; ++k)
      for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        for (int q = 0; q < rs; ++q) s += fine.at(rs * k, rs * i + q);
        err = std::max(err, std::abs(coarse.at(k, i) - s / rs));
      }
    CHECK(err <= 4.0 / (static_cast<double>(nx) * nx));
  }
}

TEST_CASE("solver rejects non-positive scattering") {
  SlabGrid g(16, 16, 1.0);
  std::vector<double> ss(16, 1.0), sa(16, 0.0), r0(16, 0.0);
  ss[7] = 0.0;
  CHECK_THROWS_AS(solve_heat(g, ss, sa, 1.0 / 3.0, r0, kZero, kZero), std::invalid_argument);
}

TEST_CASE("limit error vanishes for an exactly consistent flux") {
  SlabGrid g(20, 8, 1.0);
  const auto q = gauss_legendre(8);
  DensityField rho(g.nt, g.nx);
  AngularFlux f(g.nt, g.nx, q.size());
  for (int k = 0; k <= g.nt; ++k)
    for (int i = 0; i < g.nx; ++i) {
      const double val = std::cos(g.time_level(k)) * (1.0 + g.cell_center(i));
      rho.at(k, i) = val;
      for (int j = 0; j < q.size(); ++j) f.at(k, i, j) = val;
    }
  CHECK(diffusion_limit_error(g, q, f, rho, 0.05, 2.0) <= 1e-14);

  // adding the velocity-odd interior corrector changes nothing: <v> = 0 exactly
  const double kn = 0.05;
  for (int k = 0; k <= g.nt; ++k)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < q.size(); ++j) f.at(k, i, j) -= kn * q.nodes[j] * 0.7;
  CHECK(diffusion_limit_error(g, q, f, rho, kn, 2.0) <= 1e-13);
}

TEST_CASE("empty masked interior is rejected") {
  SlabGrid g(16, 8, 1.0);
  const auto q = gauss_legendre(4);
  AngularFlux f(g.nt, g.nx, q.size());
  DensityField rho(g.nt, g.nx);
  CHECK_THROWS_AS(diffusion_limit_error(g, q, f, rho, 0.4, 5.0), std::invalid_argument);
}

namespace {

struct LimitPoint {
  double err = 0.0, odd_ratio = 0.0;
};

LimitPoint limit_point(double kn, int cells_per_mfp) {
  const int nx = static_cast<int>(std::lround(cells_per_mfp / kn));
  const int nt = 2 * nx;
  TransportProblem p;
  p.grid = SlabGrid(nx, nt, 1.0);
  p.quad = gauss_legendre(8);
  p.kn = kn;
  p.optics = OpticalField::background(nx, 1.0, 1.0);
  p.inflow = [](double t, Side s) { return s == Side::left ? std::min(t, 1.0) : 0.0; };
  const auto f = solve_forward(p);
  std::vector<double> ss(nx, 1.0), sa(nx, 1.0), r0(nx, 0.0);
  const auto rho = solve_heat(p.grid, ss, sa, 1.0 / 3.0, r0,
                              [](double t) { return std::min(t, 1.0); }, kZero);

  LimitPoint out;
  out.err = diffusion_limit_error(p.grid, p.quad, f, rho, kn, 0.3 / kn);
  double avg_err = 0.0, max_err = 0.0;
  for (int k = 0; k <= nt; ++k)
    for (int i = 0; i < nx; ++i) {
      const double x = p.grid.cell_center(i);
      if (x < 0.3 || x > 0.7) continue;
      double a = 0.0;
      for (int j = 0; j < 8; ++j) a += p.quad.weights[j] * f.at(k, i, j);
      avg_err = std::max(avg_err, std::abs(a - rho.at(k, i)));
      for (int j = 0; j < 8; ++j)
        max_err = std::max(max_err, std::abs(f.at(k, i, j) - rho.at(k, i)));
    }
  out.odd_ratio = avg_err / max_err;
  return out;
}

}  // namespace

TEST_CASE("golden number: masked limit error at kn = 0.1") {
  const int nx = 40, nt = 80;
  TransportProblem p;
  p.grid = SlabGrid(nx, nt, 1.0);
  p.quad = gauss_legendre(8);
  p.kn = 0.1;
  p.optics = OpticalField::background(nx, 1.0, 1.0);
  p.inflow = [](double t, Side s) { return s == Side::left ? std::min(t, 1.0) : 0.0; };
  const auto f = solve_forward(p);
  std::vector<double> ss(nx, 1.0), sa(nx, 1.0), r0(nx, 0.0);
  const auto rho = solve_heat(p.grid, ss, sa, 1.0 / 3.0, r0,
                              [](double t) { return std::min(t, 1.0); }, kZero);
  const double err = diffusion_limit_error(p.grid, p.quad, f, rho, 0.1, 3.0);
  CHECK(err == doctest::Approx(0.01011916337803993).epsilon(1e-9));
}

TEST_CASE("interior limit error decreases with slope >= 1 over the kn ladder") {
  std::vector<double> kns = {0.4, 0.2, 0.1, 0.05}, errs;
  for (double kn : kns) errs.push_back(limit_point(kn, 4).err);
  for (size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
  CHECK(inversion::loglog_slope(kns, errs) >= 1.0);
}

TEST_CASE("velocity-averaged defect is relatively smaller and improves with kn") {
  std::vector<double> ratios;
  for (double kn : {0.2, 0.1, 0.05}) ratios.push_back(limit_point(kn, 8).odd_ratio);
  CHECK(ratios[1] < ratios[0]);
  CHECK(ratios[2] < ratios[1]);
  CHECK(ratios[2] < 0.4);
}

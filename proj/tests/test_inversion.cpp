#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rtlab/inversion.hpp"
#include "rtlab/rng.hpp"

using namespace rtlab;
using namespace rtlab::inversion;
using rtlab::transport::Side;
using rtlab::transport::Variant;

TEST_CASE("svd closed forms") {
  SUBCASE("diagonal") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 2.0;
    A(1, 1) = 1.0;
    const auto dec = svd(A);
    CHECK(dec.sv[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dec.sv[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("rank-one outer product") {
    Eigen::VectorXd u(3), v(2);
    u << 1.0, -2.0, 2.0;
    v << 3.0, 4.0;
    const Eigen::MatrixXd A = u * v.transpose();
    const auto dec = svd(A);
    CHECK(dec.sv[0] == doctest::Approx(u.norm() * v.norm()).epsilon(1e-13));
    CHECK(dec.sv[1] <= 1e-13 * dec.sv[0]);
    // U stays orthonormal across the null direction
    CHECK((dec.U.transpose() * dec.U - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-10);
  }
}

TEST_CASE("svd invariants on random matrices") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + static_cast<int>(rng.next_u64() % 10);
    const int n = 2 + static_cast<int>(rng.next_u64() % 6);
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.next_symmetric(2.0);
    const auto dec = svd(A);
    const int r = static_cast<int>(dec.sv.size());
    CHECK(r == std::min(m, n));
    for (int j = 1; j < r; ++j) CHECK(dec.sv[j] <= dec.sv[j - 1]);
    const Eigen::MatrixXd R = dec.U * dec.sv.asDiagonal() * dec.V.transpose();
    CHECK((R - A).norm() <= 1e-10 * A.norm());
    CHECK((dec.U.transpose() * dec.U - Eigen::MatrixXd::Identity(r, r)).norm() <= 1e-10);
    CHECK((dec.V.transpose() * dec.V - Eigen::MatrixXd::Identity(r, r)).norm() <= 1e-10);
  }
}

TEST_CASE("assemble_system pairs exactly with the duality quadrature") {
  grids::SlabGrid g(16, 8, 1.0);
  kernels::KernelRow row;
  row.gamma.resize(16);
  for (int i = 0; i < 16; ++i) row.gamma[i] = std::sin(2.0 + i);
  row.meta.kn = 0.25;
  const Mask mask{0.2, 0.8, 3};
  const auto sys = assemble_system({row}, {0.0}, g, mask);
  CHECK(sys.A.rows() == 1);
  CHECK(sys.A.cols() == 3);
  // blockwise-constant sigma: A sigma == sum_i dx sigma_i gamma_i exactly
  Eigen::VectorXd sig(3);
  sig << 0.3, -0.1, 0.7;
  double direct = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int i = sys.column_cells[c].first; i < sys.column_cells[c].second; ++i)
      direct += g.dx() * sig[c] * row.gamma[i];
  CHECK((sys.A * sig)(0) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("assemble_system rejects bad input") {
  grids::SlabGrid g(16, 8, 1.0);
  CHECK_THROWS_AS(assemble_system({}, {}, g, Mask{}), std::invalid_argument);
  kernels::KernelRow r1, r2;
  r1.gamma.assign(16, 1.0);
  r2.gamma.assign(16, 1.0);
  r1.meta.kn = 0.2;
  r2.meta.kn = 0.1;
  CHECK_THROWS_AS(assemble_system({r1, r2}, {0.0, 0.0}, g, Mask{}), std::invalid_argument);
}

TEST_CASE("tikhonov solve behaviour") {
  KernelSystem sys;
  sys.A.resize(4, 2);
  sys.A << 1.0, 0.2, 0.1, 0.9, 0.4, 0.3, 0.2, 0.1;
  Eigen::VectorXd truth(2);
  truth << 0.7, -0.4;
  sys.b = sys.A * truth;

  SUBCASE("exact least squares at lambda = 0") {
    const auto shat = tikhonov_solve(sys, 0.0);
    CHECK((shat - truth).norm() <= 1e-8);
  }
  SUBCASE("solution vanishes as lambda grows") {
    const auto shat = tikhonov_solve(sys, 1e6);
    CHECK(shat.norm() <= 1e-9);
  }
  SUBCASE("norm is nonincreasing and residual nondecreasing in lambda") {
    double prev_norm = std::numeric_limits<double>::infinity();
    double prev_res = -1.0;
    for (double lam : {0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const auto shat = tikhonov_solve(sys, lam);
      const double nrm = shat.norm();
      const double res = (sys.A * shat - sys.b).norm();
      CHECK(nrm <= prev_norm + 1e-13);
      CHECK(res >= prev_res - 1e-13);
      prev_norm = nrm;
      prev_res = res;
    }
  }
  SUBCASE("rank deficiency refuses lambda = 0") {
    sys.A.col(1) = 2.0 * sys.A.col(0);
    CHECK_THROWS_AS(tikhonov_solve(sys, 0.0), std::invalid_argument);
  }
}

TEST_CASE("distinguishability formulas") {
  SvdResult dec;
  dec.sv.resize(2);
  dec.sv << 2.0, 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Ones(2);
  CHECK(distinguishability(dec, b, 0.1, KappaMode::worst_b) ==
        doctest::Approx(0.2).epsilon(1e-15));
  CHECK(distinguishability(dec, b, 0.1, KappaMode::fixed_b) ==
        doctest::Approx(0.1).epsilon(1e-15));

  SvdResult iso;
  iso.sv = Eigen::VectorXd::Ones(5);
  CHECK(distinguishability(iso, b, 1e-3, KappaMode::fixed_b) ==
        doctest::Approx(1e-3).epsilon(1e-15));

  SvdResult degenerate;
  degenerate.sv.resize(2);
  degenerate.sv << 1.0, 0.0;
  CHECK(std::isinf(distinguishability(degenerate, b, 1e-3, KappaMode::fixed_b)));
}

TEST_CASE("kappa and tikhonov are invariant under joint scaling") {
  KernelSystem sys;
  sys.A.resize(3, 2);
  sys.A << 1.0, 0.2, 0.1, 0.9, 0.4, 0.3;
  Eigen::VectorXd truth(2);
  truth << 0.5, 0.25;
  sys.b = sys.A * truth;

  KernelSystem scaled = sys;
  scaled.A *= 7.5;
  scaled.b *= 7.5;

  const auto s1 = tikhonov_solve(sys, 1e-2);
  const auto s2 = tikhonov_solve(scaled, 7.5e-2);
  CHECK((s1 - s2).norm() <= 1e-12);

  const auto d1 = svd(sys.A);
  const auto d2 = svd(scaled.A);
  CHECK(distinguishability(d1, sys.b, 1e-3, KappaMode::worst_b) ==
        doctest::Approx(distinguishability(d2, scaled.b, 1e-3, KappaMode::worst_b))
            .epsilon(1e-12));
}

TEST_CASE("standard suite: shape, frozen lambda_min, and kn halving") {
  const auto cfg = SuiteConfig::absorption_default();
  const auto s02 = build_suite(cfg, 0.2);
  const auto sys02 = assemble_system(s02.rows, s02.b, s02.grid, cfg.mask);
  CHECK(sys02.A.rows() == 36);  // 3 inflows x 2 sides x 3 taus x 2 measure sides
  CHECK(sys02.A.cols() == 5);
  const auto dec02 = svd(sys02.A);
  CHECK(dec02.lambda_min() == doctest::Approx(1.0004225403593066e-05).epsilon(1e-6));

  const auto s01 = build_suite(cfg, 0.1);
  const auto sys01 = assemble_system(s01.rows, s01.b, s01.grid, cfg.mask);
  const auto dec01 = svd(sys01.A);
  const double ratio = dec01.lambda_min() / dec02.lambda_min();
  CHECK(ratio >= 0.35);  // halves within 30%
  CHECK(ratio <= 0.65);
}

TEST_CASE("kn sweep: degradation laws for both variants") {
  SweepOptions opt;
  opt.threads = 4;
  SUBCASE("absorption") {
    const auto t = kn_sweep(SuiteConfig::absorption_default(), opt);
    CHECK(t.slopes_defined);
    CHECK(t.gamma_slope >= 0.8);
    CHECK(t.gamma_slope <= 1.2);
    CHECK(t.kappa_slope >= -1.3);
    CHECK(t.kappa_slope <= -0.7);
    CHECK(t.rows[3].tik_err / t.rows[0].tik_err >= 3.0);
    // halving kn halves the kernel amplitude within 25%
    const double halving = t.rows[2].max_gamma / t.rows[1].max_gamma;
    CHECK(halving >= 0.375);
    CHECK(halving <= 0.625);
    // kappa * kn / delta pinned between positive constants across the sweep
    double lo = 1e300, hi = 0.0;
    for (const auto& r : t.rows) {
      lo = std::min(lo, r.kappa * r.kn / opt.delta);
      hi = std::max(hi, r.kappa * r.kn / opt.delta);
    }
    CHECK(hi / lo <= 3.0);
  }
  SUBCASE("scattering") {
    const auto t = kn_sweep(SuiteConfig::scattering_default(), opt);
    CHECK(t.gamma_slope >= 0.8);
    CHECK(t.gamma_slope <= 1.2);
    CHECK(t.kappa_slope >= -1.3);
    CHECK(t.kappa_slope <= -0.7);
  }
  SUBCASE("single point leaves slopes undefined") {
    SweepOptions one = opt;
    one.kn_list = {0.2};
    const auto t = kn_sweep(SuiteConfig::absorption_default(), one);
    CHECK_FALSE(t.slopes_defined);
    CHECK(t.rows.size() == 1);
  }
  SUBCASE("resolution guard propagates") {
    SweepOptions bad = opt;
    bad.kn_list = {0.4, 0.01};
    CHECK_THROWS_AS(kn_sweep(SuiteConfig::absorption_default(), bad), std::invalid_argument);
  }
}

TEST_CASE("parallel and serial sweeps agree bitwise") {
  SweepOptions serial;
  serial.threads = 1;
  serial.kn_list = {0.4, 0.2};
  SweepOptions parallel = serial;
  parallel.threads = 2;
  const auto a = kn_sweep(SuiteConfig::absorption_default(), serial);
  const auto b = kn_sweep(SuiteConfig::absorption_default(), parallel);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].max_gamma == b.rows[i].max_gamma);
    CHECK(a.rows[i].lambda_min == b.rows[i].lambda_min);
    CHECK(a.rows[i].tik_err == b.rows[i].tik_err);
  }
}

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rtlab/grids.hpp"
#include "rtlab/kernels.hpp"
#include "rtlab/transport.hpp"

namespace rtlab::inversion {

// Reconstruction support: gamma rows are restricted to the window (lo, hi) and
// sigma_tilde is parametrized on `blocks` equal cell groups of that window
// (blocks == 0 keeps one column per interior cell).
struct Mask {
  double lo = 0.2;
  double hi = 0.8;
  int blocks = 5;
};

struct KernelSystem {
  Eigen::MatrixXd A;  // rows = experiments, cols = reconstruction cells
  Eigen::VectorXd b;
  std::vector<kernels::ExperimentMeta> meta;
  std::vector<std::pair<int, int>> column_cells;  // fine-cell [begin,end) per column
  double dx = 0.0;
};

KernelSystem assemble_system(const std::vector<kernels::KernelRow>& rows,
                             const std::vector<double>& data, const grids::SlabGrid& grid,
                             const Mask& mask);

struct SvdResult {
  Eigen::MatrixXd U, V;
  Eigen::VectorXd sv;  // nonincreasing, >= 0
  double lambda_min() const { return sv[sv.size() - 1]; }
  double lambda_max() const { return sv[0]; }
};

// One-sided Jacobi; chosen for relative accuracy of the small singular values
// the degradation law is read from.
SvdResult svd(const Eigen::MatrixXd& A);

// argmin ||A s - b||^2 + lambda_reg^2 ||s||^2 via SVD filter factors.
Eigen::VectorXd tikhonov_solve(const KernelSystem& sys, double lambda_reg);

enum class KappaMode { fixed_b, worst_b };

// kappa_A = delta/lambda_N (fixed_b) or delta*lambda_1/lambda_N (worst_b);
// returns +inf when lambda_N == 0.
double distinguishability(const SvdResult& svd, const Eigen::VectorXd& b, double delta,
                          KappaMode mode);

// ---- experiment suite -----------------------------------------------------

// Inflow profile ids: 0 ramp min(2t,1), 1 bump sin^2(pi t) on [0,1],
// 2 step at t=0.25, 3 constant.
double inflow_profile(int id, double t);

struct SuiteConfig {
  transport::Variant variant = transport::Variant::absorption;
  int nx = 80, nt = 160, nv = 8;
  double T = 4.0;
  double sigma_s0 = 1.0, sigma_a0 = 0.05;  // backgrounds; the variant pins the other field
  std::vector<double> tau_fracs = {0.45, 0.65, 0.9};
  std::vector<int> profile_ids = {0, 1, 2};
  Mask mask;
  // synthetic truth: blockwise-constant bump, zero outside the window
  double sig_amp = 0.02, sig_center = 0.55, sig_width = 0.12;

  static SuiteConfig absorption_default();
  static SuiteConfig scattering_default();
};

struct BuiltSuite {
  std::vector<kernels::KernelRow> rows;
  std::vector<double> b;
  grids::SlabGrid grid;
  grids::VelocityQuadrature quad;
  Eigen::VectorXd sigma_true;  // coarse truth (one value per column)
  std::vector<double> sigma_fine;
};

// Runs all background/perturbed/adjoint solves for one kn and assembles the
// gamma rows and measured-minus-background data.
BuiltSuite build_suite(const SuiteConfig& cfg, double kn);

// ---- kn sweep ---------------------------------------------------------------

struct SweepRow {
  double kn = 0.0;
  double max_gamma = 0.0;  // over rows and masked cells
  double lambda1 = 0.0, lambda_min = 0.0;
  double kappa = 0.0;
  double tik_err = 0.0;  // median relative reconstruction error over noise draws
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool slopes_defined = false;
  double gamma_slope = 0.0;  // log max|gamma| vs log kn
  double kappa_slope = 0.0;  // log kappa vs log kn
};

struct SweepOptions {
  std::vector<double> kn_list = {0.4, 0.2, 0.1, 0.05};
  double delta = 1e-3;
  double lambda_reg = 0.0;
  int noise_draws = 20;
  std::uint64_t seed = 12345;
  int threads = 1;
};

SweepTable kn_sweep(const SuiteConfig& cfg, const SweepOptions& opt);

// least-squares slope of log y vs log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rtlab::inversion

#include "rtlab/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "rtlab/errors.hpp"
#include "rtlab/rng.hpp"

namespace rtlab::inversion {

using transport::Side;
using transport::Variant;

KernelSystem assemble_system(const std::vector<kernels::KernelRow>& rows,
                             const std::vector<double>& data, const grids::SlabGrid& grid,
                             const Mask& mask) {
  if (rows.empty()) throw std::invalid_argument("assemble_system: no kernel rows");
  if (rows.size() != data.size())
    throw std::invalid_argument("assemble_system: rows and data lengths disagree");
  const double kn = rows.front().meta.kn;
  for (const auto& r : rows) {
    if (static_cast<int>(r.gamma.size()) != grid.nx)
      throw std::invalid_argument("assemble_system: row length != grid.nx");
    if (r.meta.kn != kn)
      throw std::invalid_argument("assemble_system: rows mix different kn");
  }
  if (!(mask.lo < mask.hi))
    throw std::invalid_argument("assemble_system: mask window is empty");

  std::vector<int> cells;
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.cell_center(i);
    if (x > mask.lo && x < mask.hi) cells.push_back(i);
  }
  if (cells.empty()) throw std::invalid_argument("assemble_system: no interior cells");

  const int ncols = mask.blocks > 0 ? mask.blocks : static_cast<int>(cells.size());
  if (ncols > static_cast<int>(cells.size()))
    throw std::invalid_argument("assemble_system: more blocks than interior cells");

  KernelSystem sys;
  sys.dx = grid.dx();
  sys.column_cells.resize(ncols);
  const int base = static_cast<int>(cells.size()) / ncols;
  const int extra = static_cast<int>(cells.size()) % ncols;
  int pos = 0;
  for (int c = 0; c < ncols; ++c) {
    const int len = base + (c < extra ? 1 : 0);
    sys.column_cells[c] = {cells[pos], cells[pos] + len};
    pos += len;
  }

  sys.A.resize(static_cast<Eigen::Index>(rows.size()), ncols);
  sys.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < ncols; ++c) {
      double s = 0.0;
      for (int i = sys.column_cells[c].first; i < sys.column_cells[c].second; ++i)
        s += rows[r].gamma[i];
      sys.A(static_cast<Eigen::Index>(r), c) = s * grid.dx();
    }
    sys.b[static_cast<Eigen::Index>(r)] = data[r];
    sys.meta.push_back(rows[r].meta);
  }
  return sys;
}

SvdResult svd(const Eigen::MatrixXd& A) {
  if (!A.allFinite()) throw std::invalid_argument("svd: matrix has non-finite entries");
  const bool transposed = A.rows() < A.cols();
  Eigen::MatrixXd W = transposed ? A.transpose() : A;
  const Eigen::Index m = W.rows(), n = W.cols();

  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  const double tol = 1e-15;
  bool converged = false;
  for (int sweep = 0; sweep < 64 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double app = W.col(p).squaredNorm();
        const double aqq = W.col(q).squaredNorm();
        const double apq = W.col(p).dot(W.col(q));
        if (apq * apq <= tol * tol * app * aqq) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < m; ++r) {
          const double wp = W(r, p), wq = W(r, q);
          W(r, p) = c * wp - s * wq;
          W(r, q) = s * wp + c * wq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vp = V(r, p), vq = V(r, q);
          V(r, p) = c * vp - s * vq;
          V(r, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) throw numerical_breakdown("svd: one-sided Jacobi did not converge");

  Eigen::VectorXd sv(n);
  Eigen::MatrixXd U(m, n);
  for (Eigen::Index j = 0; j < n; ++j) sv[j] = W.col(j).norm();

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index j = 0; j < n; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sv[a] > sv[b]; });

  Eigen::VectorXd sv_sorted(n);
  Eigen::MatrixXd V_sorted(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sv_sorted[j] = sv[order[j]];
    V_sorted.col(j) = V.col(order[j]);
    if (sv[order[j]] > 0.0)
      U.col(j) = W.col(order[j]) / sv[order[j]];
    else
      U.col(j).setZero();
  }
  // complete U columns for exactly-zero singular values so U stays orthonormal
  for (Eigen::Index j = 0; j < n; ++j) {
    if (U.col(j).norm() > 0.5) continue;
    for (Eigen::Index cand = 0; cand < m; ++cand) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
      e[cand] = 1.0;
      for (Eigen::Index l = 0; l < n; ++l)
        if (l != j && U.col(l).norm() > 0.5) e -= U.col(l).dot(e) * U.col(l);
      if (e.norm() > 1e-3) {
        U.col(j) = e / e.norm();
        break;
      }
    }
  }

  SvdResult out;
  out.sv = sv_sorted;
  if (transposed) {
    out.U = V_sorted;
    out.V = U;
  } else {
    out.U = U;
    out.V = V_sorted;
  }
  return out;
}

Eigen::VectorXd tikhonov_solve(const KernelSystem& sys, double lambda_reg) {
  if (lambda_reg < 0.0) throw std::invalid_argument("tikhonov_solve: lambda_reg < 0");
  const SvdResult dec = svd(sys.A);
  const Eigen::Index r = dec.sv.size();
  if (lambda_reg == 0.0) {
    if (sys.A.rows() < sys.A.cols() || dec.sv[r - 1] <= 1e-12 * dec.sv[0])
      throw std::invalid_argument(
          "tikhonov_solve: lambda_reg = 0 requires full column rank");
  }
  Eigen::VectorXd shat = Eigen::VectorXd::Zero(sys.A.cols());
  for (Eigen::Index j = 0; j < r; ++j) {
    const double lam = dec.sv[j];
    if (lam == 0.0) continue;
    const double filt = lam / (lam * lam + lambda_reg * lambda_reg);
    shat += filt * dec.U.col(j).dot(sys.b) * dec.V.col(j);
  }
  return shat;
}

double distinguishability(const SvdResult& dec, const Eigen::VectorXd& /*b*/, double delta,
                          KappaMode mode) {
  const double lamN = dec.lambda_min();
  if (lamN <= 0.0) return std::numeric_limits<double>::infinity();
  return mode == KappaMode::fixed_b ? delta / lamN : delta * dec.lambda_max() / lamN;
}

double inflow_profile(int id, double t) {
  switch (id) {
    case 0: return std::min(2.0 * t, 1.0);
    case 1: return t < 1.0 ? std::sin(M_PI * t) * std::sin(M_PI * t) : 0.0;
    case 2: return t >= 0.25 ? 1.0 : 0.0;
    case 3: return 1.0;
    default: throw std::invalid_argument("inflow_profile: unknown id");
  }
}

SuiteConfig SuiteConfig::absorption_default() {
  SuiteConfig c;
  c.variant = Variant::absorption;
  c.T = 4.0;
  c.sigma_s0 = 1.0;
  c.sigma_a0 = 0.05;
  c.tau_fracs = {0.45, 0.65, 0.9};
  c.mask = {0.2, 0.8, 5};
  c.sig_amp = 0.02;
  return c;
}

SuiteConfig SuiteConfig::scattering_default() {
  SuiteConfig c;
  c.variant = Variant::scattering;
  c.T = 2.0;
  c.sigma_s0 = 5.0;
  c.sigma_a0 = 1.0;
  c.tau_fracs = {0.6, 0.8, 0.95};
  c.mask = {0.25, 0.75, 5};
  c.sig_amp = 0.5;
  return c;
}

BuiltSuite build_suite(const SuiteConfig& cfg, double kn) {
  BuiltSuite out;
  out.grid = grids::SlabGrid(cfg.nx, cfg.nt, cfg.T);
  out.quad = grids::gauss_legendre(cfg.nv);

  const bool is_abs = cfg.variant == Variant::absorption;
  transport::TransportProblem bg;
  bg.grid = out.grid;
  bg.quad = out.quad;
  bg.kn = kn;
  bg.variant = cfg.variant;
  bg.optics = transport::OpticalField::background(cfg.nx, is_abs ? 1.0 : cfg.sigma_s0,
                                                  is_abs ? cfg.sigma_a0 : 1.0);

  // blockwise-constant sigma_tilde supported inside the mask window
  KernelSystem probe;  // just to reuse the column partition
  {
    kernels::KernelRow dummy;
    dummy.gamma.assign(cfg.nx, 0.0);
    dummy.meta.kn = kn;
    probe = assemble_system({dummy}, {0.0}, out.grid, cfg.mask);
  }
  const int ncols = static_cast<int>(probe.column_cells.size());
  out.sigma_true.resize(ncols);
  out.sigma_fine.assign(cfg.nx, 0.0);
  for (int c = 0; c < ncols; ++c) {
    const auto [b0, b1] = probe.column_cells[c];
    double xc = 0.0;
    for (int i = b0; i < b1; ++i) xc += out.grid.cell_center(i);
    xc /= (b1 - b0);
    const double u = (xc - cfg.sig_center) / cfg.sig_width;
    out.sigma_true[c] = cfg.sig_amp * std::exp(-u * u);
    for (int i = b0; i < b1; ++i) out.sigma_fine[i] = out.sigma_true[c];
  }

  transport::TransportProblem pert = bg;
  {
    auto& tilde = is_abs ? pert.optics.sigma_a_tilde : pert.optics.sigma_s_tilde;
    for (int i = 0; i < cfg.nx; ++i) tilde[i] = out.sigma_fine[i];
  }

  std::vector<int> taus;
  for (double f : cfg.tau_fracs) taus.push_back(static_cast<int>(std::lround(f * cfg.nt)));

  std::vector<transport::AngularFlux> adjoints;
  std::vector<std::pair<int, Side>> tau_side;
  for (int kt : taus)
    for (Side sd : {Side::left, Side::right}) {
      adjoints.push_back(transport::solve_adjoint(bg, {kt, sd}));
      tau_side.emplace_back(kt, sd);
    }

  for (int pid : cfg.profile_ids) {
    for (Side in_side : {Side::left, Side::right}) {
      auto inflow = [pid, in_side](double t, Side s) {
        return s == in_side ? inflow_profile(pid, t) : 0.0;
      };
      transport::TransportProblem b0 = bg;
      b0.inflow = inflow;
      transport::TransportProblem p0 = pert;
      p0.inflow = inflow;
      const auto f0 = transport::solve_forward(b0);
      const auto fp = transport::solve_forward(p0);
      const auto m0 = transport::outflow(f0, out.quad);
      const auto mp = transport::outflow(fp, out.quad);
      for (size_t a = 0; a < adjoints.size(); ++a) {
        const auto [kt, sd] = tau_side[a];
        kernels::KernelRow row =
            is_abs ? kernels::gamma_absorption(f0, adjoints[a], kn, out.grid, out.quad)
                   : kernels::gamma_scattering(f0, adjoints[a], kn, out.grid, out.quad);
        row.meta.tau_index = kt;
        row.meta.measure_side = sd;
        row.meta.inflow_id = pid;
        row.meta.inflow_side = in_side;
        out.rows.push_back(std::move(row));
        out.b.push_back(kernels::b_data(mp, m0, kt, sd));
      }
    }
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SweepRow sweep_point(const SuiteConfig& cfg, double kn, const SweepOptions& opt) {
  BuiltSuite suite = build_suite(cfg, kn);
  KernelSystem sys = assemble_system(suite.rows, suite.b, suite.grid, cfg.mask);

  SweepRow row;
  row.kn = kn;
  for (const auto& kr : suite.rows)
    for (const auto& [b0, b1] : sys.column_cells)
      for (int i = b0; i < b1; ++i) row.max_gamma = std::max(row.max_gamma, std::abs(kr.gamma[i]));

  const SvdResult dec = svd(sys.A);
  row.lambda1 = dec.lambda_max();
  row.lambda_min = dec.lambda_min();
  row.kappa = distinguishability(dec, sys.b, opt.delta, KappaMode::fixed_b);

  std::vector<double> errs;
  const double true_norm = suite.sigma_true.norm();
  for (int d = 0; d < opt.noise_draws; ++d) {
    SplitMix64 rng(mix_seed(opt.seed, static_cast<std::uint64_t>(d)));
    KernelSystem noisy = sys;
    for (Eigen::Index r = 0; r < noisy.b.size(); ++r)
      noisy.b[r] += rng.next_symmetric(opt.delta);
    const Eigen::VectorXd shat = tikhonov_solve(noisy, opt.lambda_reg);
    errs.push_back((shat - suite.sigma_true).norm() / true_norm);
  }
  row.tik_err = median(errs);
  return row;
}

}  // namespace

SweepTable kn_sweep(const SuiteConfig& cfg, const SweepOptions& opt) {
  for (double kn : opt.kn_list)
    if (1.0 / cfg.nx > kn / 4.0 + 1e-15)
      throw std::invalid_argument("kn_sweep: resolution guard dx <= kn/4 fails at kn=" +
                                  std::to_string(kn));

  SweepTable table;
  table.rows.resize(opt.kn_list.size());
  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    for (size_t i = 0; i < opt.kn_list.size(); ++i)
      table.rows[i] = sweep_point(cfg, opt.kn_list[i], opt);
  } else {
    std::vector<std::future<SweepRow>> futs(opt.kn_list.size());
    for (size_t i = 0; i < opt.kn_list.size(); ++i)
      futs[i] = std::async(std::launch::async, sweep_point, std::cref(cfg), opt.kn_list[i],
                           std::cref(opt));
    for (size_t i = 0; i < opt.kn_list.size(); ++i) table.rows[i] = futs[i].get();
  }

  if (table.rows.size() >= 2) {
    std::vector<double> kns, gammas, kappas;
    for (const auto& r : table.rows) {
      kns.push_back(r.kn);
      gammas.push_back(r.max_gamma);
      kappas.push_back(r.kappa);
    }
    table.gamma_slope = loglog_slope(kns, gammas);
    table.kappa_slope = loglog_slope(kns, kappas);
    table.slopes_defined = true;
  }
  return table;
}

}  // namespace rtlab::inversion

#include "rtlab/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace rtlab::diffusion {

namespace {

// Thomas solve of a tridiagonal system; diag/lower/upper are overwritten.
void tridiag_solve(std::vector<double>& lower, std::vector<double>& diag,
                   std::vector<double>& upper, std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

DensityField solve_heat(const grids::SlabGrid& grid, const std::vector<double>& sigma_s,
                        const std::vector<double>& sigma_a, double C,
                        const std::vector<double>& rho0, const BoundaryFn& left,
                        const BoundaryFn& right) {
  const int nx = grid.nx, nt = grid.nt;
  if (static_cast<int>(sigma_s.size()) != nx || static_cast<int>(sigma_a.size()) != nx)
    throw std::invalid_argument("solve_heat: coefficient sizes != nx");
  if (static_cast<int>(rho0.size()) != nx)
    throw std::invalid_argument("solve_heat: initial data size != nx");
  if (!(C > 0.0)) throw std::invalid_argument("solve_heat: C must be positive");
  for (double s : sigma_s)
    if (!(s > 0.0)) throw std::invalid_argument("solve_heat: sigma_s must be positive");

  const double dx = grid.dx(), dt = grid.dt();

  // face coefficients of D = 1/sigma_s: harmonic mean inside, cell value at walls
  std::vector<double> Dface(nx + 1);
  for (int i = 1; i < nx; ++i) Dface[i] = 2.0 / (sigma_s[i - 1] + sigma_s[i]);
  Dface[0] = 1.0 / sigma_s[0];
  Dface[nx] = 1.0 / sigma_s[nx - 1];

  // K rho = -C d/dx(D d rho/dx) + sigma_a rho, with the Dirichlet parts split off.
  std::vector<double> kl(nx, 0.0), kd(nx, 0.0), ku(nx, 0.0);
  const double c2 = C / (dx * dx);
  for (int i = 0; i < nx; ++i) {
    if (i > 0) {
      kd[i] += c2 * Dface[i];
      kl[i] -= c2 * Dface[i];
    } else {
      kd[i] += 2.0 * c2 * Dface[0];
    }
    if (i < nx - 1) {
      kd[i] += c2 * Dface[i + 1];
      ku[i] -= c2 * Dface[i + 1];
    } else {
      kd[i] += 2.0 * c2 * Dface[nx];
    }
    kd[i] += sigma_a[i];
  }
  auto bc_vec = [&](double t, std::vector<double>& out) {
    out.assign(nx, 0.0);
    out[0] = 2.0 * c2 * Dface[0] * left(t);
    out[nx - 1] = 2.0 * c2 * Dface[nx] * right(t);
  };

  DensityField rho(nt, nx);
  for (int i = 0; i < nx; ++i) rho.at(0, i) = rho0[i];

  std::vector<double> bc0(nx), bc1(nx), rhs(nx), dl(nx), dd(nx), du(nx);
  for (int k = 0; k < nt; ++k) {
    bc_vec(grid.time_level(k), bc0);
    bc_vec(grid.time_level(k + 1), bc1);
    for (int i = 0; i < nx; ++i) {
      double Kr = kd[i] * rho.at(k, i);
      if (i > 0) Kr += kl[i] * rho.at(k, i - 1);
      if (i < nx - 1) Kr += ku[i] * rho.at(k, i + 1);
      rhs[i] = rho.at(k, i) - 0.5 * dt * Kr + 0.5 * dt * (bc0[i] + bc1[i]);
      dl[i] = 0.5 * dt * kl[i];
      dd[i] = 1.0 + 0.5 * dt * kd[i];
      du[i] = 0.5 * dt * ku[i];
    }
    tridiag_solve(dl, dd, du, rhs);
    for (int i = 0; i < nx; ++i) rho.at(k + 1, i) = rhs[i];
  }
  return rho;
}

double diffusion_limit_error(const grids::SlabGrid& grid, const grids::VelocityQuadrature& quad,
                             const transport::AngularFlux& f, const DensityField& rho,
                             double kn, double layer_factor) {
  if (f.nx != grid.nx || f.nt != grid.nt || rho.nx != grid.nx || rho.nt != grid.nt)
    throw std::invalid_argument("diffusion_limit_error: grid mismatch");
  if (layer_factor < 0.0) throw std::invalid_argument("diffusion_limit_error: layer_factor < 0");

  const double margin = layer_factor * kn;
  std::vector<int> cells;
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.cell_center(i);
    if (x > margin && 1.0 - x > margin) cells.push_back(i);
  }
  if (cells.empty())
    throw std::invalid_argument("diffusion_limit_error: masked interior is empty");

  const double dx = grid.dx(), dt = grid.dt();
  double acc = 0.0;
  for (int k = 0; k <= grid.nt; ++k) {
    const double wt = (k == 0 || k == grid.nt) ? 0.5 * dt : dt;  // trapezoid in t
    double sum = 0.0;
    for (int i : cells) {
      double avg = 0.0;
      for (int j = 0; j < f.nv; ++j) avg += quad.weights[j] * f.at(k, i, j);
      const double e = avg - rho.at(k, i);
      sum += e * e;
    }
    acc += wt * sum * dx;
  }
  return std::sqrt(acc);
}

}  // namespace rtlab::diffusion

#include "rtlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtlab::kernels {

namespace {

void check_shapes(const transport::AngularFlux& f0, const transport::AngularFlux& g,
                  const grids::SlabGrid& grid, const grids::VelocityQuadrature& quad) {
  if (f0.nt != g.nt || f0.nx != g.nx || f0.nv != g.nv)
    throw std::invalid_argument("gamma kernel: f0 and g shapes disagree");
  if (f0.nt != grid.nt || f0.nx != grid.nx || f0.nv != quad.size())
    throw std::invalid_argument("gamma kernel: flux does not match grid/quadrature");
}

}  // namespace

KernelRow gamma_absorption(const transport::AngularFlux& f0, const transport::AngularFlux& g,
                           double kn, const grids::SlabGrid& grid,
                           const grids::VelocityQuadrature& quad) {
  check_shapes(f0, g, grid, quad);
  KernelRow row;
  row.gamma.assign(grid.nx, 0.0);
  const double dt = grid.dt();
  for (int k = 0; k <= grid.nt; ++k) {
    const double wt = (k == 0 || k == grid.nt) ? 0.5 * dt : dt;
    for (int i = 0; i < grid.nx; ++i) {
      double s = 0.0;
      for (int j = 0; j < f0.nv; ++j) s += quad.weights[j] * f0.at(k, i, j) * g.at(k, i, j);
      row.gamma[i] += wt * s;
    }
  }
  for (double& v : row.gamma) v *= -kn;
  row.meta.kn = kn;
  row.meta.variant = transport::Variant::absorption;
  return row;
}

KernelRow gamma_scattering(const transport::AngularFlux& f0, const transport::AngularFlux& g,
                           double kn, const grids::SlabGrid& grid,
                           const grids::VelocityQuadrature& quad) {
  check_shapes(f0, g, grid, quad);
  KernelRow row;
  row.gamma.assign(grid.nx, 0.0);
  const double dt = grid.dt();
  for (int k = 0; k <= grid.nt; ++k) {
    const double wt = (k == 0 || k == grid.nt) ? 0.5 * dt : dt;
    for (int i = 0; i < grid.nx; ++i) {
      double ag = 0.0, af = 0.0, agf = 0.0;
      for (int j = 0; j < f0.nv; ++j) {
        const double w = quad.weights[j];
        ag += w * g.at(k, i, j);
        af += w * f0.at(k, i, j);
        agf += w * g.at(k, i, j) * f0.at(k, i, j);
      }
      row.gamma[i] += wt * (ag * af - agf);
    }
  }
  for (double& v : row.gamma) v /= kn;
  row.meta.kn = kn;
  row.meta.variant = transport::Variant::scattering;
  return row;
}

double b_data(const transport::BoundarySignal& measured,
              const transport::BoundarySignal& background, int tau_index,
              transport::Side side) {
  if (measured.m.size() != background.m.size())
    throw std::invalid_argument("b_data: signal lengths disagree");
  return measured.at(tau_index, side) - background.at(tau_index, side);
}

DualityReport duality_residual(const transport::TransportProblem& p,
                               const std::vector<double>& sigma_tilde, int tau_index,
                               transport::Side side) {
  if (static_cast<int>(sigma_tilde.size()) != p.grid.nx)
    throw std::invalid_argument("duality_residual: sigma_tilde size != nx");
  double norm_inf = 0.0;
  for (double v : sigma_tilde) norm_inf = std::max(norm_inf, std::abs(v));
  if (norm_inf > 0.1)
    throw std::invalid_argument("duality_residual: ||sigma_tilde||_inf must be <= 0.1");

  transport::TransportProblem pert = p;
  const bool is_abs = p.variant == transport::Variant::absorption;
  auto& tilde = is_abs ? pert.optics.sigma_a_tilde : pert.optics.sigma_s_tilde;
  for (int i = 0; i < p.grid.nx; ++i) tilde[i] += sigma_tilde[i];

  const auto f0 = transport::solve_forward(p);
  const auto fp = transport::solve_forward(pert);
  const auto m0 = transport::outflow(f0, p.quad);
  const auto mp = transport::outflow(fp, p.quad);
  const auto g = transport::solve_adjoint(p, {tau_index, side});

  const KernelRow row = is_abs ? gamma_absorption(f0, g, p.kn, p.grid, p.quad)
                               : gamma_scattering(f0, g, p.kn, p.grid, p.quad);

  DualityReport rep;
  rep.lhs = b_data(mp, m0, tau_index, side);
  rep.rhs = 0.0;
  for (int i = 0; i < p.grid.nx; ++i) rep.rhs += p.grid.dx() * sigma_tilde[i] * row.gamma[i];
  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  if (scale < 1e-14) {
    rep.residual = 0.0;
    rep.degenerate = true;
  } else {
    rep.residual = std::abs(rep.lhs - rep.rhs) / scale;
  }
  return rep;
}

}  // namespace rtlab::kernels

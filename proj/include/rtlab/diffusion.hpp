#pragma once

#include <functional>
#include <vector>

#include "rtlab/grids.hpp"
#include "rtlab/transport.hpp"

namespace rtlab::diffusion {

// rho[k][i]: cell-centered density over time.
struct DensityField {
  int nt = 0, nx = 0;
  std::vector<double> data;

  DensityField() = default;
  DensityField(int nt_, int nx_) : nt(nt_), nx(nx_), data(static_cast<size_t>(nt_ + 1) * nx_, 0.0) {}
  double& at(int k, int i) { return data[static_cast<size_t>(k) * nx + i]; }
  double at(int k, int i) const { return data[static_cast<size_t>(k) * nx + i]; }
};

using BoundaryFn = std::function<double(double t)>;

// Crank-Nicolson solve of  d_t rho - C d_x(sigma_s^{-1} d_x rho) + sigma_a rho = 0
// with Dirichlet values at x=0,1 imposed through half-cell fluxes and
// harmonic-mean face coefficients.
DensityField solve_heat(const grids::SlabGrid& grid, const std::vector<double>& sigma_s,
                        const std::vector<double>& sigma_a, double C,
                        const std::vector<double>& rho0, const BoundaryFn& left,
                        const BoundaryFn& right);

// L^2-in-(t,x) norm of <f> - rho over the cells farther than layer_factor*kn
// from both boundaries. Throws if the masked interior is empty.
double diffusion_limit_error(const grids::SlabGrid& grid, const grids::VelocityQuadrature& quad,
                             const transport::AngularFlux& f, const DensityField& rho,
                             double kn, double layer_factor = 5.0);

}  // namespace rtlab::diffusion

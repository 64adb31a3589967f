#pragma once

#include <span>
#include <vector>

namespace rtlab::grids {

// Uniform space-time grid on the slab x in [0,1], t in [0,T].
struct SlabGrid {
  int nx = 0;
  int nt = 0;
  double T = 0.0;

  SlabGrid() = default;
  SlabGrid(int nx_, int nt_, double T_);

  double dx() const { return 1.0 / nx; }
  double dt() const { return T / nt; }
  double cell_center(int i) const { return (i + 0.5) / nx; }
  double time_level(int k) const { return T * k / nt; }
};

// Velocity quadrature on (-1,1) with the measure normalized to a probability
// measure: sum w_j = 1, so the collision operator reads L f = <f> - f and the
// diffusion constant is <v^2> = 1/3.
struct VelocityQuadrature {
  std::vector<double> nodes;    // strictly increasing, symmetric, none at 0
  std::vector<double> weights;  // positive, sum to 1

  int size() const { return static_cast<int>(nodes.size()); }
  // index of -v_j; nodes are built symmetric so this is exact
  int mirror(int j) const { return size() - 1 - j; }
};

// Gauss-Legendre rule of even order n in [2, 128], weights rescaled to the
// normalized measure.
VelocityQuadrature gauss_legendre(int n);

// <f> = sum_j w_j f_j
double velocity_average(std::span<const double> f_slice, const VelocityQuadrature& q);

// L f = <f> - f
std::vector<double> collision_apply(std::span<const double> f_slice,
                                    const VelocityQuadrature& q);

}  // namespace rtlab::grids

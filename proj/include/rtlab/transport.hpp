#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "rtlab/grids.hpp"

namespace rtlab::transport {

enum class Side { left = 0, right = 1 };
enum class Variant { absorption, scattering };

// Per-cell optical coefficients, stored as background + perturbation.
struct OpticalField {
  std::vector<double> sigma_s0, sigma_a0;
  std::vector<double> sigma_s_tilde, sigma_a_tilde;

  static OpticalField background(int nx, double ss0, double sa0);

  double sigma_s(int i) const { return sigma_s0[i] + sigma_s_tilde[i]; }
  double sigma_a(int i) const { return sigma_a0[i] + sigma_a_tilde[i]; }
  int nx() const { return static_cast<int>(sigma_s0.size()); }
  void validate() const;
};

// v-independent inflow value phi(t, side) applied on incoming characteristics
// (side=left feeds v>0, side=right feeds v<0). Well-prepared data only.
using InflowFn = std::function<double(double t, Side side)>;

struct TransportProblem {
  grids::SlabGrid grid;
  grids::VelocityQuadrature quad;
  double kn = 0.0;
  OpticalField optics;
  InflowFn inflow;                // null means zero inflow
  std::vector<double> initial;    // v-independent per-cell data; empty means zero
  Variant variant = Variant::absorption;

  void validate() const;  // throws std::invalid_argument with guidance
};

// f[k][i][j]: time level k = 0..nt, cell i, velocity node j.
struct AngularFlux {
  int nt = 0, nx = 0, nv = 0;
  std::vector<double> data;

  AngularFlux() = default;
  AngularFlux(int nt_, int nx_, int nv_)
      : nt(nt_), nx(nx_), nv(nv_), data(static_cast<size_t>(nt_ + 1) * nx_ * nv_, 0.0) {}
  double& at(int k, int i, int j) {
    return data[(static_cast<size_t>(k) * nx + i) * nv + j];
  }
  double at(int k, int i, int j) const {
    return data[(static_cast<size_t>(k) * nx + i) * nv + j];
  }
};

// Velocity-averaged outgoing flux m[k][side].
struct BoundarySignal {
  std::vector<std::array<double, 2>> m;
  double at(int k, Side s) const { return m[k][static_cast<int>(s)]; }
};

// Backward Euler in time, first-order upwind in x, collision fully implicit;
// one sparse factorization per problem, reused across all steps.
AngularFlux solve_forward(const TransportProblem& p);

struct AdjointSource {
  int tau_index = 0;  // time level of the measurement, in (0, nt]
  Side side = Side::right;
};

// Time-reversed adjoint via s = T - t, v -> -v, reusing the forward march.
// Boundary data is a hat in time of width 2*dt with unit integral, applied
// v-independently on the source side.
AngularFlux solve_adjoint(const TransportProblem& p, const AdjointSource& src);

BoundarySignal outflow(const AngularFlux& f, const grids::VelocityQuadrature& q);

// Test hook: the dense one-step system matrix M with M f^{k+1} = (kn/dt) f^k + bc.
Eigen::MatrixXd dense_step_matrix(const TransportProblem& p);

}  // namespace rtlab::transport

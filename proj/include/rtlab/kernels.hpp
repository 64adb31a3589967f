#pragma once

#include <vector>

#include "rtlab/grids.hpp"
#include "rtlab/transport.hpp"

namespace rtlab::kernels {

struct ExperimentMeta {
  int tau_index = 0;
  transport::Side measure_side = transport::Side::right;
  int inflow_id = 0;
  transport::Side inflow_side = transport::Side::left;
  double kn = 0.0;
  transport::Variant variant = transport::Variant::absorption;
};

// One sampled Fredholm kernel gamma(x_i) for a (tau, y, phi) experiment.
struct KernelRow {
  std::vector<double> gamma;
  ExperimentMeta meta;
};

// gamma(x_i) = -kn * int_0^T <f0 g> dt  (trapezoid in t, normalized v-measure)
KernelRow gamma_absorption(const transport::AngularFlux& f0, const transport::AngularFlux& g,
                           double kn, const grids::SlabGrid& grid,
                           const grids::VelocityQuadrature& quad);

// gamma(x_i) = (1/kn) * int_0^T (<g><f0> - <g f0>) dt
KernelRow gamma_scattering(const transport::AngularFlux& f0, const transport::AngularFlux& g,
                           double kn, const grids::SlabGrid& grid,
                           const grids::VelocityQuadrature& quad);

// b = measured - background at one (tau, side)
double b_data(const transport::BoundarySignal& measured,
              const transport::BoundarySignal& background, int tau_index,
              transport::Side side);

struct DualityReport {
  double lhs = 0.0;       // b from the perturbed forward solve
  double rhs = 0.0;       // sum_i dx sigma_tilde(x_i) gamma(x_i)
  double residual = 0.0;  // |lhs-rhs| / max(|lhs|,|rhs|)
  bool degenerate = false;
};

// Checks the linearized identity b = <sigma_tilde, gamma> for the problem's
// variant; sigma_tilde perturbs the variant's free coefficient.
DualityReport duality_residual(const transport::TransportProblem& p,
                               const std::vector<double>& sigma_tilde, int tau_index,
                               transport::Side side);

}  // namespace rtlab::kernels

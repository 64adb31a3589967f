#include "rtlab/transport.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rtlab/errors.hpp"

namespace rtlab::transport {

OpticalField OpticalField::background(int nx, double ss0, double sa0) {
  OpticalField f;
  f.sigma_s0.assign(nx, ss0);
  f.sigma_a0.assign(nx, sa0);
  f.sigma_s_tilde.assign(nx, 0.0);
  f.sigma_a_tilde.assign(nx, 0.0);
  return f;
}

void OpticalField::validate() const {
  const size_t n = sigma_s0.size();
  if (sigma_a0.size() != n || sigma_s_tilde.size() != n || sigma_a_tilde.size() != n)
    throw std::invalid_argument("OpticalField: field lengths disagree");
  constexpr double sigma_min = 1e-12;
  for (size_t i = 0; i < n; ++i) {
    if (!(sigma_s(i) >= sigma_min))
      throw std::invalid_argument("OpticalField: sigma_s must stay positive (cell " +
                                  std::to_string(i) + ")");
    if (sigma_a(i) < 0.0)
      throw std::invalid_argument("OpticalField: sigma_a must be nonnegative (cell " +
                                  std::to_string(i) + ")");
    if (std::abs(sigma_s_tilde[i]) > 0.5 * std::abs(sigma_s0[i]) + 1e-15 ||
        std::abs(sigma_a_tilde[i]) > 0.5 * std::abs(sigma_a0[i]) + 1e-15)
      throw std::invalid_argument(
          "OpticalField: perturbation exceeds half the background (cell " +
          std::to_string(i) + "); linearization bound violated");
  }
}

void TransportProblem::validate() const {
  if (!(kn > 0.0 && kn <= 1.0))
    throw std::invalid_argument("TransportProblem: kn must lie in (0, 1]");
  if (optics.nx() != grid.nx)
    throw std::invalid_argument("TransportProblem: optics size != grid.nx");
  optics.validate();
  if (!initial.empty() && static_cast<int>(initial.size()) != grid.nx)
    throw std::invalid_argument("TransportProblem: initial data size != grid.nx");
  if (grid.dx() > kn / 4.0 + 1e-15)
    throw std::invalid_argument(
        "TransportProblem: resolution guard dx <= kn/4 violated (dx=" +
        std::to_string(grid.dx()) + ", kn=" + std::to_string(kn) +
        "); refine nx to at least " + std::to_string(static_cast<int>(std::ceil(4.0 / kn))));
}

namespace {

struct StepSystem {
  Eigen::SparseMatrix<double> M;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  StepSystem(const TransportProblem& p) {
    const int nx = p.grid.nx, nv = p.quad.size();
    const double dx = p.grid.dx(), dt = p.grid.dt(), kn = p.kn;
    const int N = nx * nv;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(N) * (nv + 2));
    for (int i = 0; i < nx; ++i) {
      const double ss = p.optics.sigma_s(i), sa = p.optics.sigma_a(i);
      for (int j = 0; j < nv; ++j) {
        const int r = i * nv + j;
        const double vj = p.quad.nodes[j];
        double diag = kn / dt + std::abs(vj) / dx + ss / kn + kn * sa;
        for (int l = 0; l < nv; ++l) {
          const double c = -(ss / kn) * p.quad.weights[l];
          if (l == j)
            diag += c;
          else
            trip.emplace_back(r, i * nv + l, c);
        }
        trip.emplace_back(r, r, diag);
        if (vj > 0.0 && i > 0) trip.emplace_back(r, (i - 1) * nv + j, -vj / dx);
        if (vj < 0.0 && i < nx - 1) trip.emplace_back(r, (i + 1) * nv + j, vj / dx);
      }
    }
    M.resize(N, N);
    M.setFromTriplets(trip.begin(), trip.end());
    lu.compute(M);
    if (lu.info() != Eigen::Success)
      throw numerical_breakdown("transport step matrix factorization failed");
  }
};

AngularFlux march(const TransportProblem& p, const InflowFn& inflow) {
  const int nx = p.grid.nx, nt = p.grid.nt, nv = p.quad.size();
  const double dx = p.grid.dx(), dt = p.grid.dt(), kn = p.kn;
  StepSystem sys(p);

  AngularFlux f(nt, nx, nv);
  if (!p.initial.empty())
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j) f.at(0, i, j) = p.initial[i];

  Eigen::VectorXd rhs(nx * nv), sol(nx * nv);
  for (int k = 0; k < nt; ++k) {
    const double t1 = p.grid.time_level(k + 1);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j) rhs[i * nv + j] = (kn / dt) * f.at(k, i, j);
    if (inflow) {
      for (int j = 0; j < nv; ++j) {
        const double vj = p.quad.nodes[j];
        if (vj > 0.0) rhs[0 * nv + j] += vj / dx * inflow(t1, Side::left);
        if (vj < 0.0) rhs[(nx - 1) * nv + j] += -vj / dx * inflow(t1, Side::right);
      }
    }
    sol = sys.lu.solve(rhs);
    if (sys.lu.info() != Eigen::Success)
      throw numerical_breakdown("transport step solve failed", k + 1);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j) f.at(k + 1, i, j) = sol[i * nv + j];
  }
  return f;
}

}  // namespace

AngularFlux solve_forward(const TransportProblem& p) {
  p.validate();
  return march(p, p.inflow);
}

AngularFlux solve_adjoint(const TransportProblem& p, const AdjointSource& src) {
  p.validate();
  if (src.tau_index <= 0 || src.tau_index > p.grid.nt)
    throw std::invalid_argument("solve_adjoint: tau index must lie in (0, nt]");

  const double dt = p.grid.dt();
  const double center = p.grid.T - p.grid.time_level(src.tau_index);
  const Side side = src.side;
  InflowFn pulse = [center, dt, side](double t, Side s) {
    if (s != side) return 0.0;
    const double u = 1.0 - std::abs(t - center) / dt;
    return u > 0.0 ? u / dt : 0.0;
  };

  TransportProblem rev = p;
  rev.inflow = pulse;
  rev.initial.clear();
  AngularFlux G = march(rev, pulse);

  const int nt = p.grid.nt, nx = p.grid.nx, nv = p.quad.size();
  AngularFlux g(nt, nx, nv);
  for (int k = 0; k <= nt; ++k)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j) g.at(k, i, j) = G.at(nt - k, i, p.quad.mirror(j));
  return g;
}

BoundarySignal outflow(const AngularFlux& f, const grids::VelocityQuadrature& q) {
  if (f.nv != q.size())
    throw std::invalid_argument("outflow: flux and quadrature sizes disagree");
  BoundarySignal s;
  s.m.assign(f.nt + 1, {0.0, 0.0});
  for (int k = 0; k <= f.nt; ++k) {
    double left = 0.0, right = 0.0;
    for (int j = 0; j < f.nv; ++j) {
      const double vj = q.nodes[j], wj = q.weights[j];
      if (vj < 0.0) left += wj * (-vj) * f.at(k, 0, j);
      if (vj > 0.0) right += wj * vj * f.at(k, f.nx - 1, j);
    }
    s.m[k] = {left, right};
  }
  return s;
}

Eigen::MatrixXd dense_step_matrix(const TransportProblem& p) {
  const int nx = p.grid.nx, nv = p.quad.size();
  const double dx = p.grid.dx(), dt = p.grid.dt(), kn = p.kn;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nx * nv, nx * nv);
  for (int i = 0; i < nx; ++i) {
    const double ss = p.optics.sigma_s(i), sa = p.optics.sigma_a(i);
    for (int j = 0; j < nv; ++j) {
      const int r = i * nv + j;
      const double vj = p.quad.nodes[j];
      M(r, r) += kn / dt + std::abs(vj) / dx + ss / kn + kn * sa;
      for (int l = 0; l < nv; ++l) M(r, i * nv + l) -= (ss / kn) * p.quad.weights[l];
      if (vj > 0.0 && i > 0) M(r, (i - 1) * nv + j) -= vj / dx;
      if (vj < 0.0 && i < nx - 1) M(r, (i + 1) * nv + j) += vj / dx;
    }
  }
  return M;
}

}  // namespace rtlab::transport

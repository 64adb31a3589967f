#include "rtlab/grids.hpp"

#include <cmath>
#include <stdexcept>

namespace rtlab::grids {

SlabGrid::SlabGrid(int nx_, int nt_, double T_) : nx(nx_), nt(nt_), T(T_) {
  if (nx < 4) throw std::invalid_argument("SlabGrid: nx must be >= 4");
  if (nt < 4) throw std::invalid_argument("SlabGrid: nt must be >= 4");
  if (!(T > 0.0)) throw std::invalid_argument("SlabGrid: T must be positive");
}

namespace {

// P_n(x) and its derivative by the three-term recurrence.
void legendre_pair(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

VelocityQuadrature gauss_legendre(int n) {
  if (n < 2 || n > 128 || n % 2 != 0)
    throw std::invalid_argument("gauss_legendre: order must be even and in [2,128]");

  VelocityQuadrature q;
  q.nodes.assign(n, 0.0);
  q.weights.assign(n, 0.0);

  // Newton from the Chebyshev-like initial guess; upper half, then mirror so
  // the symmetry v_{n-1-j} = -v_j holds bitwise.
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(n, x, p, dp);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    legendre_pair(n, x, p, dp);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // standard weight / 2
    q.nodes[n - 1 - i] = x;
    q.nodes[i] = -x;
    q.weights[n - 1 - i] = w;
    q.weights[i] = w;
  }
  return q;
}

double velocity_average(std::span<const double> f_slice, const VelocityQuadrature& q) {
  if (static_cast<int>(f_slice.size()) != q.size())
    throw std::invalid_argument("velocity_average: slice length != quadrature size");
  double s = 0.0;
  for (int j = 0; j < q.size(); ++j) s += q.weights[j] * f_slice[j];
  return s;
}

std::vector<double> collision_apply(std::span<const double> f_slice,
                                    const VelocityQuadrature& q) {
  const double avg = velocity_average(f_slice, q);
  std::vector<double> out(f_slice.size());
  for (size_t j = 0; j < f_slice.size(); ++j) out[j] = avg - f_slice[j];
  return out;
}

}  // namespace rtlab::grids

#include "rtlab/peaked.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtlab/inversion.hpp"
#include "rtlab/quadrature.hpp"

namespace rtlab::peaked {

Profile profile_from_name(const std::string& name) {
  if (name == "exponential") return Profile::exponential;
  if (name == "gaussian") return Profile::gaussian;
  if (name == "bump" || name == "compact_bump") return Profile::compact_bump;
  throw std::invalid_argument("unknown profile '" + name + "'");
}

std::string profile_name(Profile p) {
  switch (p) {
    case Profile::exponential: return "exponential";
    case Profile::gaussian: return "gaussian";
    case Profile::compact_bump: return "bump";
  }
  return "?";
}

double profile_value(Profile p, double alpha) {
  switch (p) {
    case Profile::exponential: return std::exp(-alpha);
    case Profile::gaussian: return std::exp(-alpha * alpha);
    case Profile::compact_bump:
      if (alpha >= 1.0) return 0.0;
      return std::exp(-1.0 / (1.0 - alpha * alpha));
  }
  return 0.0;
}

double PeakedKernel::alpha_max() const {
  const double lim = 2.0 / eps;
  // exponential/gaussian integrands are below 1e-300 long before alpha=700
  const double decay_cut = profile == Profile::compact_bump ? 1.0
                           : profile == Profile::gaussian   ? 40.0
                                                            : 700.0;
  return std::min(lim, decay_cut);
}

namespace {

// integrate f over [0, hi] with panels split dyadically from 1 upward so the
// adaptive rule never sees the full range at once
double integrate_alpha(const std::function<double(double)>& f, double hi, double tol) {
  double acc = 0.0, a = 0.0, b = std::min(1.0, hi);
  while (true) {
    acc += adaptive_integrate(f, a, b, tol);
    if (b >= hi) break;
    a = b;
    b = std::min(2.0 * b, hi);
  }
  return acc;
}

}  // namespace

PeakedKernel normalize_kernel(Profile profile, double eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("normalize_kernel: eps must lie in (0, 1]");
  PeakedKernel k;
  k.profile = profile;
  k.eps = eps;
  k.norm_const = 1.0;
  const double mass =
      integrate_alpha([&](double a) { return profile_value(profile, a); }, k.alpha_max(), 1e-14);
  if (!(mass > 0.0)) throw std::invalid_argument("normalize_kernel: profile has zero mass");
  k.norm_const = 1.0 / (2.0 * M_PI * mass);
  return k;
}

double legendre_P(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_P: n < 0");
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_deriv_at_one(int n, int j) {
  if (n < 0 || j < 0) throw std::invalid_argument("legendre_deriv_at_one: negative index");
  if (j > n) return 0.0;
  double v = 1.0;  // P_n(1) = 1
  for (int l = 1; l <= j; ++l) v *= (static_cast<double>(n) * (n + 1) - static_cast<double>(l) * (l - 1)) / (2.0 * l);
  return v;
}

LegendreCoeffs legendre_moments(const PeakedKernel& k, int N) {
  if (N < 0 || N > 64) throw std::invalid_argument("legendre_moments: N must be in [0, 64]");
  LegendreCoeffs out;
  out.sigma_n.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    const double I = integrate_alpha(
        [&](double a) { return k.sigma(a) * legendre_P(n, 1.0 - k.eps * a); }, k.alpha_max(),
        1e-13);
    out.sigma_n[n] = 2.0 * M_PI * I;
  }
  return out;
}

MomentVector xi_moments(const PeakedKernel& k, int N) {
  if (N < 0 || N > 64) throw std::invalid_argument("xi_moments: N must be in [0, 64]");
  MomentVector out;
  out.eps = k.eps;
  out.xi.resize(N + 1);
  out.xi[0] = 2.0 * M_PI / k.eps;  // declared constant, independent of sigma
  for (int n = 1; n <= N; ++n) {
    const double I = integrate_alpha([&](double a) { return k.sigma(a) * std::pow(a, n); },
                                     k.alpha_max(), 1e-13);
    out.xi[n] = std::pow(k.eps, n - 1) * 2.0 * M_PI * I;
  }
  return out;
}

std::vector<double> collision_eigenvalues(const LegendreCoeffs& c, double eps) {
  std::vector<double> lam(c.sigma_n.size());
  for (size_t n = 0; n < c.sigma_n.size(); ++n) lam[n] = (c.sigma_n[n] - c.sigma_n[0]) / eps;
  return lam;
}

std::vector<double> fp_eigenvalues(double xi1, int N) {
  if (!(xi1 > 0.0)) throw std::invalid_argument("fp_eigenvalues: xi1 must be positive");
  std::vector<double> lam(N + 1);
  for (int n = 0; n <= N; ++n) lam[n] = -0.5 * n * (n + 1) * xi1;
  return lam;
}

FpConvergenceTable fp_convergence_report(Profile profile, const std::vector<double>& eps_list,
                                         int N) {
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("fp_convergence_report: eps list must decrease");
  FpConvergenceTable table;
  for (double eps : eps_list) {
    const PeakedKernel k = normalize_kernel(profile, eps);
    const LegendreCoeffs c = legendre_moments(k, N);
    const MomentVector xi = xi_moments(k, 1);
    const auto lam = collision_eigenvalues(c, eps);
    const auto lfp = fp_eigenvalues(xi.xi1(), N);
    FpConvergenceRow row;
    row.eps = eps;
    for (int n = 1; n <= N; ++n) {
      const double e = std::abs(lam[n] - lfp[n]) / (0.5 * n * (n + 1));
      if (e > row.E) {
        row.E = e;
        row.argmax_n = n;
      }
    }
    table.rows.push_back(row);
  }
  if (table.rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& r : table.rows) {
      xs.push_back(r.eps);
      ys.push_back(r.E);
    }
    table.fitted_order = inversion::loglog_slope(xs, ys);
    table.order_defined = true;
  }
  return table;
}

}  // namespace rtlab::peaked

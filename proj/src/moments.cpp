#include "rtlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtlab/errors.hpp"
#include "rtlab/grids.hpp"
#include "rtlab/inversion.hpp"
#include "rtlab/quadrature.hpp"
#include "rtlab/rng.hpp"

namespace rtlab::moments {

using peaked::legendre_deriv_at_one;
using peaked::legendre_P;

SphereQuadrature sphere_quadrature(int band) {
  if (band < 0 || band > 32) throw std::invalid_argument("sphere_quadrature: band in [0,32]");
  const auto gl = grids::gauss_legendre(2 * ((band + 2) / 2));  // >= band+1 nodes, even order
  const int naz = 2 * band + 2;
  SphereQuadrature q;
  q.band = band;
  for (int i = 0; i < gl.size(); ++i) {
    const double v3 = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - v3 * v3));
    // gl weights are normalized to 1; surface measure carries 2 * 2pi
    const double wpolar = gl.weights[i] * 2.0;
    for (int a = 0; a < naz; ++a) {
      const double psi = 2.0 * M_PI * a / naz;
      q.nodes.push_back({{st * std::cos(psi), st * std::sin(psi), v3},
                         wpolar * (2.0 * M_PI / naz)});
    }
  }
  return q;
}

namespace {

// fully normalized associated Legendre P-bar_{n,m}(x) including 1/sqrt(4pi)
double normalized_assoc_legendre(int n, int m, double x) {
  const double somx2 = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = std::sqrt(1.0 / (4.0 * M_PI));
  for (int k = 1; k <= m; ++k)
    pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * somx2;
  if (n == m) return pmm;
  double pmmp1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
  if (n == m + 1) return pmmp1;
  for (int l = m + 2; l <= n; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
    const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    const double pll = a * (x * pmmp1 - b * pmm);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pmmp1;
}

}  // namespace

double real_sph_harmonic(int n, int m, const std::array<double, 3>& v) {
  const double v3 = v[2];
  const double psi = std::atan2(v[1], v[0]);
  const int am = std::abs(m);
  if (am > n) throw std::invalid_argument("real_sph_harmonic: |m| > n");
  const double p = normalized_assoc_legendre(n, am, v3);
  if (m == 0) return p;
  return m > 0 ? M_SQRT2 * p * std::cos(am * psi) : M_SQRT2 * p * std::sin(am * psi);
}

double HarmonicExpansion::eval(const std::array<double, 3>& v) const {
  double s = 0.0;
  for (int n = 0; n <= band; ++n)
    for (int m = -n; m <= n; ++m) s += coeff[index(n, m)] * real_sph_harmonic(n, m, v);
  return s;
}

double ManufacturedGamma::eval(const std::array<double, 3>& v,
                               const std::array<double, 3>& vp) const {
  double s = 0.0;
  for (const auto& [G, F] : separable) s += G.eval(v) * F.eval(vp);
  if (diagonal) s -= diagonal->eval(v);
  return s;
}

ManufacturedGamma random_gamma(int band, int terms, bool with_diagonal, std::uint64_t seed) {
  SplitMix64 rng(seed);
  auto rand_expansion = [&](void) {
    HarmonicExpansion e;
    e.band = band;
    e.coeff.resize((band + 1) * (band + 1));
    for (auto& c : e.coeff) c = 2.0 * rng.next_unit() - 1.0;
    return e;
  };
  ManufacturedGamma g;
  g.band = band;
  for (int r = 0; r < terms; ++r) g.separable.emplace_back(rand_expansion(), rand_expansion());
  if (with_diagonal) g.diagonal = rand_expansion();
  return g;
}

ProjectionPaths legendre_projection_paths(const ManufacturedGamma& gamma, int n,
                                          const SphereQuadrature& quad) {
  if (n > quad.band) throw std::invalid_argument("legendre_projection: n exceeds band");

  // (b) addition-formula path, exact in coefficient space
  double path_b = 0.0;
  for (const auto& [G, F] : gamma.separable) {
    double s = 0.0;
    for (int m = -n; m <= n; ++m)
      s += G.coeff[HarmonicExpansion::index(n, m)] * F.coeff[HarmonicExpansion::index(n, m)];
    path_b += 4.0 * M_PI / (2.0 * n + 1.0) * s;
  }
  if (gamma.diagonal && n == 0) {
    // int P_0 gamma_diag = -4pi * int d(v) dv;  int d dv = d_00 * sqrt(4pi)
    path_b -= 4.0 * M_PI * gamma.diagonal->coeff[0] * std::sqrt(4.0 * M_PI);
  }

  // (a) direct double quadrature, with the separable factors tabulated per node
  const size_t nn = quad.nodes.size();
  const size_t terms = gamma.separable.size();
  std::vector<double> gv(terms * nn), fv(terms * nn), dv(nn, 0.0);
  for (size_t a = 0; a < nn; ++a) {
    for (size_t r = 0; r < terms; ++r) {
      gv[r * nn + a] = gamma.separable[r].first.eval(quad.nodes[a].v);
      fv[r * nn + a] = gamma.separable[r].second.eval(quad.nodes[a].v);
    }
    if (gamma.diagonal) dv[a] = gamma.diagonal->eval(quad.nodes[a].v);
  }
  double path_a = 0.0;
  for (size_t a = 0; a < nn; ++a) {
    double inner = 0.0;
    for (size_t b = 0; b < nn; ++b) {
      const double mu = quad.nodes[a].v[0] * quad.nodes[b].v[0] +
                        quad.nodes[a].v[1] * quad.nodes[b].v[1] +
                        quad.nodes[a].v[2] * quad.nodes[b].v[2];
      double val = -dv[a];
      for (size_t r = 0; r < terms; ++r) val += gv[r * nn + a] * fv[r * nn + b];
      inner += quad.nodes[b].weight * val * legendre_P(n, mu);
    }
    path_a += quad.nodes[a].weight * inner;
  }

  return {path_a, path_b};
}

double legendre_projection(const ManufacturedGamma& gamma, int n, const SphereQuadrature& quad) {
  const auto paths = legendre_projection_paths(gamma, n, quad);
  const double scale = std::max({1.0, std::abs(paths.direct), std::abs(paths.addition)});
  if (std::abs(paths.direct - paths.addition) > 1e-6 * scale)
    throw numerical_breakdown("legendre_projection: quadrature and addition-formula paths "
                              "disagree; |a-b| = " +
                              std::to_string(std::abs(paths.direct - paths.addition)));
  return paths.addition;
}

XiSystem assemble_xi_system(const std::vector<ManufacturedGamma>& experiments, int J, int band,
                            const SphereQuadrature& quad) {
  if (J < 1 || J > band)
    throw std::invalid_argument("assemble_xi_system: need 1 <= J <= band");
  const auto m = static_cast<Eigen::Index>(experiments.size());
  XiSystem sys;
  sys.A.resize(m, J);
  sys.a0.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::vector<double> proj(band + 1);
    for (int n = 0; n <= band; ++n) proj[n] = legendre_projection(experiments[i], n, quad);
    for (int j = 0; j <= J; ++j) {
      double a = 0.0;
      double jfact = 1.0;
      for (int l = 2; l <= j; ++l) jfact *= l;
      for (int n = 0; n <= band; ++n) a += legendre_deriv_at_one(n, j) / jfact * proj[n];
      if (j == 0)
        sys.a0[i] = a;
      else
        sys.A(i, j - 1) = a;
    }
  }
  return sys;
}

XiSolve solve_xi(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double delta,
                 std::uint64_t seed) {
  if (A.rows() < A.cols())
    throw std::invalid_argument("solve_xi: need at least as many experiments as unknowns");
  if (delta < 0.0) throw std::invalid_argument("solve_xi: delta must be >= 0");
  const inversion::SvdResult dec = inversion::svd(A);
  if (dec.lambda_min() <= 1e-12 * dec.lambda_max()) {
    Eigen::Index jbad = 0;
    dec.V.col(dec.sv.size() - 1).cwiseAbs().maxCoeff(&jbad);
    throw std::invalid_argument("solve_xi: rank-deficient system; column " +
                                std::to_string(jbad + 1) + " is not resolved");
  }
  auto lsq = [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
    for (Eigen::Index j = 0; j < dec.sv.size(); ++j)
      x += dec.U.col(j).dot(rhs) / dec.sv[j] * dec.V.col(j);
    return x;
  };
  auto noisy = [&](std::uint64_t substream) {
    Eigen::VectorXd rhs = b;
    SplitMix64 rng(mix_seed(seed, substream));
    for (Eigen::Index r = 0; r < rhs.size(); ++r) rhs[r] += rng.next_symmetric(delta);
    return rhs;
  };

  XiSolve out;
  out.xi_hat = lsq(noisy(0));
  constexpr int redraws = 20;
  Eigen::MatrixXd samples(A.cols(), redraws);
  for (int d = 0; d < redraws; ++d) samples.col(d) = lsq(noisy(d + 1));
  out.error_bars.resize(A.cols());
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    const double mean = samples.row(c).mean();
    double var = 0.0;
    for (int d = 0; d < redraws; ++d) var += (samples(c, d) - mean) * (samples(c, d) - mean);
    out.error_bars[c] = std::sqrt(var / (redraws - 1));
  }
  return out;
}

std::vector<double> reconstruct_rescaled_kernel(const std::vector<double>& xi, double eps,
                                                int N, const std::vector<double>& mu_nodes) {
  const int K = static_cast<int>(xi.size()) - 1;
  if (K < 0 || K > 6) throw std::invalid_argument("reconstruct_rescaled_kernel: k range <= 6");
  std::vector<double> out(mu_nodes.size(), 0.0);
  std::vector<double> kfact(K + 1, 1.0);
  for (int k = 1; k <= K; ++k) kfact[k] = kfact[k - 1] * k;
  for (size_t q = 0; q < mu_nodes.size(); ++q) {
    const double mu = mu_nodes[q];
    double s = 0.0;
    for (int k = 0; k <= K; ++k) {
      double hk = 0.0;
      for (int n = k; n <= N; ++n)
        hk += (2.0 * n + 1.0) / (4.0 * M_PI) * legendre_P(n, mu) *
              legendre_deriv_at_one(n, k) / kfact[k];
      s += (k % 2 == 0 ? 1.0 : -1.0) * hk * xi[k];
    }
    out[q] = eps * s;
  }
  return out;
}

KappaEpsTable kappa_epsilon(peaked::Profile profile, const std::vector<double>& eps_list,
                            double delta, int N, std::uint64_t seed) {
  constexpr int band = 3, J = 3, experiments = 8;
  const SphereQuadrature quad = sphere_quadrature(band);
  std::vector<ManufacturedGamma> suite;
  for (int i = 0; i < experiments; ++i)
    suite.push_back(random_gamma(band, 2, true, mix_seed(seed, 0x5017eULL, i)));
  const XiSystem sys = assemble_xi_system(suite, J, band, quad);
  const inversion::SvdResult dec = inversion::svd(sys.A);

  std::vector<double> mu(2001);
  for (size_t i = 0; i < mu.size(); ++i) mu[i] = -1.0 + 2.0 * i / (mu.size() - 1);

  KappaEpsTable table;
  table.draws = 20;
  for (double eps : eps_list) {
    const peaked::PeakedKernel kern = peaked::normalize_kernel(profile, eps);
    const peaked::MomentVector xiv = peaked::xi_moments(kern, J);
    Eigen::VectorXd xi_true(J);
    for (int j = 1; j <= J; ++j) xi_true[j - 1] = xiv.xi[j];
    const Eigen::VectorXd b = sys.a0 * xiv.xi[0] + sys.A * xi_true;
    const Eigen::VectorXd bp = b - sys.a0 * xiv.xi[0];

    const auto recon_true = reconstruct_rescaled_kernel(xiv.xi, eps, N, mu);
    double true_sup = 0.0;
    for (double v : recon_true) true_sup = std::max(true_sup, std::abs(v));

    std::vector<double> kappas;
    double xi1_err = 0.0;
    for (int d = 0; d < table.draws; ++d) {
      Eigen::VectorXd rhs = bp;
      SplitMix64 rng(mix_seed(seed, 0xd0aaULL, d));
      for (Eigen::Index r = 0; r < rhs.size(); ++r) rhs[r] += rng.next_symmetric(delta);
      Eigen::VectorXd xhat = Eigen::VectorXd::Zero(J);
      for (Eigen::Index j = 0; j < dec.sv.size(); ++j)
        xhat += dec.U.col(j).dot(rhs) / dec.sv[j] * dec.V.col(j);
      std::vector<double> xi_hat_full(xiv.xi);
      for (int j = 1; j <= J; ++j) xi_hat_full[j] = xhat[j - 1];
      const auto recon_hat = reconstruct_rescaled_kernel(xi_hat_full, eps, N, mu);
      double diff = 0.0;
      for (size_t q = 0; q < mu.size(); ++q)
        diff = std::max(diff, std::abs(recon_hat[q] - recon_true[q]));
      kappas.push_back(diff / true_sup);
      xi1_err = std::max(xi1_err, std::abs(xhat[0] - xi_true[0]));
    }
    std::sort(kappas.begin(), kappas.end());
    KappaEpsRow row;
    row.eps = eps;
    row.kappa = 0.5 * (kappas[kappas.size() / 2 - 1] + kappas[kappas.size() / 2]);
    row.kappa_over_deps = delta > 0.0 ? row.kappa / (delta * eps) : 0.0;
    row.xi1_err_max = xi1_err;
    row.recon_true_sup = true_sup;
    row.analytic_sup = kern.sigma(0.0) / eps;
    table.rows.push_back(row);
  }
  return table;
}

std::vector<double> hermite_basis(int n, const std::vector<double>& x_nodes) {
  if (n < 0 || n > 40) throw std::invalid_argument("hermite_basis: n in [0, 40]");
  std::vector<double> out(x_nodes.size());
  for (size_t i = 0; i < x_nodes.size(); ++i) {
    const double x = x_nodes[i];
    double p0 = 1.0, p1 = x;
    if (n == 0) {
      out[i] = 1.0;
      continue;
    }
    for (int k = 1; k < n; ++k) {
      const double p2 = x * p1 - k * p0;
      p0 = p1;
      p1 = p2;
    }
    out[i] = p1;
  }
  return out;
}

namespace {

double hermite_p(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return 1.0;
  for (int k = 1; k < n; ++k) {
    const double p2 = x * p1 - k * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double factorial_d(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double hermite_overlap(int a, int n, double lo, double hi) {
  // panel split keeps the adaptive rule on smooth, moderate stretches
  const double tol = 1e-12 * std::sqrt(factorial_d(a) * factorial_d(n)) * std::sqrt(2.0 * M_PI);
  auto f = [&](double v) { return hermite_p(a, v) * hermite_p(n, v) * std::exp(-0.5 * v * v); };
  double acc = 0.0;
  double x0 = lo;
  while (x0 < hi) {
    const double x1 = std::min(x0 + 4.0, hi);
    acc += adaptive_integrate(f, x0, x1, tol);
    x0 = x1;
  }
  return acc;
}

HermiteMap hermite_map(double eps, int M, int Nh) {
  if (M < 0 || M > 20 || Nh < 0 || Nh > 20)
    throw std::invalid_argument("hermite_map: M, Nh must lie in [0, 20]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("hermite_map: eps in (0,1)");
  const double lim = std::min(2.0 / eps, 38.0);

  HermiteMap map;
  map.M = M;
  map.Nh = Nh;
  map.eps = eps;
  map.C.resize(M + 1, Nh + 1);
  for (int m = 0; m <= M; ++m) {
    for (int n = 0; n <= Nh; ++n) {
      double s = 0.0;
      for (int k = 0; 2 * k <= m; ++k) {
        const double D = hermite_overlap(m - 2 * k, n, 0.0, lim);
        s += D / (std::pow(2.0, k) * factorial_d(k) * factorial_d(m - 2 * k));
      }
      map.C(m, n) =
          std::pow(eps, m - 1) * (2.0 * M_PI * factorial_d(m) / factorial_d(n)) * s;
    }
  }
  return map;
}

HermiteCondReport hermite_conditioning_report(const std::vector<double>& eps_list, int M,
                                              int Nh, double delta, std::uint64_t seed) {
  HermiteCondReport rep;
  // synthetic H^2-smooth coefficient truth: algebraic decay
  Eigen::VectorXd sigma_true(Nh + 1);
  for (int n = 0; n <= Nh; ++n) sigma_true[n] = 1.0 / ((1.0 + n) * (1.0 + n));

  for (double eps : eps_list) {
    const HermiteMap map = hermite_map(eps, M, Nh);
    HermiteCondRow row;
    row.eps = eps;
    for (int m = 0; m <= M; ++m) row.row_norms.push_back(map.C.row(m).norm());

    const Eigen::VectorXd xi = map.C * sigma_true;
    Eigen::VectorXd xin = xi;
    SplitMix64 rng(mix_seed(seed, 0x4e24));
    for (Eigen::Index r = 0; r < xin.size(); ++r) xin[r] += rng.next_symmetric(delta);
    // truncated pseudo-inverse; the small singular values carry the eps^{m-1} rows
    const inversion::SvdResult dec = inversion::svd(map.C);
    Eigen::VectorXd shat = Eigen::VectorXd::Zero(Nh + 1);
    for (Eigen::Index j = 0; j < dec.sv.size(); ++j) {
      if (dec.sv[j] <= 1e-14 * dec.lambda_max()) continue;
      shat += dec.U.col(j).dot(xin) / dec.sv[j] * dec.V.col(j);
    }
    row.coeff_err = (shat - sigma_true).cwiseAbs().maxCoeff();
    rep.rows.push_back(row);
  }

  if (rep.rows.size() >= 2) {
    for (int m = 0; m <= M; ++m) {
      std::vector<double> xs, ys;
      for (const auto& r : rep.rows) {
        xs.push_back(r.eps);
        ys.push_back(r.row_norms[m]);
      }
      rep.row_norm_slopes.push_back(inversion::loglog_slope(xs, ys));
    }
  }
  return rep;
}

int recoverable_terms(double delta, double eps) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("recoverable_terms: delta in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("recoverable_terms: eps in (0,1)");
  const double ratio = std::log(delta) / std::log(eps);
  return static_cast<int>(std::floor(ratio + 1e-9)) + 1;
}

double full_recovery_error(int k, double delta, double eps) {
  if (k < 1) throw std::invalid_argument("full_recovery_error: k >= 1");
  return std::pow(std::log(eps) / std::log(delta), k);
}

}  // namespace rtlab::moments

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rtlab/peaked.hpp"

namespace rtlab::moments {

// Product rule on S^2: Gauss-Legendre in v3, uniform in the azimuth, total
// weight 4*pi; exact for spherical polynomials up to the stated band limit.
struct SphereQuadrature {
  struct Node {
    std::array<double, 3> v;
    double weight;
  };
  std::vector<Node> nodes;
  int band = 0;
};

SphereQuadrature sphere_quadrature(int band);

// Real orthonormal spherical harmonic Y_{n,m}, -n <= m <= n.
double real_sph_harmonic(int n, int m, const std::array<double, 3>& v);

// Band-limited expansion sum_{n<=band} sum_m c_{n,m} Y_{n,m}(v).
struct HarmonicExpansion {
  int band = 0;
  std::vector<double> coeff;  // packed (n,m) -> n*n + (m+n)

  static int index(int n, int m) { return n * n + m + n; }
  double eval(const std::array<double, 3>& v) const;
};

// gamma(v, v') = sum_r G_r(v) F_r(v') - d(v); the diagonal term d carries the
// -int g f0 structure and is constant in v'.
struct ManufacturedGamma {
  std::vector<std::pair<HarmonicExpansion, HarmonicExpansion>> separable;
  std::optional<HarmonicExpansion> diagonal;
  int band = 0;

  double eval(const std::array<double, 3>& v, const std::array<double, 3>& vp) const;
};

ManufacturedGamma random_gamma(int band, int terms, bool with_diagonal, std::uint64_t seed);

// int_{S2 x S2} P_n(v.v') gamma(v,v') dv dv' by two routes: (a) direct double
// quadrature, (b) addition formula in coefficient space with the diagonal
// contributing only at n=0.
struct ProjectionPaths {
  double direct = 0.0;    // (a)
  double addition = 0.0;  // (b)
};
ProjectionPaths legendre_projection_paths(const ManufacturedGamma& gamma, int n,
                                          const SphereQuadrature& quad);

// Returns (b); throws numerical_breakdown if the routes disagree beyond 1e-6.
double legendre_projection(const ManufacturedGamma& gamma, int n, const SphereQuadrature& quad);

struct XiSystem {
  Eigen::MatrixXd A;   // columns j = 1..J
  Eigen::VectorXd a0;  // the known-xi0 column, moved to the data side
};

XiSystem assemble_xi_system(const std::vector<ManufacturedGamma>& experiments, int J, int band,
                            const SphereQuadrature& quad);

struct XiSolve {
  Eigen::VectorXd xi_hat;
  Eigen::VectorXd error_bars;  // per-component std over redraws
};

XiSolve solve_xi(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double delta,
                 std::uint64_t seed);

// eps * sum_k (-1)^k h_k^{(N)}(mu) xi_k with
// h_k^{(N)}(mu) = sum_{n=k}^N (2n+1)/(4pi) P_n(mu) P_n^{(k)}(1) / k!.
// The alternating sign is the Taylor expansion of P_n(1 - eps*alpha).
std::vector<double> reconstruct_rescaled_kernel(const std::vector<double>& xi, double eps,
                                                int N, const std::vector<double>& mu_nodes);

struct KappaEpsRow {
  double eps = 0.0;
  double kappa = 0.0;           // median over noise draws
  double kappa_over_deps = 0.0; // kappa / (delta * eps)
  double xi1_err_max = 0.0;
  double recon_true_sup = 0.0;
  double analytic_sup = 0.0;    // sup of (1/eps) sigma((1-mu)/eps) = sigma(0)/eps
};

struct KappaEpsTable {
  std::vector<KappaEpsRow> rows;
  int draws = 0;
};

KappaEpsTable kappa_epsilon(peaked::Profile profile, const std::vector<double>& eps_list,
                            double delta, int N, std::uint64_t seed);

// Probabilists' Hermite polynomials p_n: p0 = 1, p1 = x, p_{n+1} = x p_n - n p_{n-1}.
std::vector<double> hermite_basis(int n, const std::vector<double>& x_nodes);

// int_lo^hi p_a(v) p_n(v) exp(-v^2/2) dv
double hermite_overlap(int a, int n, double lo, double hi);

struct HermiteMap {
  Eigen::MatrixXd C;  // (M+1) x (Nh+1); row m scales like eps^{m-1}
  int M = 0, Nh = 0;
  double eps = 0.0;
};

HermiteMap hermite_map(double eps, int M, int Nh);

struct HermiteCondRow {
  double eps = 0.0;
  std::vector<double> row_norms;  // ||C_m.|| for m = 0..M
  double coeff_err = 0.0;         // sup-norm error of recovered Hermite coefficients
};

struct HermiteCondReport {
  std::vector<HermiteCondRow> rows;
  std::vector<double> row_norm_slopes;  // fit of log||C_m.|| vs log eps, per m
};

HermiteCondReport hermite_conditioning_report(const std::vector<double>& eps_list, int M,
                                              int Nh, double delta, std::uint64_t seed);

// n0 = floor(log delta / log eps) + 1 (exact ratios resolved upward within 1e-9)
int recoverable_terms(double delta, double eps);

// (ln eps / ln delta)^k
double full_recovery_error(int k, double delta, double eps);

}  // namespace rtlab::moments

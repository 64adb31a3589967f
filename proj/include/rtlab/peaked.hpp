#pragma once

#include <string>
#include <vector>

namespace rtlab::peaked {

// Analytic base profiles sigma(alpha) on [0, inf); the compact bump is the
// standard mollifier supported on [0, 1).
enum class Profile { exponential, gaussian, compact_bump };

Profile profile_from_name(const std::string& name);
std::string profile_name(Profile p);
double profile_value(Profile p, double alpha);

// Forward-peaked kernel sigma((1-mu)/eps)/eps^2 with the profile normalized so
// that 2*pi * int_0^{2/eps} sigma(alpha) d alpha = 1.
struct PeakedKernel {
  Profile profile = Profile::exponential;
  double eps = 0.1;
  double norm_const = 1.0;

  double sigma(double alpha) const { return norm_const * profile_value(profile, alpha); }
  // upper integration limit in the alpha variable
  double alpha_max() const;
};

PeakedKernel normalize_kernel(Profile profile, double eps);

// sigma_n = 2*pi int_0^{2/eps} sigma(alpha) P_n(1 - eps*alpha) d alpha;
// sigma_n[0] = 1 by normalization.
struct LegendreCoeffs {
  std::vector<double> sigma_n;
};
LegendreCoeffs legendre_moments(const PeakedKernel& k, int N);

// xi[n] = eps^{n-1} * 2*pi int_0^{2/eps} t^n sigma(t) dt for n >= 1.
// xi[0] is the declared constant 2*pi/eps ("fixed and has no dependence");
// the value consistent with the unit normalization is xi[0]/(2*pi) = 1/eps,
// exposed as xi0_mass().
struct MomentVector {
  std::vector<double> xi;
  double eps = 0.0;
  double xi1() const { return xi.at(1); }
  double xi0_mass() const { return 1.0 / eps; }
};
MomentVector xi_moments(const PeakedKernel& k, int N);

// lambda_n = (sigma_n - sigma_0)/eps
std::vector<double> collision_eigenvalues(const LegendreCoeffs& c, double eps);

// lambda_n^FP = -n(n+1) * xi1 / 2
std::vector<double> fp_eigenvalues(double xi1, int N);

struct FpConvergenceRow {
  double eps = 0.0;
  double E = 0.0;   // max_{1<=n<=N} |lambda_n - lambda_n^FP| / (n(n+1)/2)
  int argmax_n = 0;
};
struct FpConvergenceTable {
  std::vector<FpConvergenceRow> rows;
  bool order_defined = false;
  double fitted_order = 0.0;
};
FpConvergenceTable fp_convergence_report(Profile profile, const std::vector<double>& eps_list,
                                         int N);

// Legendre polynomial and its derivatives at 1 by the exact rational
// recurrence P_n^{(j)}(1) = (n(n+1) - j(j-1)) / (2j) * P_n^{(j-1)}(1).
double legendre_P(int n, double x);
double legendre_deriv_at_one(int n, int j);

}  // namespace rtlab::peaked

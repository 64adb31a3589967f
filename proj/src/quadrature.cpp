#include "rtlab/quadrature.hpp"

#include <cmath>

#include "rtlab/errors.hpp"

namespace rtlab {
namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

double gauss15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 15; ++i) s += kWeights[i] * f(c + h * kNodes[i]);
  return s * h;
}

double recurse(const std::function<double(double)>& f, double a, double b, double whole,
               double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss15(f, a, m);
  const double right = gauss15(f, m, b);
  const double err = std::abs(left + right - whole);
  if (err <= tol || b - a < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) return left + right;
  if (depth <= 0)
    throw numerical_breakdown("adaptive_integrate: panel refinement exhausted; residual " +
                              std::to_string(err));
  return recurse(f, a, m, left, 0.5 * tol, depth - 1) +
         recurse(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return recurse(f, a, b, gauss15(f, a, b), abs_tol, max_depth);
}

}  // namespace rtlab

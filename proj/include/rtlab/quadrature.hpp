#pragma once

#include <functional>

namespace rtlab {

// Adaptive panel integration with a fixed 15-point Gauss-Legendre rule per
// panel and bisection refinement until the absolute panel tolerance is met.
// The integrand must be smooth inside (a, b); kinks belong on panel edges.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int max_depth = 48);

}  // namespace rtlab

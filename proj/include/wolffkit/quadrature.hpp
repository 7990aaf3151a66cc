#pragma once

#include <functional>
#include <span>
#include <vector>

namespace wolffkit {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule with k points, 1 <= k <= 64.
const GaussRule& gauss_legendre(int k);

/// Fixed-order Gauss-Legendre integral of f over [a, b].
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int k = 10);

/// Adaptive double-exponential quadrature on a finite interval; tolerates
/// integrable endpoint singularities.
double integrate_finite(const std::function<double(double)>& f, double a, double b, double tol,
                        double* error = nullptr);

struct LogGridIntegral {
  double value = 0.0;
  double err = 0.0;
};

/// Integrates g(rho) d(rho)/rho over [a, b] with a composite Gauss rule on a
/// logarithmic grid. Panels never straddle a breakpoint. The result is the
/// fine-grid value; `err` is its difference from the half-density grid.
LogGridIntegral integrate_log_grid(const std::function<double(double)>& g, double a, double b,
                                   std::span<const double> breakpoints, int points_per_decade,
                                   int order = 6);

struct SphereNode {
  std::vector<double> u;
  double weight = 0.0;
};

/// Product Gauss rule on the unit sphere S^{n-1} with m polar nodes per
/// angle (2m azimuthal nodes); weights sum to one.
std::vector<SphereNode> sphere_rule(int n, int m);

/// Logarithmically spaced values anchored at integer powers of ten.
std::vector<double> log_ladder(double lo, double hi, int per_decade);

}  // namespace wolffkit

#pragma once

#include <optional>
#include <span>
#include <string>

#include "wolffkit/measure.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

/// Discretization of the d(rho)/rho integrals. Unset bounds default to the
/// support geometry of the measure being integrated.
struct QuadratureConfig {
  std::optional<double> rho_min;
  std::optional<double> rho_max;
  int points_per_decade = 16;
  double tol = 1e-10;
  /// Use the log-grid path even where a closed form exists.
  bool force_quadrature = false;

  void validate() const;
};

enum class Method { exact_piecewise, quadrature };

std::string to_string(Method m);

struct PotentialEvaluation {
  double value = 0.0;
  double err_estimate = 0.0;
  Method method = Method::exact_piecewise;
  /// Upper bound; equals `value` except for fractional maximal functions
  /// evaluated on a grid.
  double upper = 0.0;
  /// Local power-law exponent of the integrand that triggered divergence.
  std::optional<double> divergence_exponent;

  bool divergent() const { return std::isinf(value); }
};

/// W_p mu(x) = int_0^inf (mu(B(x,rho)) / rho^(n-p))^(1/(p-1)) d(rho)/rho.
PotentialEvaluation wolff(const Measure& mu, std::span<const double> x, const SpaceParams& sp,
                          const QuadratureConfig& cfg = {});

/// The Wolff integral restricted to [R, inf).
PotentialEvaluation wolff_tail(const Measure& mu, std::span<const double> x, double R,
                               const SpaceParams& sp, const QuadratureConfig& cfg = {});

/// I_alpha mu(x) = int |x - y|^(alpha - n) dmu(y).
PotentialEvaluation riesz(const Measure& mu, std::span<const double> x, double alpha,
                          const QuadratureConfig& cfg = {});

/// int |x - y|^(-s) dmu(y) for any s > 0.
PotentialEvaluation kernel_integral(const Measure& mu, std::span<const double> x, double s,
                                    const QuadratureConfig& cfg = {});

/// M_alpha mu(x) = sup_r mu(B(x,r)) / r^(n - alpha) over closed balls.
PotentialEvaluation frac_maximal(const Measure& mu, std::span<const double> x, double alpha,
                                 const QuadratureConfig& cfg = {});

/// int_a^inf mu(B(x,rho))^theta rho^(-lambda) d(rho)/rho. Every potential in
/// this header is an instance.
PotentialEvaluation layer_integral(const Measure& mu, std::span<const double> x, double a,
                                   double theta, double lambda, const QuadratureConfig& cfg = {});

}  // namespace wolffkit

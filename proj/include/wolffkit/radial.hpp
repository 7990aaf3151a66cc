#pragma once

#include <functional>
#include <vector>

#include "wolffkit/measure.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

/// u(x) = f(|x|) for a nonnegative nonincreasing profile f.
///
/// Exact profiles carry |f'| as a callable and integrate it between knots on
/// demand; sampled profiles interpolate monotone cubics in log r. Beyond the
/// last knot both follow the power law coeff * r^exponent.
class RadialFunction {
 public:
  using Profile = std::function<double(double)>;

  struct PowerLaw {
    double coeff = 0.0;
    double exponent = 0.0;
  };

  RadialFunction() = default;

  /// `values[i]` = f(knots[i]); `gradient` = |f'|, smooth between knots.
  /// An empty knot list means f follows the tail law on (0, inf).
  static RadialFunction exact(int dim, Profile gradient, std::vector<double> knots, std::vector<double> values,
                              PowerLaw tail);
  static RadialFunction sampled(int dim, std::vector<double> knots, std::vector<double> values);

  int dim() const { return dim_; }
  double value(double r) const;
  double operator()(std::span<const double> x) const { return value(norm(x)); }
  /// |f'(r)|.
  double gradient(double r) const;
  bool has_exact_gradient() const { return static_cast<bool>(gradient_); }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  const PowerLaw& tail() const { return tail_; }
  /// Radius where the tail law starts (0 when the profile is a pure power).
  double tail_start() const { return knots_.empty() ? 0.0 : knots_.back(); }

 private:
  double integrate_gradient(double a, double b) const;
  double sampled_value(double r) const;

  int dim_ = 0;
  Profile gradient_;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  PowerLaw tail_;
};

struct RadialSolveConfig {
  int points_per_decade = 24;
};

/// Decaying radial solution of -Delta_p u = mu:
/// u(r) = int_r^inf (mu(B(0,s)) / (omega s^(n-1)))^(1/(p-1)) ds.
/// Throws std::invalid_argument for non-radial mu and std::domain_error when
/// the integral diverges at infinity.
RadialFunction radial_solve(const Measure& mu, const SpaceParams& sp, const RadialSolveConfig& cfg = {});

/// mu(B(0, r)) for a radial measure.
double radial_mass(const Measure& mu, double r);

/// Radii where r -> mu(B(0, r)) changes formula, for a radial measure.
std::vector<double> radial_breakpoints(const Measure& mu);

/// int_a^b f(r) dr with f smooth between the given knots; uses Gauss panels
/// in log r and handles a = 0 through a power-law head.
double integrate_radial(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& knots);

}  // namespace wolffkit

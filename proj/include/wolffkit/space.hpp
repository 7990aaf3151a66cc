#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wolffkit {

using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Surface area of the unit (n-1)-sphere in R^n.
double sphere_area(int n);
/// Lebesgue measure of the unit ball in R^n.
double unit_ball_volume(int n);

/// Dimension and exponents shared by every potential-theoretic quantity.
///
/// Construction validates 1 < p < n and q > 0; the derived constants are
/// computed once.
class SpaceParams {
 public:
  SpaceParams(int n, double p, std::optional<double> q = std::nullopt);

  int n() const { return n_; }
  double p() const { return p_; }
  bool has_q() const { return q_.has_value(); }
  double q() const;
  double omega() const { return omega_; }

  /// Conjugate exponent p/(p-1).
  double p_conjugate() const { return p_ / (p_ - 1.0); }
  /// (n-p)/(p-1): decay exponent of the fundamental solution.
  double beta() const { return (n_ - p_) / (p_ - 1.0); }
  /// q(p-1)/(p-1-q), the exponent applied to kappa in the sub-natural regime.
  double kappa_exponent() const;

  SpaceParams with_q(double q) const { return SpaceParams(n_, p_, q); }

 private:
  int n_;
  double p_;
  std::optional<double> q_;
  double omega_;
};

struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r);

  Ball doubled() const { return Ball(center, 2.0 * radius); }
  bool contains(std::span<const double> x) const;
  /// True when this ball contains the whole of `other`.
  bool contains(const Ball& other) const;
  bool disjoint(const Ball& other) const;
};

/// Fraction of the unit sphere S^{n-1} with u . e >= t.
double cap_fraction(int n, double t);

/// Fraction of the sphere |y| = x inside a ball of radius R whose center is
/// at distance d from the origin. Stable when R is tiny next to d.
double sphere_fraction_in_ball(int n, double x, double d, double R);

/// Fraction of S^{n-1} lying in both caps {u.e1 >= t1} and {u.e2 >= t2},
/// where cos_angle = e1 . e2.
double double_cap_fraction(int n, double t1, double t2, double cos_angle);

/// Volume of B(0, r1) intersected with B(d e, r2).
double ball_intersection_volume(int n, double r1, double r2, double d);

}  // namespace wolffkit

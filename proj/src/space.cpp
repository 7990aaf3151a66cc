#include "wolffkit/space.hpp"

#include <algorithm>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of sin^m over [0, theta].
double sin_power_integral(int m, double theta) {
  if (theta <= 0.0) return 0.0;
  if (theta < 0.5) {
    return gauss_integrate([m](double x) { return std::pow(std::sin(x), m); }, 0.0, theta, 12);
  }
  double s = std::sin(theta), c = std::cos(theta);
  double even = theta, odd = 1.0 - c;
  double prev = (m % 2 == 0) ? even : odd;
  for (int k = (m % 2 == 0) ? 2 : 3; k <= m; k += 2) {
    prev = -std::pow(s, k - 1) * c / k + (k - 1.0) / k * prev;
  }
  return prev;
}

double sin_power_total(int m) {
  double v = (m % 2 == 0) ? kPi : 2.0;
  for (int k = (m % 2 == 0) ? 2 : 3; k <= m; k += 2) v *= (k - 1.0) / k;
  return v;
}

// Cap of height h; hc = 2 radius - h is passed separately so that neither
// has to be recovered by subtraction.
double cap_volume(int n, double radius, double h, double hc) {
  double full = unit_ball_volume(n) * std::pow(radius, n);
  if (h <= 0.0) return 0.0;
  if (hc <= 0.0) return full;
  double x = std::clamp(h * hc / (radius * radius), 0.0, 1.0);
  double small = 0.5 * full * boost::math::ibeta(0.5 * (n + 1), 0.5, x);
  return h <= hc ? small : full - small;
}

// Angle theta in [0, pi] with cos theta = (x^2 + d^2 - R^2) / (2 x d).
double cap_angle(double x, double d, double R) {
  double below = (R - x + d) * (R + x - d) / (2.0 * x * d);  // 1 - cos
  double above = (x + d - R) * (x + d + R) / (2.0 * x * d);  // 1 + cos
  if (below <= 0.0) return 0.0;
  if (above <= 0.0) return kPi;
  return below <= above ? 2.0 * std::asin(std::sqrt(std::min(1.0, 0.5 * below)))
                        : kPi - 2.0 * std::asin(std::sqrt(std::min(1.0, 0.5 * above)));
}

// Length of [a0, a1] intersected with [b0, b1].
double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

double unit_ball_volume(int n) { return sphere_area(n) / n; }

SpaceParams::SpaceParams(int n, double p, std::optional<double> q) : n_(n), p_(p), q_(q) {
  if (n < 2) throw std::invalid_argument("SpaceParams: dimension n must be >= 2");
  if (!(p > 1.0 && p < n)) throw std::invalid_argument("SpaceParams: need 1 < p < n");
  if (q && !(*q > 0.0)) throw std::invalid_argument("SpaceParams: q must be positive");
  omega_ = sphere_area(n);
}

double SpaceParams::q() const {
  if (!q_) throw std::invalid_argument("SpaceParams: q is required for this operation");
  return *q_;
}

double SpaceParams::kappa_exponent() const {
  double qq = q();
  if (!(qq < p_ - 1.0)) throw std::invalid_argument("kappa exponent needs 0 < q < p - 1");
  return qq * (p_ - 1.0) / (p_ - 1.0 - qq);
}

Ball::Ball(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
}

bool Ball::contains(std::span<const double> x) const { return distance(center, x) <= radius; }

bool Ball::contains(const Ball& other) const {
  return distance(center, other.center) + other.radius <= radius;
}

bool Ball::disjoint(const Ball& other) const {
  return distance(center, other.center) >= radius + other.radius;
}

double cap_fraction(int n, double t) {
  if (n == 1) return 0.5 * ((t <= 1.0 ? 1.0 : 0.0) + (t <= -1.0 ? 1.0 : 0.0));
  if (t <= -1.0) return 1.0;
  if (t >= 1.0) return 0.0;
  if (n == 2) return std::acos(t) / kPi;
  if (n == 3) return 0.5 * (1.0 - t);
  return sin_power_integral(n - 2, std::acos(t)) / sin_power_total(n - 2);
}

double sphere_fraction_in_ball(int n, double x, double d, double R) {
  if (d == 0.0) return x <= R ? 1.0 : 0.0;
  if (x >= d + R) return 0.0;
  if (x <= R - d) return 1.0;
  if (x <= d - R) return 0.0;
  double theta = cap_angle(x, d, R);
  if (n == 2) return theta / kPi;
  if (n == 3) return 0.5 * (R - x + d) * (R + x - d) / (2.0 * x * d);
  return sin_power_integral(n - 2, theta) / sin_power_total(n - 2);
}

double double_cap_fraction(int n, double t1, double t2, double cos_angle) {
  if (t1 >= 1.0 || t2 >= 1.0) return 0.0;
  if (t1 <= -1.0) return cap_fraction(n, t2);
  if (t2 <= -1.0) return cap_fraction(n, t1);
  double th1 = std::acos(t1), th2 = std::acos(t2);
  double beta = std::acos(std::clamp(cos_angle, -1.0, 1.0));
  if (th1 + th2 <= beta) return 0.0;
  if (beta + th2 <= th1) return cap_fraction(n, t2);
  if (beta + th1 <= th2) return cap_fraction(n, t1);
  if ((kPi - th1) + (kPi - th2) <= beta) return cap_fraction(n, t1) + cap_fraction(n, t2) - 1.0;

  if (n == 2) {
    double len = 0.0;
    for (int k = -1; k <= 1; ++k) {
      len += overlap(-th1, th1, beta - th2 + 2.0 * kPi * k, beta + th2 + 2.0 * kPi * k);
    }
    return len / (2.0 * kPi);
  }

  double sb = std::sin(beta), cb = std::cos(beta);
  auto inner = [&](double th) {
    double s = std::sin(th);
    if (s <= 0.0) return 0.0;
    double tau = (t2 - std::cos(th) * cb) / (s * sb);
    return std::pow(s, n - 2) * cap_fraction(n - 1, tau);
  };
  std::vector<double> cuts{0.0, th1};
  for (double c : {beta - th2, beta + th2, th2 - beta, 2.0 * kPi - th2 - beta}) {
    if (c > 0.0 && c < th1) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] > 1e-15) total += integrate_finite(inner, cuts[i], cuts[i + 1], 1e-12);
  }
  return total / sin_power_total(n - 2);
}

double ball_intersection_volume(int n, double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  double rmin = std::min(r1, r2), rmax = std::max(r1, r2);
  if (d + rmin <= rmax) return unit_ball_volume(n) * std::pow(rmin, n);
  double h1 = (r2 + r1 - d) * (r2 - r1 + d) / (2.0 * d);
  double h1c = (d + r1 - r2) * (d + r1 + r2) / (2.0 * d);
  double h2 = (r1 + r2 - d) * (r1 - r2 + d) / (2.0 * d);
  double h2c = (d + r2 - r1) * (d + r2 + r1) / (2.0 * d);
  return cap_volume(n, r1, h1, h1c) + cap_volume(n, r2, h2, h2c);
}

}  // namespace wolffkit

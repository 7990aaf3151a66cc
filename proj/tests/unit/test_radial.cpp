#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/radial.hpp"

using namespace wolffkit;
using doctest::Approx;

namespace {

Measure inverse_square() { return Measure::radial_density(3, {{1.0, -2.0, 0.0, 1.0}}); }

// u(r) = int_r^inf (m(s) / (omega s^(n-1)))^(1/(p-1)) ds by Simpson in log s,
// with the far tail added in closed form for compactly supported mass.
double solution_simpson(const std::function<double(double)>& m, double total, int n, double p, double r) {
  double omega = oracle::sphere_area(n), theta = 1.0 / (p - 1.0);
  double top = 1e6;
  double body = oracle::simpson_log([&](double s) { return std::pow(m(s) / (omega * std::pow(s, n - 1.0)), theta); }, r,
                                    top, 60000);
  double e = -(n - 1.0) * theta + 1.0;
  return body + std::pow(total / omega, theta) * std::pow(top, e) / -e;
}

}  // namespace

TEST_CASE("radial solve of a Dirac mass") {
  SpaceParams sp(3, 2.0);
  RadialFunction u = radial_solve(Measure::dirac({0, 0, 0}), sp);
  CHECK(u.value(1.0) == Approx(0.0795775).epsilon(1e-6));
  for (double r : {1e-3, 0.1, 2.0, 50.0}) {
    CHECK(u.value(r) == Approx(1.0 / (4.0 * oracle::pi * r)).epsilon(1e-12));
    CHECK(u.gradient(r) == Approx(1.0 / (4.0 * oracle::pi * r * r)).epsilon(1e-12));
  }
  SpaceParams sp25(3, 2.5);
  RadialFunction v = radial_solve(Measure::dirac({0, 0, 0}, 2.0), sp25);
  for (double r : {0.1, 1.0, 7.0}) {
    double ref = solution_simpson([](double) { return 2.0; }, 2.0, 3, 2.5, r);
    CHECK(v.value(r) == Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("radial solve of zero") {
  RadialFunction u = radial_solve(Measure::zero(3), SpaceParams(3, 2.0));
  for (double r : {1e-3, 1.0, 1e3}) CHECK(u.value(r) == 0.0);
}

TEST_CASE("radial solve of the inverse square density") {
  SpaceParams sp(3, 2.0);
  RadialFunction u = radial_solve(inverse_square(), sp);
  CHECK(u.value(0.1) == Approx(3.302585).epsilon(1e-6));
  auto m = [](double s) { return 4.0 * oracle::pi * std::min(s, 1.0); };
  for (double r : {1e-4, 0.1, 0.5, 1.0, 2.0, 30.0}) {
    double closed = r <= 1.0 ? std::log(1.0 / r) + 1.0 : 1.0 / r;
    CHECK(u.value(r) == Approx(closed).epsilon(1e-10));
    CHECK(solution_simpson(m, 4.0 * oracle::pi, 3, 2.0, r) == Approx(closed).epsilon(1e-6));
  }
  SpaceParams sp15(2, 1.5);
  Measure mu2 = Measure::radial_density(2, {{1.0, -1.5, 0.0, 0.5}});
  RadialFunction w = radial_solve(mu2, sp15);
  // m(s) = 2 pi * 2 min(s, 0.5)^(1/2).
  auto m2 = [](double s) { return 4.0 * oracle::pi * std::sqrt(std::min(s, 0.5)); };
  for (double r : {0.01, 0.3, 0.5, 2.0}) CHECK(w.value(r) == Approx(solution_simpson(m2, m2(1.0), 2, 1.5, r)).epsilon(1e-6));
}

TEST_CASE("radial solve errors") {
  SpaceParams sp(3, 2.0);
  CHECK_THROWS_AS(radial_solve(Measure::dirac({0.5, 0, 0}), sp), std::invalid_argument);
  CHECK_THROWS_AS(radial_solve(Measure::radial_density(3, {{1.0, -2.0, 0.0, kInf}}), sp), std::domain_error);
}

TEST_CASE("distributional identity at the knots") {
  struct Case {
    Measure mu;
    SpaceParams sp;
  };
  std::vector<Case> cases{
      {inverse_square(), SpaceParams(3, 2.0)},
      {Measure::radial_density(3, {{0.5, -1.0, 0.0, 0.3}, {2.0, 0.5, 0.3, 1.2}}), SpaceParams(3, 2.5)},
      {Measure::sum(3, {Measure::dirac({0, 0, 0}), Measure::lebesgue_ball({0, 0, 0}, 2.0)}), SpaceParams(3, 1.7)},
      {Measure::radial_density(2, {{1.0, -1.5, 0.0, 0.5}}), SpaceParams(2, 1.5)},
  };
  for (const Case& c : cases) {
    RadialFunction u = radial_solve(c.mu, c.sp);
    const int n = c.sp.n();
    for (double r : u.knots()) {
      double lhs = c.sp.omega() * std::pow(r, n - 1.0) * std::pow(u.gradient(r), c.sp.p() - 1.0);
      CHECK(lhs == Approx(radial_mass(c.mu, r)).epsilon(1e-10));
    }
  }
}

TEST_CASE("solution is comparable to the Wolff potential") {
  SpaceParams sp(3, 2.0);
  RadialFunction d = radial_solve(Measure::dirac({0, 0, 0}), sp);
  for (double r = 1e-3; r < 1e3; r *= 1.7) {
    double w = wolff(Measure::dirac({0, 0, 0}), Point{r, 0, 0}, sp).value;
    CHECK(d.value(r) / w == Approx(1.0 / (4.0 * oracle::pi)).epsilon(1e-8));
  }
  SpaceParams sp25(3, 2.5);
  Measure mu = Measure::radial_density(3, {{0.5, -1.0, 0.0, 0.3}, {2.0, 0.5, 0.3, 1.2}});
  RadialFunction u = radial_solve(mu, sp25);
  double lo = kInf, hi = 0.0;
  for (double r = 1e-3; r < 1e3; r *= 1.5) {
    double ratio = u.value(r) / wolff(mu, Point{r, 0, 0}, sp25).value;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(lo > 0.0);
  CHECK(std::isfinite(hi));
}

TEST_CASE("solutions are nonincreasing and vanish at infinity") {
  SpaceParams sp(3, 2.5);
  RadialFunction u = radial_solve(Measure::radial_density(3, {{0.5, -1.0, 0.0, 0.3}, {2.0, 0.5, 0.3, 1.2}}), sp);
  double prev = kInf;
  for (double r = 1e-4; r < 1e6; r *= 1.3) {
    double v = u.value(r);
    CHECK(v >= 0.0);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(u.value(1e12) < 1e-3);
}

TEST_CASE("scaled gradient integrals decay") {
  // n = 3, p = 2, inverse square on B(0,1): |u'| = 1/r inside, 1/r^2 outside.
  SpaceParams sp(3, 2.0);
  RadialFunction u = radial_solve(inverse_square(), sp);
  const double q = 1.5;
  double prev = kInf;
  for (int j = 3; j <= 8; ++j) {
    double R = std::ldexp(1.0, j);
    double in = oracle::simpson_log([&](double r) { return std::pow(u.gradient(r), q) * r * r; }, 1e-9, 1.0, 4000);
    double out = oracle::simpson_log([&](double r) { return std::pow(u.gradient(r), q) * r * r; }, 1.0, R, 4000);
    double val = std::pow(R, q - 3.0) * 4.0 * oracle::pi * (in + out);
    CHECK(val < prev);
    prev = val;
  }
}

TEST_CASE("sampled profiles interpolate monotonically") {
  std::vector<double> knots{0.1, 0.2, 0.5, 1.0, 3.0}, vals{5.0, 4.0, 1.0, 0.9, 0.1};
  RadialFunction f = RadialFunction::sampled(3, knots, vals);
  for (std::size_t i = 0; i < knots.size(); ++i) CHECK(f.value(knots[i]) == Approx(vals[i]));
  double prev = kInf;
  for (double r = 0.1; r < 10.0; r *= 1.01) {
    CHECK(f.value(r) <= prev + 1e-12);
    prev = f.value(r);
  }
}

TEST_CASE("integrate_radial") {
  auto f = [](double r) { return std::pow(r, -0.5) * (r < 1.0 ? 1.0 : 2.0); };
  double ref = 2.0 + 2.0 * 2.0 * (std::sqrt(4.0) - 1.0);
  CHECK(integrate_radial(f, 0.0, 4.0, {1.0}) == Approx(ref).epsilon(1e-10));
}

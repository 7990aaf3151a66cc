#include <doctest.h>

#include <cmath>
#include <random>

#include "wolffkit/grid.hpp"

using namespace wolffkit;
using doctest::Approx;

namespace {

Measure inverse_power_2d() { return Measure::radial_density(2, {{1.0, -1.5, 0.0, 0.5}}); }

}  // namespace

TEST_CASE("grid function layout") {
  GridFunction g(2, 1.0, 0.25);
  CHECK(g.per_axis() == 9);
  CHECK(g.size() == 81);
  std::vector<int> mid{4, 4};
  Point c = g.node(g.index_of(mid));
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.0);
  std::size_t boundary = 0;
  for (std::size_t i = 0; i < g.size(); ++i) boundary += g.on_boundary(i);
  CHECK(boundary == 32);
}

TEST_CASE("zero data gives the zero solution") {
  GridFunction u = grid_solve(Measure::zero(2), 1.0, 0.125, SpaceParams(2, 1.5));
  for (double v : u.values()) CHECK(v == 0.0);
  SweepReport sw = expanding_domain_sweep(Measure::zero(2), {1.0, 2.0}, 0.25, SpaceParams(2, 1.5));
  REQUIRE(sw.changes.size() == 1);
  CHECK(sw.changes[0] == 0.0);
}

TEST_CASE("loads carry the measure") {
  GridProblem atom(Measure::dirac({0.01, -0.02}, 2.0), 1.0, 0.125, SpaceParams(2, 1.5));
  double total = 0.0;
  int nonzero = 0;
  for (double l : atom.loads()) total += l, nonzero += l != 0.0;
  CHECK(total == Approx(2.0));
  CHECK(nonzero == 1);
  GridProblem dens(inverse_power_2d(), 1.0, 0.0625, SpaceParams(2, 1.5));
  double mass = 0.0;
  for (double l : dens.loads()) mass += l;
  // 2 pi int_0^0.5 r^(-1/2) dr = 4 pi sqrt(0.5).
  CHECK(mass == Approx(4.0 * M_PI * std::sqrt(0.5)).epsilon(1e-3));
}

TEST_CASE("atom solution follows the fundamental exponent") {
  SpaceParams sp(2, 1.5);
  GridFunction u = grid_solve(Measure::dirac({0, 0}), 1.0, 1.0 / 64, sp);
  CHECK(u.converged);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.on_boundary(i)) CHECK(u.values()[i] == 0.0);
  }
  // Along the axis u ~ A r^(-s) + B; three geometric radii eliminate A and B.
  double a = u(Point{8.0 / 64, 0}), b = u(Point{12.0 / 64, 0}), c = u(Point{18.0 / 64, 0});
  double s = std::log((a - b) / (b - c)) / std::log(1.5);
  CHECK(s == Approx(1.0).epsilon(0.1));
  PowerFit fit = fit_power_law(u, 0.1, 0.3);
  CHECK(fit.exponent == Approx(1.0).epsilon(0.1));
  CHECK(fit.samples > 100);
}

TEST_CASE("energy decreases and the minimizer is stationary") {
  SpaceParams sp(2, 1.5);
  Measure mu = Measure::dirac({0.1, 0.05});
  GridProblem pb(mu, 1.0, 1.0 / 16, sp);
  GridFunction u = grid_solve(mu, 1.0, 1.0 / 16, sp);
  REQUIRE(u.energy_history.size() >= 2);
  for (std::size_t i = 1; i < u.energy_history.size(); ++i) CHECK(u.energy_history[i] <= u.energy_history[i - 1]);
  CHECK(pb.energy(u.values()) == Approx(u.energy_history.back()).epsilon(1e-12));

  std::mt19937_64 g(7);
  std::normal_distribution<double> nd;
  const double eps = 1e-6, e0 = pb.energy(u.values());
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> d(u.size(), 0.0), w = u.values();
    double norm = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (u.on_boundary(i)) continue;
      d[i] = nd(g);
      norm += d[i] * d[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d.size(); ++i) w[i] += eps * d[i] / norm;
    worst = std::min(worst, (pb.energy(w) - e0) / eps);
  }
  MESSAGE("most negative directional derivative: " << worst);
  CHECK(worst >= -1e-4 * std::abs(e0));
}

TEST_CASE("grid matches the radial solution") {
  SpaceParams sp(2, 1.5);
  Measure mu = inverse_power_2d();
  GridFunction u = grid_solve(mu, 1.0, 1.0 / 64, sp);
  RadialFunction f = radial_solve(mu, sp);
  RadialComparison cmp = compare_with_radial(u, f, 0.0);
  CHECK(cmp.sup_rel_error < 0.05);
  // Recompute the error on the half-box nodes with the reported shift.
  double err = 0.0, scale = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    Point x = u.node(i);
    if (std::max(std::abs(x[0]), std::abs(x[1])) > 0.5 + 1e-12) continue;
    double r = std::hypot(x[0], x[1]);
    if (r == 0.0) continue;
    double ref = f.value(r) - cmp.shift;
    err = std::max(err, std::abs(u.values()[i] - ref));
    scale = std::max(scale, std::abs(ref));
    ++count;
  }
  CHECK(count > 1000);
  CHECK(err / scale < 0.05);
}

TEST_CASE("expanding domains stabilize") {
  SpaceParams sp(2, 1.5);
  SweepReport sw = expanding_domain_sweep(inverse_power_2d(), {1.0, 2.0, 4.0}, 1.0 / 16, sp);
  REQUIRE(sw.changes.size() == 2);
  MESSAGE("changes: " << sw.changes[0] << " " << sw.changes[1]);
  CHECK(sw.changes[1] < sw.changes[0]);
  CHECK(sw.stabilizing);

  SweepReport atom = expanding_domain_sweep(Measure::dirac({0, 0}), {1.0, 2.0}, 0.125, sp);
  CHECK(atom.solutions.size() == 2);
}

TEST_CASE("grid rejects bad input") {
  CHECK_THROWS_AS(grid_solve(Measure::zero(2), 1.0, 0.0, SpaceParams(2, 1.5)), std::invalid_argument);
  CHECK_THROWS_AS(grid_solve(Measure::zero(4), 1.0, 0.25, SpaceParams(4, 2.0)), std::invalid_argument);
}

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wolffkit/measure.hpp"
#include "wolffkit/random_measures.hpp"

using namespace wolffkit;
using doctest::Approx;

namespace {

Measure inverse_square() { return Measure::radial_density(3, {{1.0, -2.0, 0.0, 1.0}}); }

}  // namespace

TEST_CASE("space params") {
  for (int n : {2, 3, 4, 7}) {
    SpaceParams sp(n, 1.5);
    CHECK(sp.omega() == Approx(oracle::sphere_area(n)).epsilon(1e-12));
  }
  SpaceParams sp(3, 2.5, 0.7);
  CHECK(sp.p_conjugate() == Approx(2.5 / 1.5));
  CHECK(sp.beta() == Approx(0.5 / 1.5));
  CHECK_THROWS_AS(SpaceParams(3, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceParams(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceParams(3, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("construction rejects invalid data") {
  CHECK_THROWS_AS(Measure::dirac({0, 0, 0}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Measure::radial_density(3, {{1.0, -3.0, 0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure::radial_density(3, {{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.5, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure::ball_cloud(3, {{{0, 0, 0}, 0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("ball mass examples") {
  CHECK(ball_mass(Measure::dirac({0, 0, 0}), Ball({0, 0, 0}, 1.0)) == 1.0);
  CHECK(ball_mass(inverse_square(), Ball({0, 0, 0}, 0.5)) == Approx(2.0 * oracle::pi).epsilon(1e-12));
  Measure two = Measure::dirac_sum(3, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 2.0}});
  CHECK(ball_mass(two, Ball({0.6, 0, 0}, 0.5)) == 2.0);
}

TEST_CASE("off-center radial mass matches Monte Carlo") {
  auto dens = [](double x, double y, double z) {
    double r2 = x * x + y * y + z * z;
    return r2 < 1.0 ? 1.0 / r2 : 0.0;
  };
  double exact_mc = oracle::mc_ball3(dens, 0.4, 0.1, 0.0, 0.5, 2000000);
  CHECK(ball_mass(inverse_square(), Ball({0.4, 0.1, 0.0}, 0.5), 1e-10) == Approx(exact_mc).epsilon(1e-2));
}

TEST_CASE("ball cloud overlap matches Monte Carlo") {
  Measure cloud = Measure::ball_cloud(3, {{{0.3, 0, 0}, 0.5, 2.0}});
  double v = oracle::ball_volume(3, 0.5);
  auto dens = [&](double x, double y, double z) {
    double d2 = (x - 0.3) * (x - 0.3) + y * y + z * z;
    return d2 <= 0.25 ? 2.0 / v : 0.0;
  };
  double mc = oracle::mc_ball3(dens, 0, 0.2, 0, 0.4, 2000000);
  CHECK(ball_mass(cloud, Ball({0, 0.2, 0}, 0.4)) == Approx(mc).epsilon(1e-2));
}

TEST_CASE("restrict") {
  CHECK(restrict(Measure::dirac({0, 0, 0}), Ball({5, 0, 0}, 1.0)).is_zero());
  Measure leb = Measure::lebesgue_ball({0, 0, 0}, 1.0);
  CHECK(total_mass(restrict(leb, Ball({0, 0, 0}, 2.0))) == Approx(4.0 * oracle::pi / 3.0).epsilon(1e-12));
  CHECK(total_mass(restrict(inverse_square(), Ball({0, 0, 0}, 0.5))) == Approx(2.0 * oracle::pi).epsilon(1e-10));
  Measure r = restrict(inverse_square(), Ball({0.5, 0, 0}, 0.5));
  for (double R : {0.1, 0.3, 0.7, 2.0}) {
    Ball q({0.2, 0.1, 0}, R);
    double direct = ball_mass(r, q, 1e-10);
    CHECK(direct <= ball_mass(inverse_square(), q, 1e-10) + 1e-9);
    CHECK(direct <= ball_mass(inverse_square(), Ball({0.5, 0, 0}, 0.5), 1e-10) + 1e-9);
  }
}

TEST_CASE("scale") {
  CHECK(ball_mass(scale(Measure::dirac({0, 0, 0}), 3.0), Ball({0, 0, 0}, 1.0)) == 3.0);
  Measure mu = inverse_square();
  Measure back = scale(scale(mu, 2.0), 0.5);
  for (double R : {0.1, 0.5, 1.0, 3.0}) {
    Ball b({0.3, 0, 0}, R);
    CHECK(ball_mass(back, b) == Approx(ball_mass(mu, b)).epsilon(1e-12));
  }
  CHECK(ball_mass(scale(mu, 10.0), Ball({0, 0, 0}, 0.5)) == Approx(20.0 * oracle::pi).epsilon(1e-12));
  CHECK_THROWS_AS(scale(mu, 0.0), std::invalid_argument);
}

TEST_CASE("mollify") {
  Measure d = Measure::dirac({0, 0, 0});
  CHECK(ball_mass(mollify(d, 2), Ball({0, 0, 0}, 0.5)) == Approx(1.0));
  CHECK(ball_mass(mollify(d, 2), Ball({0, 0, 0}, 0.25)) == Approx(0.125).epsilon(1e-12));
  MeasureSampler rng(3);
  for (int t = 0; t < 10; ++t) {
    Measure mu = rng.dirac_sum(3, 5);
    CHECK(total_mass(mollify(mu, 3)) == Approx(total_mass(mu)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(mollify(inverse_square(), 2), std::invalid_argument);
}

TEST_CASE("total mass") {
  CHECK(total_mass(Measure::dirac_sum(3, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 2.0}})) == 3.0);
  CHECK(total_mass(inverse_square()) == Approx(4.0 * oracle::pi).epsilon(1e-12));
  CHECK(std::isinf(total_mass(Measure::radial_density(3, {{1.0, 0.0, 0.0, kInf}}))));
}

TEST_CASE("ball mass is monotone in the radius") {
  MeasureSampler rng(11);
  for (int t = 0; t < 100; ++t) {
    Measure mu = t % 2 ? rng.dirac_sum(3, 4) : rng.ball_cloud(3, 3);
    Point c = rng.point_in_cube(3, 1.0);
    double prev = 0.0;
    for (double R = 0.01; R < 5.0; R *= 1.3) {
      double m = ball_mass(mu, Ball(c, R));
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
  }
}

TEST_CASE("translation covariance of Dirac sums") {
  MeasureSampler rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<Atom> atoms, moved;
    Point shift = rng.point_in_cube(3, 2.0);
    for (int i = 0; i < 4; ++i) {
      Point x = rng.point_in_cube(3, 1.0);
      Point y = x;
      for (int k = 0; k < 3; ++k) y[k] += shift[k];
      double w = rng.uniform(0.1, 1.0);
      atoms.push_back({x, w});
      moved.push_back({y, w});
    }
    Point c = rng.point_in_cube(3, 1.0), c2 = c;
    for (int k = 0; k < 3; ++k) c2[k] += shift[k];
    double R = rng.uniform(0.1, 2.0);
    CHECK(ball_mass(Measure::dirac_sum(3, atoms), Ball(c, R)) ==
          Approx(ball_mass(Measure::dirac_sum(3, moved), Ball(c2, R))).epsilon(1e-12));
  }
}

TEST_CASE("scale and restrict commute") {
  Measure mu = Measure::sum(3, {inverse_square(), Measure::ball_cloud(3, {{{0.5, 0, 0}, 0.3, 1.0}})});
  Ball B({0.2, 0, 0}, 0.6);
  Measure a = restrict(scale(mu, 3.0), B), b = scale(restrict(mu, B), 3.0);
  for (double R : {0.1, 0.4, 0.9, 2.0}) {
    Ball q({0.4, 0.1, 0}, R);
    CHECK(ball_mass(a, q) == Approx(ball_mass(b, q)).epsilon(1e-12));
  }
}

TEST_CASE("mollified masses obey the transport bound") {
  MeasureSampler rng(9);
  for (int t = 0; t < 20; ++t) {
    Measure mu = t % 2 ? rng.dirac_sum(3, 4) : rng.ball_cloud(3, 2);
    const int k = 4;
    Measure m = mollify(mu, k);
    for (int s = 0; s < 10; ++s) {
      Point c = rng.point_in_cube(3, 1.0);
      double R = rng.uniform(0.05, 1.5);
      CHECK(ball_mass(m, Ball(c, R)) <= ball_mass(mu, Ball(c, R + 1.0 / k)) + 1e-10);
    }
  }
}

TEST_CASE("tiny balls far from the origin") {
  // Density 2 r^(1/2) near |x| = 0.4379, so mass ~ 2 sqrt(0.4379) (4 pi / 3) s^3.
  Measure mu = Measure::radial_density(3, {{0.5, -1.0, 0.0, 0.3}, {2.0, 0.5, 0.3, 1.2}});
  for (double s : {1e-9, 1e-7, 1e-5}) {
    double ref = 2.0 * std::sqrt(0.4379) * oracle::ball_volume(3, s);
    CHECK(ball_mass(mu, Ball({0.4379, 0, 0}, s)) == Approx(ref).epsilon(1e-4));
  }
  Measure cloud = Measure::ball_cloud(3, {{{0, 0, 0}, 1.0, 1.0}});
  double s = 1e-7;
  // Ball of radius s centered on the unit sphere: half of it is inside.
  CHECK(ball_mass(cloud, Ball({1.0, 0, 0}, s)) == Approx(0.5 * std::pow(s, 3)).epsilon(1e-4));
}

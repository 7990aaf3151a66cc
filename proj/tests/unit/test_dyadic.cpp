#include <doctest.h>

#include <cmath>

#include "wolffkit/dyadic.hpp"
#include "wolffkit/random_measures.hpp"

using namespace wolffkit;
using doctest::Approx;

namespace {

// Brute-force dyadic Wolff sum for one atom: at each level compare the
// floor indices of x and the atom directly.
double brute_dyadic(const Point& atom, double w, const Point& x, int n, double p, int kmin, int kmax, bool star) {
  double total = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    double side = std::ldexp(1.0, k);
    bool in = true;
    for (int i = 0; i < n; ++i) {
      double mx = std::floor(x[i] / side), ma = std::floor(atom[i] / side);
      in = in && (star ? std::abs(mx - ma) <= 1.0 : mx == ma);
    }
    if (in) total += std::pow(w / std::pow(side, n - p), 1.0 / (p - 1.0));
  }
  return total;
}

int brute_intersections(const Point& x, int k) {
  const int n = static_cast<int>(x.size());
  double side = std::ldexp(1.0, k);
  int count = 0, total = 1;
  for (int i = 0; i < n; ++i) total *= 5;
  for (int code = 0; code < total; ++code) {
    int c = code;
    bool in = true;
    for (int i = 0; i < n; ++i) {
      double m = std::floor(x[i] / side) + (c % 5) - 2;
      c /= 5;
      double lo = (m - 1) * side, hi = (m + 2) * side;
      in = in && x[i] >= lo && x[i] < hi;
    }
    count += in;
  }
  return count;
}

}  // namespace

TEST_CASE("cube basics") {
  DyadicCube q = DyadicCube::containing(Point{0.9, -0.1, 0.5}, -1);
  CHECK(q.index == std::vector<long long>{1, -1, 1});
  CHECK(q.contains(Point{0.5, -0.5, 0.5}));
  CHECK_FALSE(q.contains(Point{1.0, -0.5, 0.5}));
  CHECK(q.parent().contains(q));
  for (const DyadicCube& c : q.children()) CHECK(q.contains(c));
  CHECK(q.children().size() == 8);
}

TEST_CASE("exactly one cube per level contains a point") {
  MeasureSampler rng(2);
  for (int t = 0; t < 200; ++t) {
    Point x = rng.point_in_cube(3, 4.0);
    int k = static_cast<int>(rng.uniform(-6, 4));
    DyadicCube q = DyadicCube::containing(x, k);
    CHECK(q.contains(x));
    int hits = 0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          DyadicCube r = q;
          r.index[0] += a;
          r.index[1] += b;
          r.index[2] += c;
          hits += r.contains(x);
        }
    CHECK(hits == 1);
  }
}

TEST_CASE("dyadic wolff geometric series") {
  CubeMeasure m = CubeMeasure::from_measure(Measure::dirac({0.3, 0.3, 0.3}));
  SpaceParams sp(3, 2.0);
  DyadicFamily fam{0, 30, {}, {}};
  Point x{0.9, 0.9, 0.9};
  DyadicSum s = dyadic_wolff(m, x, sp, fam);
  CHECK(std::abs(s.value - (2.0 - std::ldexp(1.0, -30))) < 1e-12);
  CHECK(s.value == Approx(brute_dyadic({0.3, 0.3, 0.3}, 1.0, x, 3, 2.0, 0, 30, false)).epsilon(1e-14));
  CHECK(dyadic_wolff(CubeMeasure::from_measure(Measure::zero(3)), x, sp, fam).value == 0.0);
}

TEST_CASE("dyadic wolff at the atom diverges") {
  CubeMeasure m = CubeMeasure::from_measure(Measure::dirac({0.3, 0.3, 0.3}));
  DyadicSum s = dyadic_wolff(m, Point{0.3, 0.3, 0.3}, SpaceParams(3, 2.0), DyadicFamily{-20, 0, {}, {}});
  CHECK(s.divergent);
}

TEST_CASE("modified dyadic wolff") {
  CubeMeasure m = CubeMeasure::from_measure(Measure::dirac({0.3, 0.3, 0.3}));
  SpaceParams sp(3, 2.0);
  Point x{0.9, 0.9, 0.9};
  DyadicSum one = modified_dyadic_wolff(m, x, sp, DyadicFamily{-1, -1, {}, {}});
  CHECK(one.value == Approx(2.0).epsilon(1e-14));
  CHECK(one.value == Approx(brute_dyadic({0.3, 0.3, 0.3}, 1.0, x, 3, 2.0, -1, -1, true)).epsilon(1e-14));
  CHECK(modified_dyadic_wolff(CubeMeasure::from_measure(Measure::zero(3)), x, sp, DyadicFamily{-5, 5, {}, {}}).value ==
        0.0);
  MeasureSampler rng(6);
  DyadicFamily fam{-6, 3, {}, {}};
  for (int t = 0; t < 50; ++t) {
    Measure mu = rng.dirac_sum(3, 4);
    CubeMeasure cm = CubeMeasure::from_measure(mu);
    Point y = rng.point_in_cube(3, 1.2);
    DyadicSum a = dyadic_wolff(cm, y, sp, fam), b = modified_dyadic_wolff(cm, y, sp, fam);
    for (std::size_t i = 0; i < a.terms.size(); ++i) CHECK(b.terms[i] >= a.terms[i]);
  }
}

TEST_CASE("dyadic wolff matches brute force for Dirac sums") {
  MeasureSampler rng(8);
  SpaceParams sp(3, 2.3);
  DyadicFamily fam{-6, 4, {}, {}};
  for (int t = 0; t < 30; ++t) {
    Measure mu = rng.dirac_sum(3, 3);
    Point x = rng.point_in_cube(3, 1.0);
    CubeMeasure cm = CubeMeasure::from_measure(mu);
    for (bool star : {false, true}) {
      // Per-level brute force: sum weights of atoms sharing the cube.
      double ref = 0.0;
      for (int k = fam.k_min; k <= fam.k_max; ++k) {
        double side = std::ldexp(1.0, k), mass = 0.0;
        for (const Atom& a : mu.flat().atoms) {
          bool in = true;
          for (int i = 0; i < 3; ++i) {
            double d = std::floor(a.point[i] / side) - std::floor(x[i] / side);
            in = in && (star ? std::abs(d) <= 1.0 : d == 0.0);
          }
          if (in) mass += a.weight;
        }
        ref += std::pow(mass / std::pow(side, 3 - 2.3), 1.0 / 1.3);
      }
      double got = star ? modified_dyadic_wolff(cm, x, sp, fam).value : dyadic_wolff(cm, x, sp, fam).value;
      CHECK(got == Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("carleson sum of Lebesgue on the unit cube") {
  CubeMeasure leb = CubeMeasure::lebesgue_box({0, 0, 0}, {1, 1, 1});
  SpaceParams sp(3, 2.0);
  DyadicCube P{0, {0, 0, 0}};
  for (int J : {3, 7, 12}) {
    CarlesonResult r = carleson_sum(leb, P, sp, DyadicFamily{-J, 0, {}, {}});
    // Brute force: 8^j cubes of side 2^-j, each term (2^-3j)^2 / 2^-j.
    double brute = 0.0;
    for (int j = 0; j <= J; ++j) brute += std::pow(8.0, j) * std::pow(std::pow(2.0, -3.0 * j), 2.0) / std::pow(2.0, -j);
    CHECK(r.value == Approx(brute).epsilon(1e-12));
    CHECK(std::abs(r.value - 4.0 / 3.0) <= std::pow(4.0, -J));
  }
  CHECK(carleson_sum(CubeMeasure::from_measure(Measure::zero(3)), P, sp, DyadicFamily{-5, 0, {}, {}}).value == 0.0);
}

TEST_CASE("carleson sum additivity") {
  MeasureSampler rng(12);
  SpaceParams sp(3, 2.5);
  DyadicFamily fam{-5, 0, {}, {}};
  for (int t = 0; t < 10; ++t) {
    Measure mu = Measure::sum(3, {rng.dirac_sum(3, 3), rng.ball_cloud(3, 2, 1.0, 0.05, 0.2)});
    CubeMeasure cm = CubeMeasure::from_measure(mu);
    DyadicCube P = DyadicCube::containing(rng.point_in_cube(3, 0.9), 0);
    double own = std::pow(cm.mass(P), sp.p_conjugate()) / std::pow(P.side(), sp.beta());
    double kids = 0.0;
    for (const DyadicCube& c : P.children()) kids += carleson_sum(cm, c, sp, fam).value;
    CHECK(carleson_sum(cm, P, sp, fam).value == Approx(kids + own).epsilon(1e-12));
  }
}

TEST_CASE("carleson divergence for an interior atom") {
  CubeMeasure d = CubeMeasure::from_measure(Measure::dirac({0.3, 0.3, 0.3}));
  SpaceParams sp(3, 2.0);
  CarlesonResult r = carleson_sum(d, DyadicCube{0, {0, 0, 0}}, sp, DyadicFamily{-20, 0, {}, {}});
  CHECK(r.divergent);
  for (std::size_t i = 1; i < r.level_totals.size(); ++i) CHECK(r.level_totals[i] == Approx(2.0 * r.level_totals[i - 1]));
}

TEST_CASE("carleson constant") {
  SpaceParams sp(3, 2.0);
  DyadicFamily fam{-8, 0, Point{0, 0, 0}, Point{1, 1, 1}};
  CarlesonConstant c = carleson_constant(CubeMeasure::lebesgue_box({0, 0, 0}, {1, 1, 1}), sp, fam);
  CHECK(c.constant == Approx(4.0 / 3.0).epsilon(1e-4));
  REQUIRE(c.achieving);
  CHECK(c.achieving->level == 0);
  CarlesonConstant d = carleson_constant(CubeMeasure::from_measure(Measure::dirac({0.3, 0.3, 0.3})), sp, fam);
  CHECK(d.divergent);
  CHECK(std::isinf(d.constant));
  CHECK(carleson_constant(CubeMeasure::from_measure(Measure::zero(3)), sp, fam).constant == 0.0);
}

TEST_CASE("finite intersection count") {
  CHECK(finite_intersection_count(Point{0.3, 0.7, 0.1}, 0) == 27);
  CHECK(finite_intersection_count(Point{0.3, 0.7}, -2) == 9);
  MeasureSampler rng(14);
  for (int t = 0; t < 10000; ++t) {
    int n = 1 + t % 4;
    Point x = rng.point_in_cube(n, 3.0);
    int k = static_cast<int>(std::floor(rng.uniform(-5, 3)));
    int c = finite_intersection_count(x, k);
    CHECK(c == brute_intersections(x, k));
    CHECK(c <= static_cast<int>(std::pow(3, n)));
  }
  // Points on the lattice still meet exactly 3^n tripled cubes.
  CHECK(finite_intersection_count(Point{0.5, 0.0, -1.0}, -1) == brute_intersections(Point{0.5, 0.0, -1.0}, -1));
}

TEST_CASE("two-sided dyadic comparison is run-stable") {
  SpaceParams sp(3, 2.2);
  DyadicFamily fam{-12, 6, {}, {}};
  auto run = [&](std::uint64_t seed) {
    MeasureSampler rng(seed);
    double up = 0.0, down = 0.0;
    for (int t = 0; t < 100; ++t) {
      Measure mu = rng.dirac_sum(3, 3);
      Point x = rng.point_in_cube(3, 1.5);
      CubeMeasure cm = CubeMeasure::from_measure(mu);
      double w = wolff(mu, x, sp).value;
      up = std::max(up, dyadic_wolff(cm, x, sp, fam).value / w);
      down = std::max(down, w / modified_dyadic_wolff(cm, x, sp, fam).value);
    }
    return std::pair{up, down};
  };
  auto [u1, d1] = run(100);
  auto [u2, d2] = run(200);
  CHECK(std::isfinite(u1));
  CHECK(std::isfinite(d1));
  CHECK(std::max(u1, u2) / std::min(u1, u2) <= 2.0);
  CHECK(std::max(d1, d2) / std::min(d1, d2) <= 2.0);
}

TEST_CASE("dyadic capacity inequality verifier") {
  SpaceParams sp(3, 2.5);
  Measure sigma = Measure::ball_cloud(3, {{{0.2, 0, 0}, 0.3, 1.0}, {{-0.3, 0.2, 0}, 0.2, 0.5}});
  Measure mu = Measure::dirac_sum(3, {{{0.5, 0.5, 0}, 1.0}, {{-0.4, 0, 0.3}, 0.7}});
  Lemma52Result base = verify_lemma52(sigma, mu, sp);
  CHECK(std::isfinite(base.ratio));
  CHECK(base.ratio > 0.0);
  for (double t : {0.5, 2.0}) {
    Lemma52Result r = verify_lemma52(sigma.scaled(t), mu, sp);
    CHECK(r.ratio == Approx(base.ratio).epsilon(1e-8));
    CHECK(r.lhs == Approx(t * base.lhs).epsilon(1e-8));
    CHECK(r.c_ball == Approx(t * base.c_ball).epsilon(1e-8));
    CHECK(r.rhs == Approx(std::pow(t, 1.0 / 1.5) * base.rhs).epsilon(1e-8));
  }
  Lemma52Result zero = verify_lemma52(Measure::zero(3), mu, sp);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.ratio == 0.0);
  CHECK_THROWS_AS(verify_lemma52(sigma, mu, SpaceParams(3, 2.0)), std::invalid_argument);
}

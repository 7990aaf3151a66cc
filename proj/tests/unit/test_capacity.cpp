#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wolffkit/capacity.hpp"
#include "wolffkit/random_measures.hpp"

using namespace wolffkit;
using doctest::Approx;

namespace {

double kappa_at(const Measure& sigma, const Ball& B, const SpaceParams& sp) { return kappa_lower(sigma, B, sp).lower; }

}  // namespace

TEST_CASE("ball capacity against the profile minimization") {
  CHECK(ball_capacity(1.0, SpaceParams(3, 2.0)) == Approx(4.0 * oracle::pi).epsilon(1e-14));
  CHECK(ball_capacity(1.0, SpaceParams(3, 2.5)) == Approx(2.4184).epsilon(1e-4));
  struct Case {
    int n;
    double p;
  };
  for (Case c : {Case{3, 2.0}, Case{3, 2.5}, Case{4, 3.0}, Case{2, 1.5}}) {
    SpaceParams sp(c.n, c.p);
    for (double r : {0.5, 1.0}) {
      auto [eps, energy] = oracle::minimize_profile(c.n, c.p, r);
      CHECK(std::abs(eps) < 1e-3);
      CHECK(ball_capacity(r, sp) == Approx(energy).epsilon(1e-4));
    }
    CHECK(ball_capacity(2.0, sp) / ball_capacity(1.0, sp) == Approx(std::pow(2.0, c.n - c.p)).epsilon(1e-14));
  }
}

TEST_CASE("capacity condition examples") {
  SpaceParams sp(3, 2.0);
  Measure d = Measure::dirac({0, 0, 0});
  CHECK(capacity_condition_const(d, sp, default_plan({d})).verdict == Verdict::divergent);

  Measure leb = Measure::lebesgue_ball({0, 0, 0}, 1.0);
  ConditionReport r = capacity_condition_const(leb, sp, default_plan({leb}));
  // Sampled sup of the explicit ratio on a fine radius grid.
  double best = 0.0;
  for (int k = -3000; k <= 2000; ++k) {
    double s = std::pow(10.0, k / 1000.0);
    best = std::max(best, 4.0 * oracle::pi / 3.0 * std::pow(std::min(s, 1.0), 3) / (4.0 * oracle::pi * s));
  }
  CHECK(best == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.finite());
  CHECK(r.sup_constant == Approx(best).epsilon(1e-9));
  CHECK(r.radius == Approx(1.0).epsilon(1e-12));

  Measure z = Measure::zero(3);
  CHECK(capacity_condition_const(z, sp, default_plan({leb})).sup_constant == 0.0);
}

TEST_CASE("capacity condition is monotone and homogeneous") {
  MeasureSampler rng(51);
  SpaceParams sp(3, 2.2);
  for (int t = 0; t < 6; ++t) {
    Measure a = rng.ball_cloud(3, 3);
    Measure b = Measure::sum(3, {a, rng.ball_cloud(3, 2)});
    SamplingPlan plan = default_plan({b});
    double ca = capacity_condition_const(a, sp, plan, false).sup_constant;
    double cb = capacity_condition_const(b, sp, plan, false).sup_constant;
    CHECK(ca <= cb);
    double s = rng.uniform(0.2, 5.0);
    CHECK(capacity_condition_const(a.scaled(s), sp, plan, false).sup_constant == Approx(s * ca).epsilon(1e-12));
  }
}

TEST_CASE("kappa lower examples") {
  SpaceParams sp(3, 2.0, 0.5);
  Measure leb = Measure::lebesgue_ball({0, 0, 0}, 1.0);
  Ball B({0, 0, 0}, 1.0);
  double ref = oracle::simpson([](double r) { return 4.0 * oracle::pi * std::pow(r, 1.5); }, 0.0, 1.0);
  CHECK(ref == Approx(8.0 * oracle::pi / 5.0).epsilon(1e-6));
  KappaEstimate k = kappa_lower(leb, B, sp);
  CHECK(k.method == KappaMethod::dirac_trials);
  CHECK(k.lower >= std::pow(8.0 * oracle::pi / 5.0, 2.0) * (1.0 - 1e-8));
  CHECK(k.trial_count >= 1);
  CHECK(kappa_lower(Measure::zero(3), B, sp).lower == 0.0);
}

TEST_CASE("kappa lower monotonicity and homogeneity") {
  MeasureSampler rng(53);
  SpaceParams sp(3, 2.5, 0.7);
  for (int t = 0; t < 5; ++t) {
    Measure a = rng.ball_cloud(3, 3);
    Measure b = Measure::sum(3, {a, rng.ball_cloud(3, 2)});
    Point c = rng.point_in_cube(3, 0.5);
    Ball small(c, 0.6), big(c, 1.2);
    CHECK(kappa_at(a, small, sp) <= kappa_at(a, big, sp) * (1.0 + 1e-10));
    CHECK(kappa_at(a, big, sp) <= kappa_at(b, big, sp) * (1.0 + 1e-10));
    for (double s : {0.5, 3.0}) {
      double slope = std::log(kappa_at(a.scaled(s), big, sp) / kappa_at(a, big, sp)) / std::log(s);
      CHECK(slope == Approx(1.0 / sp.q()).epsilon(1e-6));
    }
  }
}

TEST_CASE("kappa fixed point") {
  SpaceParams sp(3, 2.0, 0.5);
  Ball B({0, 0, 0}, 1.0);
  CHECK(kappa_fixed_point(Measure::zero(3), B, sp).lower == 0.0);
  Measure leb = Measure::lebesgue_ball({0, 0, 0}, 1.0);
  KappaEstimate fp = kappa_fixed_point(leb, B, sp);
  CHECK(fp.method == KappaMethod::fixed_point);
  CHECK_FALSE(fp.caveat.empty());
  REQUIRE(std::isfinite(fp.lower));
  CHECK(fp.lower > 0.0);
  double ratio = fp.lower / kappa_lower(leb, B, sp).lower;
  MESSAGE("fixed point / trials ratio: " << ratio);
  CHECK(ratio > 0.1);
  CHECK(ratio < 10.0);
  // v scales by t^(1/(p-1-q)), so the estimate scales by t^(1/q).
  for (double t : {0.25, 4.0}) {
    double slope = std::log(kappa_fixed_point(leb.scaled(t), B, sp).lower / fp.lower) / std::log(t);
    CHECK(slope == Approx(1.0 / sp.q()).epsilon(1e-6));
  }
  CHECK_THROWS_AS(kappa_fixed_point(leb, B, SpaceParams(3, 2.0, 1.5)), std::invalid_argument);
}

TEST_CASE("intrinsic potential") {
  SpaceParams sp(3, 2.0, 0.5);
  CHECK(intrinsic_potential(Measure::zero(3), Point{0, 0, 0}, sp).value == 0.0);
  CHECK(intrinsic_potential(Measure::dirac({0, 0, 0}), Point{0.5, 0, 0}, sp).divergent);

  Measure sigma = Measure::lebesgue_ball({0, 0, 0}, 0.5);
  std::vector<double> lx, ly;
  for (double R : {20.0, 40.0, 80.0, 160.0}) {
    IntrinsicResult r = intrinsic_potential(sigma, Point{R, 0, 0}, sp);
    REQUIRE_FALSE(r.divergent);
    lx.push_back(std::log(R));
    ly.push_back(std::log(r.value));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  CHECK(sxy / sxx == Approx(-sp.beta()).epsilon(0.05));
}

TEST_CASE("intrinsic potential shrinks under restriction") {
  SpaceParams sp(3, 2.5, 0.6);
  MeasureSampler rng(57);
  for (int t = 0; t < 3; ++t) {
    Measure sigma = rng.ball_cloud(3, 3);
    Point x = rng.point_in_cube(3, 1.0);
    Measure part = sigma.restricted(Ball(rng.point_in_cube(3, 0.5), 0.8));
    CHECK(intrinsic_potential(part, x, sp).value <= intrinsic_potential(sigma, x, sp).value * (1.0 + 1e-8));
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "wolffkit/random_measures.hpp"
#include "wolffkit/regularity.hpp"

using namespace wolffkit;
using doctest::Approx;

namespace {

Measure canonical() { return Measure::radial_density(3, {{1.0, -2.0, 0.0, 1.0}}); }
Measure global_power() { return Measure::radial_density(3, {{1.0, -2.0, 0.0, kInf}}); }
Measure leb() { return Measure::lebesgue_ball({0, 0, 0}, 1.0); }

SamplingPlan plan_of(const Measure& m) { return default_plan({m}); }

// |{x in B(0,1), x in cell}| with f = 1/|x| taking its smallest value on each
// cube, positive octant only, cell measure scaled by 8.
std::vector<std::pair<double, double>> inverse_radius_cells(int per_axis) {
  std::vector<std::pair<double, double>> out;
  const double h = 1.0 / per_axis;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        double far = std::sqrt(double((i + 1) * (i + 1) + (j + 1) * (j + 1) + (k + 1) * (k + 1))) * h;
        if (far > 1.0) continue;
        out.emplace_back(1.0 / far, 8.0 * h * h * h);
      }
  return out;
}

}  // namespace

TEST_CASE("morrey constant examples") {
  SpaceParams sp(3, 2.0);
  ConditionReport d = morrey_constant(Measure::dirac({0, 0, 0}), sp, plan_of(Measure::dirac({0, 0, 0})));
  CHECK(d.verdict == Verdict::divergent);
  REQUIRE(d.divergence_exponent);
  CHECK(*d.divergence_exponent == Approx(-1.0).epsilon(0.02));

  ConditionReport c = morrey_constant(canonical(), sp, plan_of(canonical()));
  CHECK(c.finite());
  CHECK(c.sup_constant == Approx(4.0 * oracle::pi).epsilon(1e-8));
  CHECK(norm(c.center) == 0.0);
  // Off-center balls never beat the centered ratio (Monte Carlo).
  auto dens = [](double x, double y, double z) {
    double r2 = x * x + y * y + z * z;
    return r2 < 1.0 ? 1.0 / r2 : 0.0;
  };
  for (double R : {0.2, 0.5}) {
    double mc = oracle::mc_ball3(dens, 0.3, 0.2, 0.0, R, 400000);
    CHECK(mc / R <= 4.0 * oracle::pi);
  }
  CHECK(morrey_constant(Measure::zero(3), sp, plan_of(leb())).sup_constant == 0.0);
}

TEST_CASE("finiteness check") {
  SpaceParams sp(3, 2.0);
  ConditionReport d = finiteness_check(Measure::dirac({0, 0, 0}), sp);
  CHECK(d.finite());
  // int_1^inf rho^(-1) d rho / rho = 1.
  CHECK(d.sup_constant == Approx(1.0).epsilon(1e-10));
  ConditionReport l = finiteness_check(leb(), sp);
  CHECK(l.finite());
  CHECK(l.sup_constant == Approx(4.0 * oracle::pi / 3.0).epsilon(1e-8));
  ConditionReport g = finiteness_check(global_power(), sp);
  CHECK(g.verdict == Verdict::divergent);
  ConditionReport z = finiteness_check(Measure::zero(3), sp);
  CHECK(z.finite());
  CHECK(z.sup_constant == 0.0);
}

TEST_CASE("holder condition") {
  SpaceParams sp(3, 2.0);
  CHECK(holder_condition(canonical(), 0.5, sp, plan_of(canonical())).verdict == Verdict::divergent);
  ConditionReport l = holder_condition(leb(), 0.5, sp, plan_of(leb()));
  CHECK(l.finite());
  // (4 pi / 3) min(R,1)^3 / R^1.5 peaks at R = 1.
  CHECK(l.sup_constant == Approx(4.0 * oracle::pi / 3.0).epsilon(1e-8));
  CHECK(holder_condition(Measure::zero(3), 0.5, sp, plan_of(leb())).sup_constant == 0.0);
}

TEST_CASE("thm1 verdicts") {
  SpaceParams sp(3, 2.0);
  CHECK(thm1_verdict(canonical(), sp, plan_of(canonical())).verdict == Verdict::finite);
  CompositeReport d = thm1_verdict(Measure::dirac({0, 0, 0}), sp, plan_of(Measure::dirac({0, 0, 0})));
  CHECK(d.verdict == Verdict::divergent);
  CHECK(d.condition("morrey").verdict == Verdict::divergent);
  CompositeReport g = thm1_verdict(global_power(), sp, plan_of(canonical()));
  CHECK(g.verdict == Verdict::divergent);
  CHECK(g.condition("finiteness").verdict == Verdict::divergent);
}

TEST_CASE("thm2 conditions") {
  SpaceParams sp(3, 2.0, 2.0);
  SamplingPlan plan = plan_of(leb());
  CompositeReport z = thm2_conditions(Measure::zero(3), leb(), sp, plan);
  CHECK(z.condition("a").sup_constant == 0.0);
  CHECK(z.condition("b").sup_constant == 0.0);

  CheckConfig cfg;
  cfg.check_stability = false;
  double a1 = thm2_conditions(leb().scaled(1e-3), leb(), sp, plan, cfg).condition("a").sup_constant;
  double a2 = thm2_conditions(leb().scaled(2e-3), leb(), sp, plan, cfg).condition("a").sup_constant;
  CHECK(a2 / a1 == Approx(2.0).epsilon(1e-6));

  // (b) is degree 1 in sigma and degree q/(p-1) in the scale of mu.
  Measure sigma = Measure::lebesgue_ball({1, 0, 0}, 0.1);
  Measure mu = Measure::dirac({0, 0, 0});
  SamplingPlan pb = default_plan({sigma, mu});
  double b = thm2_conditions(sigma, mu, sp, pb, cfg).condition("b").sup_constant;
  double bs = thm2_conditions(sigma.scaled(3.0), mu, sp, pb, cfg).condition("b").sup_constant;
  double bm = thm2_conditions(sigma, mu.scaled(3.0), sp, pb, cfg).condition("b").sup_constant;
  CHECK(std::log(bs / b) / std::log(3.0) == Approx(1.0).epsilon(1e-6));
  CHECK(std::log(bm / b) / std::log(3.0) == Approx(sp.q() / (sp.p() - 1.0)).epsilon(1e-6));

  CompositeReport far = thm2_conditions(sigma, mu, sp, pb);
  const ConditionReport& cb = far.condition("b");
  MESSAGE("thm2 (b) for the far trial: " << cb.sup_constant << " refined " << cb.refined_constant);
  CHECK(cb.finite());
  CHECK(std::abs(cb.refined_constant / cb.sup_constant - 1.0) < 0.1);
}

TEST_CASE("thm3 conditions") {
  SpaceParams sp(3, 2.0, 0.5);
  SamplingPlan plan = plan_of(leb());
  CompositeReport z = thm3_conditions(Measure::zero(3), Measure::zero(3), sp, plan);
  for (const char* id : {"a", "b", "c", "d"}) CHECK(z.condition(id).sup_constant == 0.0);

  CheckConfig fast;
  fast.check_stability = false;
  Measure d = Measure::dirac({0, 0, 0});
  CHECK(thm3_conditions(d, Measure::zero(3), sp, plan_of(d), fast).condition("a").verdict == Verdict::divergent);

  CompositeReport l = thm3_conditions(leb(), Measure::zero(3), sp, plan);
  for (const char* id : {"a", "c", "d"}) {
    const ConditionReport& c = l.condition(id);
    MESSAGE("thm3 (" << std::string(id) << "): " << c.sup_constant << " refined " << c.refined_constant);
    CHECK(c.finite());
    CHECK(std::abs(c.refined_constant / c.sup_constant - 1.0) < 0.1);
  }
  CHECK(l.condition("b").sup_constant == 0.0);
}

TEST_CASE("cor1 conditions") {
  SpaceParams sp(3, 2.0, 0.5);
  Measure d = Measure::dirac({0, 0, 0});
  CHECK(cor1_conditions(d, leb(), sp, default_plan({d, leb()})).verdict == Verdict::inapplicable);
  CompositeReport z = cor1_conditions(Measure::zero(3), leb(), sp, plan_of(leb()));
  for (const char* id : {"capacity", "a", "b"}) CHECK(z.condition(id).sup_constant == 0.0);
  CompositeReport l = cor1_conditions(leb(), leb(), sp, plan_of(leb()));
  CHECK(l.verdict == Verdict::finite);
  CHECK(l.condition("capacity").sup_constant == Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("thm4 conditions") {
  SpaceParams sp(3, 2.0, 1.0);
  CompositeReport l = thm4_conditions(leb(), leb(), sp, plan_of(leb()));
  double ref = oracle::simpson([](double s) { return 4.0 * oracle::pi * s; }, 0.0, 1.0);
  CHECK(l.condition("assumption").sup_constant == Approx(ref).epsilon(1e-8));
  CHECK(l.condition("capacity").sup_constant == Approx(1.0 / 3.0).epsilon(1e-9));
  CompositeReport z = thm4_conditions(Measure::zero(3), leb(), sp, plan_of(leb()));
  CHECK(z.condition("assumption").sup_constant == 0.0);
  CHECK_FALSE(z.condition("assumption").notes.empty());
  Measure d = Measure::dirac({0, 0, 0});
  CheckConfig fast;
  fast.check_stability = false;
  CompositeReport a = thm4_conditions(d, leb(), sp, default_plan({d, leb()}), fast);
  CHECK(std::isinf(a.condition("assumption").sup_constant));
  CHECK(a.condition("assumption").verdict == Verdict::divergent);
}

TEST_CASE("checkers are monotone and homogeneous") {
  SpaceParams sp(3, 2.2);
  MeasureSampler rng(71);
  for (int t = 0; t < 4; ++t) {
    Measure a = rng.ball_cloud(3, 3);
    Measure b = Measure::sum(3, {a, rng.ball_cloud(3, 2)});
    SamplingPlan plan = default_plan({b});
    double ma = morrey_constant(a, sp, plan, false).sup_constant;
    double mb = morrey_constant(b, sp, plan, false).sup_constant;
    CHECK(ma <= mb);
    double ms = morrey_constant(a.scaled(2.5), sp, plan, false).sup_constant;
    CHECK(std::log(ms / ma) / std::log(2.5) == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("bmo norm") {
  SamplingPlan plan = plan_of(canonical());
  NormEstimate c = bmo_norm(Field([](const Point&) { return 3.0; }), plan);
  CHECK(c.value == 0.0);
  SpaceParams sp(3, 2.0);
  RadialFunction u = radial_solve(canonical(), sp);
  NormEstimate good = bmo_norm(u, plan);
  MESSAGE("canonical bmo: " << good.value);
  CHECK(good.verdict == Verdict::finite);
  for (double g : good.growth) CHECK(g < 1.1);

  RadialFunction d = radial_solve(Measure::dirac({0, 0, 0}), sp);
  NormEstimate bad = bmo_norm(d, plan);
  CHECK(bad.verdict == Verdict::divergent);
  REQUIRE_FALSE(bad.growth.empty());
  for (double g : bad.growth) CHECK(g >= 1.5);

  // Shift and scale laws on a field.
  Field f = [](const Point& x) { return std::sin(3.0 * x[0]) + x[1] * x[1]; };
  SamplingPlan small = plan;
  small.r_min = 0.05;
  NormConfig nc;
  nc.refinements = 0;
  double base = bmo_norm(f, small, nc).value;
  double shifted = bmo_norm(Field([&](const Point& x) { return f(x) + 7.0; }), small, nc).value;
  double scaled = bmo_norm(Field([&](const Point& x) { return 2.5 * f(x); }), small, nc).value;
  CHECK(shifted == Approx(base).epsilon(1e-12));
  CHECK(scaled == Approx(2.5 * base).epsilon(1e-12));
}

TEST_CASE("mean oscillation of a radial profile") {
  // u = |x| on B(0,1) in R^3: mean 3/4, oscillation 4 pi int |r - 3/4| r^2 dr / (4 pi / 3).
  RadialFunction u = RadialFunction::exact(3, [](double) { return 1.0; }, {}, {}, {1.0, 1.0});
  double ref = 3.0 * oracle::simpson([](double r) { return std::abs(r - 0.75) * r * r; }, 0.0, 1.0, 20000);
  CHECK(mean_oscillation(u, Ball({0, 0, 0}, 1.0)) == Approx(ref).epsilon(1e-8));
  // Off-center ball against a Monte Carlo estimate.
  Ball B({0.5, 0.2, 0}, 0.4);
  double mean = oracle::mc_ball3([](double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }, 0.5, 0.2,
                                 0.0, 0.4, 400000) /
                oracle::ball_volume(3, 0.4);
  double osc = oracle::mc_ball3(
                   [&](double x, double y, double z) { return std::abs(std::sqrt(x * x + y * y + z * z) - mean); },
                   0.5, 0.2, 0.0, 0.4, 400000, 99) /
               oracle::ball_volume(3, 0.4);
  CHECK(mean_oscillation(u, B) == Approx(osc).epsilon(1e-2));
}

TEST_CASE("campanato norm") {
  SamplingPlan plan = plan_of(canonical());
  CHECK(campanato_norm(Field([](const Point&) { return 1.0; }), 1.0, plan).value == 0.0);
  RadialFunction lin = RadialFunction::exact(3, [](double) { return 1.0; }, {}, {}, {1.0, 1.0});
  CHECK(campanato_norm(lin, 1.0, plan).verdict == Verdict::finite);
  RadialFunction d = radial_solve(Measure::dirac({0, 0, 0}), SpaceParams(3, 2.0));
  CHECK(campanato_norm(d, 0.5, plan).verdict == Verdict::divergent);
}

TEST_CASE("weak Lq norm") {
  CHECK(weak_lq_norm({{2.0, 8.0}}, 3.0) == Approx(4.0));
  CHECK(weak_lq_norm({{0.0, 1.0}, {0.0, 2.0}}, 2.0) == 0.0);
  // Brute force over thresholds, and the Chebyshev bound.
  MeasureSampler rng(73);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::pair<double, double>> s;
    int k = 1 + t % 20;
    for (int i = 0; i < k; ++i) s.emplace_back(rng.uniform(0, 5), rng.uniform(0.01, 1));
    double q = rng.uniform(0.5, 4.0);
    double brute = 0.0, lq = 0.0;
    for (auto [v, m] : s) {
      double above = 0.0;
      for (auto [w, n] : s) above += w >= v ? n : 0.0;
      brute = std::max(brute, v * std::pow(above, 1.0 / q));
      lq += std::pow(v, q) * m;
    }
    double got = weak_lq_norm(s, q);
    CHECK(got == Approx(brute).epsilon(1e-12));
    CHECK(got <= std::pow(lq, 1.0 / q) * (1.0 + 1e-12));
  }
  // 1/|x| on B(0,1) in R^3: the weak L^3 norm is (4 pi / 3)^(1/3).
  double exact = std::cbrt(4.0 * oracle::pi / 3.0), prev = 0.0;
  for (int m : {32, 64, 128}) {
    double v = weak_lq_norm(inverse_radius_cells(m), 3.0);
    CHECK(v <= exact);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev == Approx(exact).epsilon(0.02));
}

TEST_CASE("gradient morrey check") {
  SpaceParams sp(3, 2.0);
  SamplingPlan plan = plan_of(canonical());
  RadialFunction zero = radial_solve(Measure::zero(3), sp);
  GradientReport z = gradient_morrey_check(zero, Measure::zero(3), 1.5, sp, plan);
  CHECK(z.morrey.sup_constant == 0.0);
  CHECK(z.weak.sup_constant == 0.0);

  RadialFunction d = radial_solve(Measure::dirac({0, 0, 0}), sp);
  GradientReport dr = gradient_morrey_check(d, Measure::dirac({0, 0, 0}), 1.5, sp, plan, false);
  CHECK(dr.morrey.verdict == Verdict::divergent);
  REQUIRE(dr.notes.size() == 2);
  CHECK(dr.notes[1] == "finite on all sampled balls with other centers");

  // |grad u| = r^-2 / (4 pi): its L^{3/2,inf} norm on B(0,R) equals
  // (4 pi)^-1 (4 pi / 3)^(2/3) for every R.
  double ref = std::pow(4.0 * oracle::pi / 3.0, 2.0 / 3.0) / (4.0 * oracle::pi);
  for (double R : {0.1, 1.0, 10.0}) CHECK(weak_gradient_norm(d, Ball({0, 0, 0}, R), 1.5) == Approx(ref).epsilon(1e-3));
  // On a ball away from the singularity it is finite, and blows up for L^{2,inf} on balls holding it.
  CHECK(std::isfinite(weak_gradient_norm(d, Ball({1, 0, 0}, 0.5), 2.0)));
  CHECK(std::isinf(weak_gradient_norm(d, Ball({0, 0, 0}, 1.0), 2.0)));

  RadialFunction u = radial_solve(canonical(), sp);
  GradientReport c = gradient_morrey_check(u, canonical(), 1.5, sp, plan);
  CHECK(c.morrey.finite());
  CHECK(c.weak.finite());
  CHECK(c.M == Approx(4.0 * oracle::pi).epsilon(1e-8));
}

TEST_CASE("gradient decay") {
  RadialFunction u = radial_solve(canonical(), SpaceParams(3, 2.0));
  double prev = kInf;
  for (int j = 3; j <= 8; ++j) {
    double R = std::ldexp(1.0, j);
    // |u'| = 1/r inside, 1/r^2 outside: 4 pi (2/3 + log R) R^-1.5 for q = 1.5.
    double ref = 4.0 * oracle::pi * (2.0 / 3.0 + std::log(R)) * std::pow(R, -1.5);
    double v = gradient_decay(u, R, 1.5);
    CHECK(v == Approx(ref).epsilon(1e-8));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("consistency chain") {
  SpaceParams sp(3, 2.0);
  SamplingPlan plan = plan_of(canonical());
  CHECK(thm1_verdict(canonical(), sp, plan).verdict == Verdict::finite);
  CHECK(bmo_norm(radial_solve(canonical(), sp), plan).verdict == Verdict::finite);
  CHECK(thm1_verdict(Measure::dirac({0, 0, 0}), sp, plan).verdict == Verdict::divergent);
  CHECK(bmo_norm(radial_solve(Measure::dirac({0, 0, 0}), sp), plan).verdict == Verdict::divergent);
}

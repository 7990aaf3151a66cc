#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wolffkit/capacity.hpp"
#include "wolffkit/grid.hpp"
#include "wolffkit/measure.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/radial.hpp"
#include "wolffkit/sampling.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

struct CheckConfig {
  QuadratureConfig quad;
  bool check_stability = true;
  double slope_tol = 0.05;
  /// Constants below this count as "small". Not a sharp threshold.
  double small_threshold = 0.1;
  /// Trial measures for kappa-dependent conditions.
  KappaTrials trials{0.5, 8, false, 12, {}};
  /// Ladder density for the tails of the intrinsic potential.
  int kappa_per_decade = 8;
  /// Quadrature nodes of sigma for the inner measures of condition (a).
  NodeOptions nodes{2, 1, 6, 4};
};

/// Several condition reports combined into one verdict.
struct CompositeReport {
  std::string criterion;
  std::vector<ConditionReport> conditions;
  Verdict verdict = Verdict::finite;
  std::vector<std::string> notes;

  const ConditionReport& condition(const std::string& id) const;
};

/// sup mu(B(x,R)) / R^(n-p).
ConditionReport morrey_constant(const Measure& mu, const SpaceParams& sp, const SamplingPlan& plan,
                                bool check_stability = true);

/// int_1^inf (mu(B(0,rho)) / rho^(n-p))^(1/(p-1)) d(rho)/rho.
ConditionReport finiteness_check(const Measure& mu, const SpaceParams& sp, const QuadratureConfig& cfg = {});

/// sup mu(B(x,R)) / R^(n-p+alpha(p-1)).
ConditionReport holder_condition(const Measure& mu, double alpha, const SpaceParams& sp, const SamplingPlan& plan,
                                 bool check_stability = true);

/// Existence of a BMO solution: finiteness and Morrey growth.
CompositeReport thm1_verdict(const Measure& mu, const SpaceParams& sp, const SamplingPlan& plan,
                             const CheckConfig& cfg = {});

/// q > p - 1: conditions (a), (b) and the Morrey constant of mu.
CompositeReport thm2_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg = {});

/// 0 < q < p - 1: conditions (a)-(d). Kappa values are lower bounds, so a
/// divergent verdict is conclusive and a finite one is only consistent.
CompositeReport thm3_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg = {});

/// 0 < q < p - 1 under the capacity condition on sigma.
CompositeReport cor1_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg = {});

/// q = p - 1: sup W_p sigma (p > 2) or sup I_p sigma (p <= 2), the tail
/// condition, the capacity constant of sigma and the Morrey constant of mu.
CompositeReport thm4_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg = {});

using Field = std::function<double(const Point&)>;

struct NormConfig {
  /// Midpoints per axis of the lattice over each ball.
  int lattice = 8;
  /// Successive halvings of the smallest radius.
  int refinements = 2;
  /// Relative growth per refinement above which the norm counts as infinite.
  double drift_tol = 0.1;
};

struct NormEstimate {
  double value = 0.0;
  /// Supremum after each halving of the smallest radius, base plan first.
  std::vector<double> by_refinement;
  /// Ratios of successive entries of by_refinement.
  std::vector<double> growth;
  Verdict verdict = Verdict::finite;
  Point center;
  double radius = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

/// Mean oscillation of u over B(x, R).
double mean_oscillation(const Field& u, const Ball& ball, int lattice = 8);
double mean_oscillation(const RadialFunction& u, const Ball& ball, int lattice = 8);

NormEstimate bmo_norm(const Field& u, const SamplingPlan& plan, const NormConfig& cfg = {});
NormEstimate bmo_norm(const RadialFunction& u, const SamplingPlan& plan, const NormConfig& cfg = {});
/// Balls leaving the grid box are skipped.
NormEstimate bmo_norm(const GridFunction& u, const SamplingPlan& plan, const NormConfig& cfg = {});

NormEstimate campanato_norm(const Field& u, double alpha, const SamplingPlan& plan, const NormConfig& cfg = {});
NormEstimate campanato_norm(const RadialFunction& u, double alpha, const SamplingPlan& plan,
                            const NormConfig& cfg = {});
NormEstimate campanato_norm(const GridFunction& u, double alpha, const SamplingPlan& plan,
                            const NormConfig& cfg = {});

/// sup_t t * |{|f| > t}|^(1/q) on the empirical distribution of
/// (value, cell measure) pairs.
double weak_lq_norm(std::vector<std::pair<double, double>> samples, double q);

/// (|grad u|, cell measure) pairs over the ball: one per simplex whose
/// centroid lies in the ball.
std::vector<std::pair<double, double>> gradient_samples(const GridFunction& u, const Ball& ball);

/// ||grad u||_{L^{p,infty}(B)} for a radial profile.
double weak_gradient_norm(const RadialFunction& u, const Ball& ball, double p, int lattice = 16);
/// int_B |grad u|^s.
double gradient_integral(const RadialFunction& u, const Ball& ball, double s, int lattice = 16);

struct GradientReport {
  /// sup (R^(s-n) int_B |grad u|^s)^(1/s).
  ConditionReport morrey;
  /// sup ||grad u||_{L^{p,infty}(B)} / R^((n-p)/p).
  ConditionReport weak;
  /// Morrey constant of mu.
  double M = 0.0;
  double morrey_ratio = 0.0;
  double weak_ratio = 0.0;
  std::vector<std::string> notes;
};

GradientReport gradient_morrey_check(const RadialFunction& u, const Measure& mu, double s, const SpaceParams& sp,
                                     const SamplingPlan& plan, bool check_stability = true);
GradientReport gradient_morrey_check(const GridFunction& u, const Measure& mu, double s, const SpaceParams& sp,
                                     const SamplingPlan& plan, bool check_stability = true);

/// R^(q-n) int_{B(0,R)} |grad u|^q.
double gradient_decay(const RadialFunction& u, double R, double q);

}  // namespace wolffkit

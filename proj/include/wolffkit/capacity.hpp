#pragma once

#include <string>
#include <vector>

#include "wolffkit/measure.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/sampling.hpp"
#include "wolffkit/solver.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

/// cap_p(B(x, r)) = omega * ((n-p)/(p-1))^(p-1) * r^(n-p).
double ball_capacity(double r, const SpaceParams& sp);

/// sup over sampled balls of sigma(B) / cap_p(B). A lower bound for the
/// constant over compact sets.
ConditionReport capacity_condition_const(const Measure& sigma, const SpaceParams& sp, const SamplingPlan& plan,
                                         bool check_stability = true);

enum class KappaMethod { dirac_trials, fixed_point };

std::string to_string(KappaMethod m);

struct KappaEstimate {
  double lower = 0.0;
  KappaMethod method = KappaMethod::dirac_trials;
  std::size_t trial_count = 0;
  Ball ball;
  /// The trial set hit its cap.
  bool capped = false;
  Point best_trial;
  std::string caveat;

  bool divergent() const { return std::isinf(lower); }
};

struct KappaTrials {
  /// Spacing of the global lattice whose points inside the ball are tried.
  double lattice_spacing = 0.5;
  std::size_t max_trials = 64;
  /// Also try nu = sigma_B itself.
  bool include_self = false;
  /// Polar nodes of the angular rule for clipped supports.
  int angular = 12;
  QuadratureConfig quad;
};

/// Lower bound for the best constant in ||W_p nu||_{L^q(sigma_B)} <= kappa ||nu||^(1/(p-1)),
/// maximized over Dirac trial measures: the ball center, atoms and density
/// centers of sigma inside B, and lattice points inside B.
KappaEstimate kappa_lower(const Measure& sigma, const Ball& ball, const SpaceParams& sp,
                          const KappaTrials& trials = {});

/// (int v^q dsigma_B)^((p-1-q)/(q(p-1))) for the solution v of
/// v = W_p(v^q sigma_B), 0 < q < p - 1.
KappaEstimate kappa_fixed_point(const Measure& sigma, const Ball& ball, const SpaceParams& sp,
                                const FixedPointConfig& cfg = {});

struct IntrinsicConfig {
  int per_decade = 16;
  /// Smallest radius, relative to the support extent, when x lies in the support.
  double r_min_factor = 1e-3;
  KappaTrials trials;
};

struct IntrinsicResult {
  double value = 0.0;
  bool divergent = false;
  std::vector<double> radii;
  std::vector<double> kappas;
  std::string estimator = "dirac_trials";
};

/// K_{p,q} sigma(x) = int_0^inf (kappa(B(x,r))^(q(p-1)/(p-1-q)) / r^(n-p))^(1/(p-1)) dr/r.
IntrinsicResult intrinsic_potential(const Measure& sigma, std::span<const double> x, const SpaceParams& sp,
                                    const IntrinsicConfig& cfg = {});

/// The same integral over [R, inf).
IntrinsicResult intrinsic_tail(const Measure& sigma, std::span<const double> x, double R, const SpaceParams& sp,
                               const IntrinsicConfig& cfg = {});

}  // namespace wolffkit

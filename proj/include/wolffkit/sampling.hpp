#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wolffkit/measure.hpp"

namespace wolffkit {

/// Finite family of balls standing in for "all x, all R > 0".
///
/// Centers are the explicit `anchors` plus a lattice of `lattice_per_axis`^n
/// points spanning [lattice_lo, lattice_hi] in every coordinate. Radii are
/// log-spaced in [r_min, r_max].
struct SamplingPlan {
  std::vector<Point> anchors;
  int dim = 0;
  double lattice_lo = -1.0;
  double lattice_hi = 1.0;
  int lattice_per_axis = 0;
  double r_min = 1e-3;
  double r_max = 1e2;
  int per_decade = 4;

  void validate() const;
  std::vector<Point> centers() const;
  std::vector<double> radii() const;
  /// Twice the radial density; the lattice gains midpoints.
  SamplingPlan refined() const;
  /// Same family with r_min divided by `factor`.
  SamplingPlan with_smaller_radii(double factor) const;
};

struct PlanOptions {
  double r_min_factor = 1e-3;
  double r_max_factor = 1e2;
  int per_decade = 4;
  int lattice_per_axis = 3;
};

/// Support-driven plan: every support point of every measure is an anchor,
/// the lattice spans the joint support extent, and radii are scaled to it.
SamplingPlan default_plan(const std::vector<Measure>& measures, const PlanOptions& opts = {});

enum class Verdict { finite, divergent, inapplicable };

std::string to_string(Verdict v);

struct ConditionReport {
  std::string criterion;
  double sup_constant = 0.0;
  Point center;
  double radius = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  Verdict verdict = Verdict::finite;
  std::optional<double> divergence_exponent;
  /// Supremum over the refined plan (NaN if stability was not checked).
  double refined_constant = 0.0;
  std::vector<std::string> notes;
  SamplingPlan plan;

  bool finite() const { return verdict == Verdict::finite; }
};

using BallFunctional = std::function<double(const Point& center, double radius)>;

/// sup of f over the plan. Divergence is declared when f is infinite
/// somewhere, or when its log-log slope at the smallest radii is below
/// -slope_tol (blow-up as R -> 0) or at the largest radii above slope_tol.
/// With `check_stability` the refined plan is evaluated too and a change
/// above 10% makes the verdict divergent.
ConditionReport sup_over_plan(const std::string& criterion, const SamplingPlan& plan, const BallFunctional& f,
                              bool check_stability = true, double slope_tol = 0.05);

}  // namespace wolffkit

#include "wolffkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

void SamplingPlan::validate() const {
  if (dim < 1) throw std::invalid_argument("SamplingPlan: dimension must be positive");
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw std::invalid_argument("SamplingPlan: need 0 < r_min <= r_max");
  if (per_decade < 1) throw std::invalid_argument("SamplingPlan: per_decade must be positive");
  if (lattice_per_axis < 0) throw std::invalid_argument("SamplingPlan: lattice size must be nonnegative");
  for (const Point& a : anchors) {
    if (static_cast<int>(a.size()) != dim) throw std::invalid_argument("SamplingPlan: anchor dimension mismatch");
  }
  if (anchors.empty() && lattice_per_axis == 0) throw std::invalid_argument("SamplingPlan: no centers");
}

std::vector<Point> SamplingPlan::centers() const {
  std::vector<Point> out = anchors;
  if (lattice_per_axis > 0) {
    long total = 1;
    for (int i = 0; i < dim; ++i) total *= lattice_per_axis;
    for (long idx = 0; idx < total; ++idx) {
      Point c(dim);
      long rest = idx;
      for (int i = 0; i < dim; ++i) {
        int k = static_cast<int>(rest % lattice_per_axis);
        rest /= lattice_per_axis;
        c[i] = lattice_per_axis == 1 ? 0.5 * (lattice_lo + lattice_hi)
                                     : lattice_lo + (lattice_hi - lattice_lo) * k / (lattice_per_axis - 1);
      }
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<double> SamplingPlan::radii() const {
  std::vector<double> out = log_ladder(r_min, r_max, per_decade);
  if (out.front() > r_min) out.insert(out.begin(), r_min);
  if (out.back() < r_max) out.push_back(r_max);
  return out;
}

SamplingPlan SamplingPlan::refined() const {
  SamplingPlan out = *this;
  out.per_decade *= 2;
  if (lattice_per_axis > 1) out.lattice_per_axis = 2 * lattice_per_axis - 1;
  return out;
}

SamplingPlan SamplingPlan::with_smaller_radii(double factor) const {
  SamplingPlan out = *this;
  out.r_min = r_min / factor;
  return out;
}

SamplingPlan default_plan(const std::vector<Measure>& measures, const PlanOptions& opts) {
  if (measures.empty()) throw std::invalid_argument("default_plan: need at least one measure");
  SamplingPlan plan;
  plan.dim = measures.front().dim();
  double extent = 0.0;
  for (const Measure& m : measures) {
    if (m.dim() != plan.dim) throw std::invalid_argument("default_plan: dimension mismatch");
    for (Point& p : m.support_points()) {
      if (std::find(plan.anchors.begin(), plan.anchors.end(), p) == plan.anchors.end()) plan.anchors.push_back(p);
    }
    double e = m.support_extent();
    if (std::isfinite(e)) extent = std::max(extent, e);
  }
  if (!(extent > 0.0)) {
    for (const Point& a : plan.anchors) extent = std::max(extent, norm(a));
  }
  if (!(extent > 0.0)) extent = 1.0;
  if (plan.anchors.empty()) plan.anchors.push_back(Point(plan.dim, 0.0));
  plan.lattice_lo = -extent;
  plan.lattice_hi = extent;
  plan.lattice_per_axis = opts.lattice_per_axis;
  plan.r_min = opts.r_min_factor * extent;
  plan.r_max = opts.r_max_factor * extent;
  plan.per_decade = opts.per_decade;
  plan.validate();
  return plan;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::finite:
      return "finite";
    case Verdict::divergent:
      return "divergent";
    default:
      return "inapplicable";
  }
}

namespace {

struct Sweep {
  double sup = 0.0;
  Point center;
  double radius = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::optional<double> exponent;
  bool infinite = false;
};

Sweep sweep(const SamplingPlan& plan, const BallFunctional& f, double slope_tol) {
  Sweep out;
  const std::vector<double> radii = plan.radii();
  for (const Point& c : plan.centers()) {
    std::vector<double> vals(radii.size(), 0.0);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double v = 0.0;
      try {
        v = f(c, radii[i]);
      } catch (const std::domain_error&) {
        ++out.skipped;
        continue;
      }
      if (std::isnan(v)) {
        ++out.skipped;
        continue;
      }
      ++out.samples;
      vals[i] = v;
      if (v > out.sup || (out.center.empty() && v >= out.sup)) {
        out.sup = v;
        out.center = c;
        out.radius = radii[i];
      }
      if (std::isinf(v)) out.infinite = true;
    }
    if (radii.size() >= 3) {
      auto slope = [&](std::size_t i, std::size_t j) {
        return std::log(vals[j] / vals[i]) / std::log(radii[j] / radii[i]);
      };
      if (vals[0] > 0.0 && vals[1] > 0.0 && std::isfinite(vals[0])) {
        double s = slope(0, 1);
        if (s < -slope_tol && (!out.exponent || s < *out.exponent)) out.exponent = s;
      }
      std::size_t m = radii.size() - 1;
      if (vals[m] > 0.0 && vals[m - 1] > 0.0 && std::isfinite(vals[m])) {
        double s = slope(m - 1, m);
        if (s > slope_tol && !out.exponent) out.exponent = s;
      }
    }
  }
  return out;
}

}  // namespace

ConditionReport sup_over_plan(const std::string& criterion, const SamplingPlan& plan, const BallFunctional& f,
                              bool check_stability, double slope_tol) {
  plan.validate();
  ConditionReport report;
  report.criterion = criterion;
  report.plan = plan;
  Sweep base = sweep(plan, f, slope_tol);
  report.sup_constant = base.sup;
  report.center = base.center;
  report.radius = base.radius;
  report.samples = base.samples;
  report.skipped = base.skipped;
  report.refined_constant = std::nan("");
  if (base.infinite) {
    report.verdict = Verdict::divergent;
    report.sup_constant = kInf;
    report.notes.push_back("infinite value at a sampled ball");
    return report;
  }
  if (base.exponent) {
    report.verdict = Verdict::divergent;
    report.divergence_exponent = base.exponent;
    report.notes.push_back("log-log slope indicates unbounded growth at the end of the radius range");
    return report;
  }
  report.verdict = Verdict::finite;
  if (check_stability) {
    Sweep fine = sweep(plan.refined(), f, slope_tol);
    report.refined_constant = fine.sup;
    double denom = std::max(base.sup, fine.sup);
    if (fine.infinite || fine.exponent || (denom > 0.0 && std::abs(fine.sup - base.sup) > 0.1 * denom)) {
      report.verdict = Verdict::divergent;
      report.divergence_exponent = fine.exponent;
      report.notes.push_back("supremum unstable under refinement of the plan");
    }
  }
  return report;
}

}  // namespace wolffkit

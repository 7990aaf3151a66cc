#include "wolffkit/report.hpp"

#include <charconv>
#include <cmath>

namespace wolffkit {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_point(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += format_number(p[i]);
  }
  return s + ")";
}

void Report::put(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Report::put(const std::string& key, double value) { put(key, format_number(value)); }
void Report::put(const std::string& key, int value) { put(key, std::to_string(value)); }
void Report::put(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
void Report::put(const std::string& key, bool value) { put(key, std::string(value ? "yes" : "no")); }
void Report::put(const std::string& key, const Point& value) { put(key, format_point(value)); }

std::string Report::str() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + ": " + v + "\n";
  return s;
}

void append_plan(Report& r, const std::string& prefix, const SamplingPlan& plan) {
  const std::string p = prefix + ".";
  r.put(p + "centers", plan.centers().size());
  r.put(p + "anchors", plan.anchors.size());
  r.put(p + "lattice_per_axis", plan.lattice_per_axis);
  r.put(p + "lattice_lo", plan.lattice_lo);
  r.put(p + "lattice_hi", plan.lattice_hi);
  r.put(p + "r_min", plan.r_min);
  r.put(p + "r_max", plan.r_max);
  r.put(p + "per_decade", plan.per_decade);
}

void append_condition(Report& r, const std::string& prefix, const ConditionReport& c, bool with_plan) {
  const std::string p = prefix + ".";
  r.put(p + "criterion", c.criterion);
  r.put(p + "verdict", to_string(c.verdict));
  r.put(p + "sup_constant", c.sup_constant);
  if (!c.center.empty()) {
    r.put(p + "center", c.center);
    r.put(p + "radius", c.radius);
  }
  r.put(p + "samples", c.samples);
  if (c.skipped) r.put(p + "skipped", c.skipped);
  if (c.divergence_exponent) r.put(p + "divergence_exponent", *c.divergence_exponent);
  if (!std::isnan(c.refined_constant)) r.put(p + "refined_constant", c.refined_constant);
  for (std::size_t i = 0; i < c.notes.size(); ++i) r.put(p + "note" + std::to_string(i + 1), c.notes[i]);
  if (with_plan) append_plan(r, prefix + ".plan", c.plan);
}

void append_composite(Report& r, const CompositeReport& c) {
  r.put("criterion", c.criterion);
  r.put("verdict", to_string(c.verdict));
  for (std::size_t i = 0; i < c.notes.size(); ++i) r.put("note" + std::to_string(i + 1), c.notes[i]);
  for (const ConditionReport& cond : c.conditions) append_condition(r, "condition." + cond.criterion, cond);
  for (const ConditionReport& cond : c.conditions) {
    if (cond.plan.dim > 0) {
      append_plan(r, "plan", cond.plan);
      break;
    }
  }
}

void append_norm(Report& r, const std::string& prefix, const NormEstimate& e) {
  const std::string p = prefix + ".";
  r.put(p + "value", e.value);
  r.put(p + "verdict", to_string(e.verdict));
  for (std::size_t i = 0; i < e.by_refinement.size(); ++i) r.put(p + "refinement" + std::to_string(i), e.by_refinement[i]);
  for (std::size_t i = 0; i < e.growth.size(); ++i) r.put(p + "growth" + std::to_string(i + 1), e.growth[i]);
  if (!e.center.empty()) {
    r.put(p + "center", e.center);
    r.put(p + "radius", e.radius);
  }
  r.put(p + "samples", e.samples);
  if (e.skipped) r.put(p + "skipped", e.skipped);
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::finite:
      return 0;
    case Verdict::divergent:
      return 2;
    case Verdict::inapplicable:
      return 3;
  }
  return 0;
}

}  // namespace wolffkit

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wolffkit/regularity.hpp"
#include "wolffkit/sampling.hpp"

namespace wolffkit {

/// Shortest round-tripping text for a double; "inf", "-inf" and "nan" for
/// the special values.
std::string format_number(double v);
std::string format_point(const Point& p);

/// Structured text report: `key: value` lines in insertion order.
class Report {
 public:
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, const char* value) { put(key, std::string(value)); }
  void put(const std::string& key, double value);
  void put(const std::string& key, int value);
  void put(const std::string& key, std::size_t value);
  void put(const std::string& key, bool value);
  void put(const std::string& key, const Point& value);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Keys are prefixed with `prefix` followed by a dot.
void append_plan(Report& r, const std::string& prefix, const SamplingPlan& plan);
void append_condition(Report& r, const std::string& prefix, const ConditionReport& c, bool with_plan = false);
void append_composite(Report& r, const CompositeReport& c);
void append_norm(Report& r, const std::string& prefix, const NormEstimate& e);

/// 0 finite, 2 divergent, 3 inapplicable.
int exit_code(Verdict v);

}  // namespace wolffkit

#pragma once

#include <cstdint>
#include <random>

#include "wolffkit/measure.hpp"

namespace wolffkit {

/// Seeded source of random measures. Draws use only the raw 64-bit engine
/// output, so a seed gives the same measures on every platform.
class MeasureSampler {
 public:
  explicit MeasureSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  Point point_in_cube(int dim, double half_width);

  /// `count` atoms in [-half_width, half_width)^n with weights in [0.1, 1).
  Measure dirac_sum(int dim, int count, double half_width = 1.0);
  /// `count` uniform balls with centers in the cube, radii in
  /// [r_lo, r_hi) and masses in [0.1, 1).
  Measure ball_cloud(int dim, int count, double half_width = 1.0, double r_lo = 0.05, double r_hi = 0.5);

 private:
  std::mt19937_64 engine_;
};

}  // namespace wolffkit

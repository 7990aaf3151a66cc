#pragma once

#include <optional>
#include <vector>

#include "wolffkit/measure.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/sampling.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

/// Half-open dyadic cube 2^level * [m, m + 1)^n.
struct DyadicCube {
  int level = 0;
  std::vector<long long> index;

  static DyadicCube containing(std::span<const double> x, int level);

  int dim() const { return static_cast<int>(index.size()); }
  double side() const { return std::ldexp(1.0, level); }
  Point lower() const;
  Point upper() const;
  bool contains(std::span<const double> x) const;
  /// x in the tripled concentric cube Q* = 2^level * [m - 1, m + 2)^n.
  bool star_contains(std::span<const double> x) const;
  bool contains(const DyadicCube& other) const;
  DyadicCube parent() const;
  std::vector<DyadicCube> children() const;

  bool operator==(const DyadicCube&) const = default;
};

/// Cubes of side 2^k with k_min <= k <= k_max. When a region is set, cubes
/// are enumerated only inside the half-open box [region_lo, region_hi).
struct DyadicFamily {
  int k_min = -10;
  int k_max = 10;
  std::optional<Point> region_lo;
  std::optional<Point> region_hi;

  void validate(int dim) const;
};

/// Masses of half-open boxes. Atoms are exact, Lebesgue boxes are exact,
/// other densities go through quadrature nodes.
class CubeMeasure {
 public:
  static CubeMeasure from_measure(const Measure& mu, const NodeOptions& opts = {});
  /// Lebesgue measure restricted to the box [lo, hi).
  static CubeMeasure lebesgue_box(Point lo, Point hi);

  int dim() const { return dim_; }
  double box_mass(std::span<const double> lo, std::span<const double> hi) const;
  double mass(const DyadicCube& q, bool star = false) const;
  double total() const;
  bool is_zero() const { return box_ == std::nullopt && points_.empty(); }
  /// Bounding box of the support, as [lo, hi].
  std::pair<Point, Point> bounds() const;

 private:
  friend struct CarlesonWalker;
  int dim_ = 0;
  std::vector<WeightedNode> points_;
  std::optional<std::pair<Point, Point>> box_;
};

struct DyadicSum {
  double value = 0.0;
  /// Term per level, k_min first.
  std::vector<double> terms;
  bool divergent = false;
  /// Estimated contribution of the levels outside the family.
  double truncation_estimate = 0.0;
};

/// Sum over levels of (mu(Q) / l(Q)^(n-p))^(1/(p-1)) for the cube Q at that
/// level containing x.
DyadicSum dyadic_wolff(const CubeMeasure& mu, std::span<const double> x, const SpaceParams& sp,
                       const DyadicFamily& fam);
/// As dyadic_wolff with mu(Q*) in place of mu(Q).
DyadicSum modified_dyadic_wolff(const CubeMeasure& mu, std::span<const double> x, const SpaceParams& sp,
                                const DyadicFamily& fam);

struct CarlesonResult {
  double value = 0.0;
  /// Total of the terms at each depth below P, P itself first.
  std::vector<double> level_totals;
  bool divergent = false;
  double truncation_estimate = 0.0;
};

/// Sum over family cubes Q inside P of sigma(Q)^p' / l(Q)^((n-p)/(p-1)).
CarlesonResult carleson_sum(const CubeMeasure& sigma, const DyadicCube& P, const SpaceParams& sp,
                            const DyadicFamily& fam);

struct CarlesonConstant {
  double constant = 0.0;
  std::optional<DyadicCube> achieving;
  bool divergent = false;
  std::size_t cubes = 0;
};

/// sup over family cubes P with sigma(P) > 0 of carleson_sum(P) / sigma(P).
/// Zero for the zero measure.
CarlesonConstant carleson_constant(const CubeMeasure& sigma, const SpaceParams& sp, const DyadicFamily& fam);

/// Number of level-k cubes Q with x in Q*.
int finite_intersection_count(std::span<const double> x, int k);

struct Lemma52Config {
  QuadratureConfig quad;
  NodeOptions nodes{4, 1, 8, 6};
  PlanOptions plan;
};

struct Lemma52Result {
  double lhs = 0.0;
  double rhs = 0.0;
  double c_ball = 0.0;
  double ratio = 0.0;
  bool divergent = false;
};

/// lhs = int (W_p mu)^(p-1) dsigma, rhs = int W_p sigma dmu and the ball
/// capacity constant c of sigma; ratio = lhs / (c^((p-2)/(p-1)) rhs).
Lemma52Result verify_lemma52(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                             const Lemma52Config& cfg = {});

}  // namespace wolffkit

#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "wolffkit/space.hpp"

namespace wolffkit {

struct Atom {
  Point point;
  double weight = 0.0;
};

/// Density coeff * |x|^gamma on r_lo <= |x| < r_hi, centered at the origin.
struct RadialPiece {
  double coeff = 0.0;
  double gamma = 0.0;
  double r_lo = 0.0;
  double r_hi = kInf;
};

/// Uniform density on B(center, radius) with total mass `weight`.
struct UniformBall {
  Point center;
  double radius = 0.0;
  double weight = 0.0;
};

/// A radially symmetric density piece about `center`, clipped to the
/// intersection of `clip` balls. Every measure flattens to atoms and shells.
struct Shell {
  Point center;
  double coeff = 0.0;
  double gamma = 0.0;
  double r_lo = 0.0;
  double r_hi = kInf;
  std::vector<Ball> clip;

  double density_at(std::span<const double> y) const;
  /// Unclipped mass on lo <= |y - center| < min(hi, r).
  double radial_mass(int n, double r) const;
  bool is_uniform_ball() const { return gamma == 0.0 && r_lo == 0.0 && std::isfinite(r_hi); }
};

struct FlatMeasure {
  int dim = 0;
  std::vector<Atom> atoms;
  std::vector<Shell> shells;
};

class Measure;

struct DiracSumNode {
  std::vector<Atom> atoms;
};
struct RadialDensityNode {
  std::vector<RadialPiece> pieces;
};
struct BallCloudNode {
  std::vector<UniformBall> balls;
};
struct RestrictedNode;
struct ScaledNode;
struct SumNode;
using MeasureNode = std::variant<DiracSumNode, RadialDensityNode, BallCloudNode, RestrictedNode,
                                 ScaledNode, SumNode>;

/// Locally finite positive Radon measure from a computable subclass.
///
/// Values are immutable; `restricted` and `scaled` return lazy views that
/// share the underlying data. Every measure also carries a flattened
/// representation (atoms plus clipped radial shells) used for evaluation.
class Measure {
 public:
  static Measure zero(int dim);
  static Measure dirac(Point point, double weight = 1.0);
  static Measure dirac_sum(int dim, std::vector<Atom> atoms);
  static Measure radial_density(int dim, std::vector<RadialPiece> pieces);
  static Measure ball_cloud(int dim, std::vector<UniformBall> balls);
  /// Lebesgue measure restricted to B(center, radius).
  static Measure lebesgue_ball(Point center, double radius);
  static Measure sum(int dim, std::vector<Measure> parts);

  int dim() const;
  const MeasureNode& node() const;
  const FlatMeasure& flat() const;

  bool is_zero() const { return flat().atoms.empty() && flat().shells.empty(); }
  bool has_atoms() const { return !flat().atoms.empty(); }
  /// All mass is symmetric about the origin (atoms at 0, unclipped shells centered at 0).
  bool is_radial() const;

  Measure restricted(const Ball& ball) const;
  Measure scaled(double factor) const;

  /// Smallest R with supp(mu) inside the closed ball B(x, R); +inf if unbounded.
  double saturation_radius(std::span<const double> x) const;
  /// Lower bound on dist(x, supp mu).
  double support_distance(std::span<const double> x) const;
  /// Radii at which rho -> mu(B(x, rho)) may fail to be smooth.
  std::vector<double> breakpoints(std::span<const double> x) const;
  /// Atom locations, shell centers and clip centers.
  std::vector<Point> support_points() const;
  /// Radii bounding the support: max over components of |center| + extent.
  double support_extent() const;

 private:
  struct Impl;
  explicit Measure(std::shared_ptr<const Impl> impl);
  static Measure from_node(int dim, MeasureNode node);
  std::shared_ptr<const Impl> impl_;
};

struct RestrictedNode {
  Measure base;
  Ball ball;
};
struct ScaledNode {
  Measure base;
  double factor = 1.0;
};
struct SumNode {
  std::vector<Measure> parts;
};

/// mu(B) for the closed ball B. Exact for atoms, centered radial shells and
/// unclipped uniform balls; 1-D (or nested) quadrature with tolerance `tol`
/// otherwise.
double ball_mass(const Measure& mu, const Ball& ball, double tol = 1e-10);
Measure restrict(const Measure& mu, const Ball& ball);
Measure scale(const Measure& mu, double t);
/// Replaces every atom by a uniform ball of radius 1/k and widens every
/// uniform ball by 1/k. Each point moves by at most 1/k, so mass is preserved
/// and mu_k(B(x,R)) <= mu(B(x, R + 1/k)).
Measure mollify(const Measure& mu, int k);
/// mu(R^n); +inf when a radial piece carries infinite mass.
double total_mass(const Measure& mu);

struct WeightedNode {
  Point x;
  double weight = 0.0;
  /// Radius of a ball with the node's cell volume; zero for atoms.
  double cell_radius = 0.0;
};

struct NodeOptions {
  int radial_order = 4;
  int radial_panels_per_halving = 1;
  int innermost_halvings = 14;
  int angular = 8;
};

/// Deterministic discretization of mu by weighted points. Atoms are kept
/// exactly; shells use radial Gauss panels times a product angular rule with
/// panel masses normalized to the exact clipped mass.
std::vector<WeightedNode> quadrature_nodes(const Measure& mu, const NodeOptions& opts = {});

/// Builds a ball cloud from weighted nodes, one uniform ball of radius
/// `cell_radius` (or `min_radius` for atoms) per node.
Measure blob_measure(int dim, const std::vector<WeightedNode>& nodes, double min_radius);

}  // namespace wolffkit

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wolffkit/measure.hpp"
#include "wolffkit/radial.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

struct FixedPointConfig {
  double tol = 1e-8;
  int max_iter = 500;
  /// Super-natural iterations stop as diverged once sup u exceeds this
  /// multiple of sup W_p mu.
  double divergence_factor = 1e3;
  /// Relaxation weight of the new iterate; 1 is the plain iteration.
  double damping = 1.0;
  /// Radial collocation nodes per decade.
  int points_per_decade = 24;
  /// Log-grid panels per decade for the inner d(rho)/rho integrals.
  int rho_panels_per_decade = 8;
  /// Quadrature nodes of sigma in the non-radial mode.
  NodeOptions nodes{2, 1, 5, 4};
};

enum class FixedPointStatus { converged, diverged, max_iter };

std::string to_string(FixedPointStatus s);

struct FixedPointResult {
  std::vector<Point> nodes;
  std::vector<double> values;
  /// sigma-weights w_i with int f dsigma ~ sum_i w_i f(node_i).
  std::vector<double> sigma_weights;
  /// W_p mu at the nodes.
  std::vector<double> wolff_mu;
  int iterations = 0;
  /// sup_i |v_i - T(v)_i| / sup_i |v_i| at the returned iterate.
  double residual = 0.0;
  /// Same residual with the inner quadrature refined twofold.
  double posthoc_residual = 0.0;
  /// Relative sup change per iteration.
  std::vector<double> changes;
  FixedPointStatus status = FixedPointStatus::max_iter;
  /// Radial profile through the nodes (radial mode only).
  std::optional<RadialFunction> profile;
  /// max_i v_i / W_p mu(node_i) over nodes where W_p mu > 0.
  double ratio_to_wolff_mu = 0.0;

  bool radial() const { return profile.has_value(); }
  /// int v^q dsigma.
  double sigma_moment(double q) const;
};

/// Solves v = W_p(v^q sigma + mu) for 0 < q < p - 1 by iteration from
/// W_p mu + (W_p sigma)^((p-1)/(p-1-q)). Radial data use a 1-D log grid;
/// otherwise sigma is discretized by quadrature nodes.
FixedPointResult fixed_point_subnatural(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                        const FixedPointConfig& cfg = {});

/// Monotone iteration u_{k+1} = W_p(u_k^q sigma + mu) from W_p mu for q > p - 1.
FixedPointResult fixed_point_supernatural(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                          const FixedPointConfig& cfg = {});

/// W_p of a weighted sum of uniform balls plus a fixed measure, evaluated at
/// fixed points. Geometry is precomputed so repeated weights are cheap.
class BlobWolff {
 public:
  BlobWolff(const SpaceParams& sp, std::vector<WeightedNode> blobs, std::vector<Point> targets,
            const Measure& fixed, int rho_panels_per_decade = 8);

  /// W_p(sum_j c_j U_j + fixed)(target_i), U_j uniform on blob j with unit mass.
  std::vector<double> apply(const std::vector<double>& coeffs, bool include_fixed = true) const;
  std::size_t size() const { return blobs_.size(); }

 private:
  struct Target {
    std::vector<double> rho;
    std::vector<double> weight;
    std::vector<double> fixed_mass;
    /// Blobs ordered by |x - c| + r; blob order[k] is fully inside the
    /// first `inside[k]` entries.
    std::vector<std::size_t> order;
    std::vector<std::size_t> inside;
    std::vector<std::vector<std::pair<std::size_t, double>>> partial;
    double saturation = 0.0;
    double fixed_total = 0.0;
  };

  SpaceParams sp_;
  std::vector<WeightedNode> blobs_;
  std::vector<Target> targets_;
};

}  // namespace wolffkit

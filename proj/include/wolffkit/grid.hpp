#pragma once

#include <string>
#include <vector>

#include "wolffkit/measure.hpp"
#include "wolffkit/radial.hpp"
#include "wolffkit/space.hpp"

namespace wolffkit {

struct GridConfig {
  /// Stop once an iteration lowers the energy by less than tol * |energy|.
  double tol = 1e-10;
  int max_iter = 20000;
  /// Stored correction pairs of the limited-memory quasi-Newton update.
  int memory = 10;
};

/// Node values on the lattice h Z^n inside [-N, N]^n; boundary nodes are 0.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int dim, double half_width, double h);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  double h() const { return h_; }
  /// Nodes per axis, 2N/h + 1.
  int per_axis() const { return per_axis_; }
  std::size_t size() const { return values_.size(); }

  Point node(std::size_t i) const;
  std::size_t index_of(std::span<const int> multi) const;
  bool on_boundary(std::size_t i) const;
  /// Piecewise linear interpolant on the Kuhn triangulation; 0 outside the box.
  double operator()(std::span<const double> x) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Energy after each accepted iteration, initial value first.
  std::vector<double> energy_history;
  int iterations = 0;
  bool converged = false;

 private:
  int dim_ = 0;
  double half_width_ = 0.0;
  double h_ = 0.0;
  int per_axis_ = 0;
  std::vector<double> values_;
};

/// Discrete energy sum_T |grad u_T|^p |T| / p - sum_i u_i mu_i over P1
/// functions on the Kuhn triangulation of [-N, N]^n with zero boundary values.
class GridProblem {
 public:
  GridProblem(const Measure& mu, double half_width, double h, const SpaceParams& sp);

  const GridFunction& shape() const { return shape_; }
  /// Load vector: atoms go to the nearest node, other parts are spread by
  /// multilinear weights from fine quadrature nodes.
  const std::vector<double>& loads() const { return loads_; }
  double energy(const std::vector<double>& u) const;
  /// Energy and its gradient; boundary entries of the gradient are 0.
  double energy(const std::vector<double>& u, std::vector<double>& grad) const;

 private:
  SpaceParams sp_;
  GridFunction shape_;
  std::vector<double> loads_;
  std::vector<std::vector<int>> perms_;
};

/// Minimizes the grid energy by limited-memory quasi-Newton descent with
/// backtracking. Throws std::runtime_error if a line search cannot decrease
/// the energy.
GridFunction grid_solve(const Measure& mu, double half_width, double h, const SpaceParams& sp,
                        const GridConfig& cfg = {});

struct SweepReport {
  std::vector<double> half_widths;
  std::vector<GridFunction> solutions;
  /// Sup-relative change between consecutive solutions on the smallest box.
  std::vector<double> changes;
  /// Changes decrease along the sweep.
  bool stabilizing = true;
  std::vector<std::string> notes;
};

SweepReport expanding_domain_sweep(const Measure& mu, std::vector<double> half_widths, double h, const SpaceParams& sp,
                                   const GridConfig& cfg = {});

/// Least-squares fit of A r^(-s) + B to the node values with r_lo <= |x| <= r_hi.
struct PowerFit {
  double coeff = 0.0;
  double exponent = 0.0;
  double offset = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

PowerFit fit_power_law(const GridFunction& u, double r_lo, double r_hi);

struct RadialComparison {
  /// sup |u - (f - c)| / sup |f - c| over the compared nodes.
  double sup_rel_error = 0.0;
  /// The additive constant c; chosen to minimize the error.
  double shift = 0.0;
  std::size_t nodes = 0;
};

/// Compares u with a radial profile on the half-box |x|_inf <= N/2, leaving
/// out |x| < exclude_radius.
RadialComparison compare_with_radial(const GridFunction& u, const RadialFunction& f, double exclude_radius);

}  // namespace wolffkit

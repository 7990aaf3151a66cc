#include "wolffkit/measure.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

struct Measure::Impl {
  int dim = 0;
  MeasureNode node;
  FlatMeasure flat;
};

namespace {

void require_dim(int dim, std::span<const double> x, const char* what) {
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": point dimension does not match measure");
  }
}

// Keeps the smallest balls; a ball containing another one adds no constraint.
void reduce_clip(std::vector<Ball>& balls) {
  std::sort(balls.begin(), balls.end(),
            [](const Ball& a, const Ball& b) { return a.radius < b.radius; });
  std::vector<Ball> kept;
  for (const Ball& b : balls) {
    bool redundant = std::any_of(kept.begin(), kept.end(), [&](const Ball& k) { return b.contains(k); });
    if (!redundant) kept.push_back(b);
  }
  balls = std::move(kept);
}

// Intersects the shell's support with `b`; false when nothing is left.
bool clip_shell(Shell& s, const Ball& b) {
  double d = distance(b.center, s.center);
  if (d + s.r_hi <= b.radius) return true;
  if (d >= b.radius + s.r_hi) return false;
  if (d + b.radius <= s.r_lo) return false;
  if (d == 0.0) {
    s.r_hi = std::min(s.r_hi, b.radius);
    return s.r_hi > s.r_lo;
  }
  s.clip.push_back(b);
  reduce_clip(s.clip);
  for (std::size_t i = 0; i < s.clip.size(); ++i)
    for (std::size_t j = i + 1; j < s.clip.size(); ++j)
      if (s.clip[i].disjoint(s.clip[j])) return false;
  return true;
}

double power_integral(double e, double a, double b) {
  // \int_a^b s^{e-1} ds
  if (!(b > a)) return 0.0;
  if (std::abs(e) < 1e-14) return (a > 0.0) ? std::log(b / a) : kInf;
  if (std::isinf(b)) return e < 0.0 ? -std::pow(a, e) / e : kInf;
  if (a == 0.0) return e > 0.0 ? std::pow(b, e) / e : kInf;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

double one_ball_shell_mass(int n, const Shell& s, const Ball& b, double tol) {
  double d = distance(b.center, s.center);
  double r = b.radius;
  if (s.gamma == 0.0 && std::isfinite(s.r_hi)) {
    double outer = ball_intersection_volume(n, s.r_hi, r, d);
    double inner = s.r_lo > 0.0 ? ball_intersection_volume(n, s.r_lo, r, d) : 0.0;
    return s.coeff * (outer - inner);
  }
  double omega = sphere_area(n);
  double e = s.gamma + n;
  double full_hi = std::min(s.r_hi, r - d);
  double mass = 0.0;
  if (full_hi > s.r_lo) mass += s.coeff * omega * power_integral(e, s.r_lo, full_hi);
  double a = std::max(s.r_lo, std::abs(r - d));
  double c = std::min(s.r_hi, r + d);
  if (c > a) {
    auto f = [&](double x) { return std::pow(x, e - 1.0) * sphere_fraction_in_ball(n, x, d, r); };
    mass += s.coeff * omega * integrate_finite(f, a, c, tol);
  }
  return mass;
}

double two_ball_shell_mass(int n, const Shell& s, const Ball& b1, const Ball& b2, double tol) {
  double d1 = distance(b1.center, s.center), d2 = distance(b2.center, s.center);
  double cos_angle = 0.0;
  for (std::size_t i = 0; i < s.center.size(); ++i) {
    cos_angle += (b1.center[i] - s.center[i]) * (b2.center[i] - s.center[i]);
  }
  cos_angle /= d1 * d2;
  double a = std::max({s.r_lo, d1 - b1.radius, d2 - b2.radius, 0.0});
  double c = std::min({s.r_hi, d1 + b1.radius, d2 + b2.radius});
  if (!(c > a)) return 0.0;
  double e = s.gamma + n;
  auto f = [&](double x) {
    double t1 = (x * x + d1 * d1 - b1.radius * b1.radius) / (2.0 * x * d1);
    double t2 = (x * x + d2 * d2 - b2.radius * b2.radius) / (2.0 * x * d2);
    return std::pow(x, e - 1.0) * double_cap_fraction(n, t1, t2, cos_angle);
  };
  std::vector<double> cuts{a, c};
  for (double k : {std::abs(b1.radius - d1), std::abs(b2.radius - d2)}) {
    if (k > a && k < c) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate_finite(f, cuts[i], cuts[i + 1], tol);
  return s.coeff * sphere_area(n) * total;
}

// Mass of the shell (with its own clip) inside the optional extra ball.
double shell_mass(int n, Shell s, const Ball* extra, double tol) {
  if (extra && !clip_shell(s, *extra)) return 0.0;
  switch (s.clip.size()) {
    case 0:
      return s.coeff * sphere_area(n) * power_integral(s.gamma + n, s.r_lo, s.r_hi);
    case 1:
      return one_ball_shell_mass(n, s, s.clip[0], tol);
    case 2:
      return two_ball_shell_mass(n, s, s.clip[0], s.clip[1], tol);
    default:
      throw std::domain_error(
          "ball_mass: a radial piece clipped by more than two non-nested balls is not supported");
  }
}

FlatMeasure flatten(int dim, const MeasureNode& node) {
  FlatMeasure flat;
  flat.dim = dim;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiracSumNode>) {
          flat.atoms = v.atoms;
        } else if constexpr (std::is_same_v<T, RadialDensityNode>) {
          for (const RadialPiece& piece : v.pieces) {
            flat.shells.push_back(Shell{Point(dim, 0.0), piece.coeff, piece.gamma, piece.r_lo, piece.r_hi, {}});
          }
        } else if constexpr (std::is_same_v<T, BallCloudNode>) {
          for (const UniformBall& b : v.balls) {
            double coeff = b.weight / (unit_ball_volume(dim) * std::pow(b.radius, dim));
            flat.shells.push_back(Shell{b.center, coeff, 0.0, 0.0, b.radius, {}});
          }
        } else if constexpr (std::is_same_v<T, RestrictedNode>) {
          const FlatMeasure& base = v.base.flat();
          for (const Atom& a : base.atoms) {
            if (v.ball.contains(a.point)) flat.atoms.push_back(a);
          }
          for (Shell s : base.shells) {
            if (clip_shell(s, v.ball)) flat.shells.push_back(std::move(s));
          }
        } else if constexpr (std::is_same_v<T, ScaledNode>) {
          flat = v.base.flat();
          for (Atom& a : flat.atoms) a.weight *= v.factor;
          for (Shell& s : flat.shells) s.coeff *= v.factor;
        } else {
          for (const Measure& part : v.parts) {
            const FlatMeasure& f = part.flat();
            flat.atoms.insert(flat.atoms.end(), f.atoms.begin(), f.atoms.end());
            flat.shells.insert(flat.shells.end(), f.shells.begin(), f.shells.end());
          }
        }
      },
      node);
  flat.dim = dim;
  return flat;
}

}  // namespace

double Shell::density_at(std::span<const double> y) const {
  double s = distance(y, center);
  if (s < r_lo || s >= r_hi) return 0.0;
  for (const Ball& b : clip) {
    if (!b.contains(y)) return 0.0;
  }
  if (s == 0.0) return gamma == 0.0 ? coeff : (gamma < 0.0 ? kInf : 0.0);
  return coeff * std::pow(s, gamma);
}

double Shell::radial_mass(int n, double r) const {
  return coeff * sphere_area(n) * power_integral(gamma + n, r_lo, std::min(r_hi, r));
}

Measure::Measure(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

int Measure::dim() const { return impl_->dim; }
const MeasureNode& Measure::node() const { return impl_->node; }
const FlatMeasure& Measure::flat() const { return impl_->flat; }

Measure Measure::from_node(int dim, MeasureNode node) {
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->flat = flatten(dim, node);
  impl->node = std::move(node);
  return Measure(std::move(impl));
}

Measure Measure::zero(int dim) {
  if (dim < 1) throw std::invalid_argument("Measure: dimension must be positive");
  return from_node(dim, DiracSumNode{});
}

Measure Measure::dirac(Point point, double weight) {
  int dim = static_cast<int>(point.size());
  return dirac_sum(dim, {Atom{std::move(point), weight}});
}

Measure Measure::dirac_sum(int dim, std::vector<Atom> atoms) {
  if (dim < 1) throw std::invalid_argument("Measure: dimension must be positive");
  for (const Atom& a : atoms) {
    require_dim(dim, a.point, "dirac_sum");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("dirac_sum: atom weights must be positive and finite");
  }
  return from_node(dim, DiracSumNode{std::move(atoms)});
}

Measure Measure::radial_density(int dim, std::vector<RadialPiece> pieces) {
  if (dim < 1) throw std::invalid_argument("Measure: dimension must be positive");
  for (const RadialPiece& p : pieces) {
    if (!(p.coeff > 0.0)) throw std::invalid_argument("radial_density: coefficients must be positive");
    if (!(p.r_lo >= 0.0) || !(p.r_hi > p.r_lo))
      throw std::invalid_argument("radial_density: each piece needs 0 <= r_lo < r_hi");
    if (p.r_lo == 0.0 && !(p.gamma > -dim))
      throw std::invalid_argument("radial_density: a piece touching 0 needs gamma > -n");
  }
  std::vector<RadialPiece> sorted = pieces;
  std::sort(sorted.begin(), sorted.end(),
            [](const RadialPiece& a, const RadialPiece& b) { return a.r_lo < b.r_lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].r_lo < sorted[i - 1].r_hi)
      throw std::invalid_argument("radial_density: piece intervals overlap");
  }
  return from_node(dim, RadialDensityNode{std::move(pieces)});
}

Measure Measure::ball_cloud(int dim, std::vector<UniformBall> balls) {
  if (dim < 1) throw std::invalid_argument("Measure: dimension must be positive");
  for (const UniformBall& b : balls) {
    require_dim(dim, b.center, "ball_cloud");
    if (!(b.radius > 0.0) || !(b.weight > 0.0))
      throw std::invalid_argument("ball_cloud: radii and weights must be positive");
  }
  return from_node(dim, BallCloudNode{std::move(balls)});
}

Measure Measure::lebesgue_ball(Point center, double radius) {
  int dim = static_cast<int>(center.size());
  double weight = unit_ball_volume(dim) * std::pow(radius, dim);
  return ball_cloud(dim, {UniformBall{std::move(center), radius, weight}});
}

Measure Measure::sum(int dim, std::vector<Measure> parts) {
  for (const Measure& m : parts) {
    if (m.dim() != dim) throw std::invalid_argument("Measure::sum: dimension mismatch");
  }
  return from_node(dim, SumNode{std::move(parts)});
}

Measure Measure::restricted(const Ball& ball) const {
  require_dim(dim(), ball.center, "restrict");
  return from_node(dim(), RestrictedNode{*this, ball});
}

Measure Measure::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("scale: factor must be positive and finite");
  return from_node(dim(), ScaledNode{*this, factor});
}

bool Measure::is_radial() const {
  for (const Atom& a : flat().atoms) {
    if (norm(a.point) != 0.0) return false;
  }
  for (const Shell& s : flat().shells) {
    if (norm(s.center) != 0.0 || !s.clip.empty()) return false;
  }
  return true;
}

double Measure::saturation_radius(std::span<const double> x) const {
  double r = 0.0;
  for (const Atom& a : flat().atoms) r = std::max(r, distance(x, a.point));
  for (const Shell& s : flat().shells) {
    double ext = distance(x, s.center) + s.r_hi;
    for (const Ball& b : s.clip) ext = std::min(ext, distance(x, b.center) + b.radius);
    r = std::max(r, ext);
  }
  return r;
}

double Measure::support_distance(std::span<const double> x) const {
  double best = kInf;
  for (const Atom& a : flat().atoms) best = std::min(best, distance(x, a.point));
  for (const Shell& s : flat().shells) {
    double d = distance(x, s.center);
    double gap = d < s.r_lo ? s.r_lo - d : (d > s.r_hi ? d - s.r_hi : 0.0);
    for (const Ball& b : s.clip) gap = std::max(gap, distance(x, b.center) - b.radius);
    best = std::min(best, gap);
  }
  return best;
}

std::vector<double> Measure::breakpoints(std::span<const double> x) const {
  std::vector<double> out;
  auto add = [&](double v) {
    if (v > 0.0 && std::isfinite(v)) out.push_back(v);
  };
  for (const Atom& a : flat().atoms) add(distance(x, a.point));
  for (const Shell& s : flat().shells) {
    double d = distance(x, s.center);
    for (double r : {s.r_lo, s.r_hi}) {
      if (r > 0.0 && std::isfinite(r)) {
        add(std::abs(d - r));
        add(d + r);
      }
    }
    add(d);
    for (const Ball& b : s.clip) {
      double dc = distance(x, b.center);
      add(std::abs(dc - b.radius));
      add(dc + b.radius);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Point> Measure::support_points() const {
  std::vector<Point> out;
  auto add = [&](const Point& p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  for (const Atom& a : flat().atoms) add(a.point);
  for (const Shell& s : flat().shells) {
    add(s.center);
    for (const Ball& b : s.clip) add(b.center);
  }
  return out;
}

double Measure::support_extent() const { return saturation_radius(Point(dim(), 0.0)); }

double ball_mass(const Measure& mu, const Ball& ball, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("ball_mass: tol must be positive");
  require_dim(mu.dim(), ball.center, "ball_mass");
  const FlatMeasure& flat = mu.flat();
  double mass = 0.0;
  for (const Atom& a : flat.atoms) {
    if (ball.contains(a.point)) mass += a.weight;
  }
  for (const Shell& s : flat.shells) {
    double d = distance(ball.center, s.center);
    if (d >= ball.radius + s.r_hi || d + ball.radius <= s.r_lo) continue;
    if (s.clip.empty() && d + s.r_hi <= ball.radius) {
      mass += s.radial_mass(flat.dim, kInf);
      continue;
    }
    mass += shell_mass(flat.dim, s, &ball, tol);
  }
  return mass;
}

Measure restrict(const Measure& mu, const Ball& ball) { return mu.restricted(ball); }

Measure scale(const Measure& mu, double t) { return mu.scaled(t); }

Measure mollify(const Measure& mu, int k) {
  if (k < 1) throw std::invalid_argument("mollify: k must be a positive integer");
  const FlatMeasure& flat = mu.flat();
  double eps = 1.0 / k;
  std::vector<UniformBall> balls;
  for (const Atom& a : flat.atoms) balls.push_back(UniformBall{a.point, eps, a.weight});
  for (const Shell& s : flat.shells) {
    if (!s.is_uniform_ball() || !s.clip.empty())
      throw std::invalid_argument("mollify: only Dirac sums and ball clouds are supported");
    double weight = s.coeff * unit_ball_volume(flat.dim) * std::pow(s.r_hi, flat.dim);
    balls.push_back(UniformBall{s.center, s.r_hi + eps, weight});
  }
  return Measure::ball_cloud(flat.dim, std::move(balls));
}

double total_mass(const Measure& mu) {
  const FlatMeasure& flat = mu.flat();
  double mass = 0.0;
  for (const Atom& a : flat.atoms) mass += a.weight;
  for (const Shell& s : flat.shells) mass += shell_mass(flat.dim, s, nullptr, 1e-12);
  return mass;
}

std::vector<WeightedNode> quadrature_nodes(const Measure& mu, const NodeOptions& opts) {
  const FlatMeasure& flat = mu.flat();
  const int n = flat.dim;
  std::vector<WeightedNode> out;
  for (const Atom& a : flat.atoms) out.push_back({a.point, a.weight, 0.0});
  if (flat.shells.empty()) return out;

  const std::vector<SphereNode> dirs = sphere_rule(n, opts.angular);
  const GaussRule& rule = gauss_legendre(opts.radial_order);
  const double vn = unit_ball_volume(n);
  for (const Shell& s : flat.shells) {
    double lo = s.r_lo, hi = s.r_hi;
    for (const Ball& b : s.clip) {
      double d = distance(b.center, s.center);
      hi = std::min(hi, d + b.radius);
      lo = std::max(lo, d - b.radius);
    }
    if (!std::isfinite(hi))
      throw std::domain_error("quadrature_nodes: measure has unbounded support");
    if (!(hi > lo)) continue;

    std::vector<double> edges;
    if (lo == 0.0) {
      edges.push_back(0.0);
      for (int j = opts.innermost_halvings; j >= 0; --j) edges.push_back(hi * std::ldexp(1.0, -j));
    } else {
      int halvings = std::max(1, static_cast<int>(std::ceil(std::log2(hi / lo))));
      for (int j = 0; j <= halvings; ++j) edges.push_back(lo * std::pow(hi / lo, double(j) / halvings));
    }
    std::vector<double> refined{edges.front()};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      for (int k = 1; k <= opts.radial_panels_per_halving; ++k) {
        refined.push_back(edges[i] + (edges[i + 1] - edges[i]) * k / opts.radial_panels_per_halving);
      }
    }

    std::size_t first = out.size();
    double kept = 0.0;
    for (std::size_t i = 0; i + 1 < refined.size(); ++i) {
      double a = refined[i], b = refined[i + 1];
      double panel_mass = s.radial_mass(n, b) - s.radial_mass(n, a);
      if (!(panel_mass > 0.0)) continue;
      std::vector<double> radii(rule.nodes.size()), w(rule.nodes.size());
      double raw = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        radii[j] = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j];
        w[j] = rule.weights[j] * 0.5 * (b - a) * std::pow(radii[j], s.gamma + n - 1);
        raw += w[j];
      }
      for (std::size_t j = 0; j < radii.size(); ++j) {
        double shell_weight = panel_mass * w[j] / raw;
        double shell_volume = sphere_area(n) * std::pow(radii[j], n - 1) * rule.weights[j] * 0.5 * (b - a);
        for (const SphereNode& d : dirs) {
          Point y(n);
          for (int c = 0; c < n; ++c) y[c] = s.center[c] + radii[j] * d.u[c];
          bool inside = std::all_of(s.clip.begin(), s.clip.end(), [&](const Ball& cb) { return cb.contains(y); });
          if (!inside) continue;
          double cell = std::pow(shell_volume * d.weight / vn, 1.0 / n);
          out.push_back({std::move(y), shell_weight * d.weight, cell});
          kept += shell_weight * d.weight;
        }
      }
    }
    if (!s.clip.empty() && kept > 0.0) {
      double exact = shell_mass(n, s, nullptr, 1e-10);
      for (std::size_t i = first; i < out.size(); ++i) out[i].weight *= exact / kept;
    }
  }
  return out;
}

Measure blob_measure(int dim, const std::vector<WeightedNode>& nodes, double min_radius) {
  std::vector<Atom> atoms;
  std::vector<UniformBall> balls;
  for (const WeightedNode& node : nodes) {
    if (!(node.weight > 0.0)) continue;
    double r = std::max(node.cell_radius, min_radius);
    if (r > 0.0) {
      balls.push_back({node.x, r, node.weight});
    } else {
      atoms.push_back({node.x, node.weight});
    }
  }
  if (atoms.empty()) return Measure::ball_cloud(dim, std::move(balls));
  if (balls.empty()) return Measure::dirac_sum(dim, std::move(atoms));
  return Measure::sum(dim, {Measure::dirac_sum(dim, std::move(atoms)), Measure::ball_cloud(dim, std::move(balls))});
}

}  // namespace wolffkit

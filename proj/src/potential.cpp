#include "wolffkit/potential.hpp"

#include <algorithm>
#include <stdexcept>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

namespace {

constexpr double kFlatExponent = 1e-6;

struct ScaleHint {
  double smallest = 1.0;
  double largest = 1.0;
};

ScaleHint scale_hint(const Measure& mu, std::span<const double> x) {
  ScaleHint hint;
  std::vector<double> bps = mu.breakpoints(x);
  if (!bps.empty()) {
    hint.smallest = bps.front();
    hint.largest = bps.back();
  }
  return hint;
}

bool has_atom_at(const Measure& mu, std::span<const double> x) {
  for (const Atom& a : mu.flat().atoms) {
    if (distance(x, a.point) == 0.0) return true;
  }
  return false;
}

PotentialEvaluation infinite(Method method, std::optional<double> exponent = std::nullopt) {
  PotentialEvaluation out;
  out.value = kInf;
  out.upper = kInf;
  out.err_estimate = 0.0;
  out.method = method;
  out.divergence_exponent = exponent;
  return out;
}

PotentialEvaluation dirac_layer(const Measure& mu, std::span<const double> x, double a, double theta,
                                double lambda) {
  std::vector<std::pair<double, double>> items;
  for (const Atom& atom : mu.flat().atoms) items.emplace_back(distance(x, atom.point), atom.weight);
  std::sort(items.begin(), items.end());
  PotentialEvaluation out;
  out.method = Method::exact_piecewise;
  if (a == 0.0 && !items.empty() && items.front().first == 0.0) return infinite(Method::exact_piecewise, -lambda);
  double mass = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    mass += items[i].second;
    if (i + 1 < items.size() && items[i + 1].first == items[i].first) continue;
    double lo = std::max(a, items[i].first);
    double hi = i + 1 < items.size() ? items[i + 1].first : kInf;
    if (!(hi > lo)) continue;
    double hi_term = std::isinf(hi) ? 0.0 : std::pow(hi, -lambda);
    total += std::pow(mass, theta) * (std::pow(lo, -lambda) - hi_term) / lambda;
  }
  out.value = total;
  out.upper = total;
  out.err_estimate = 1e-15 * total;
  return out;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (rho_min && !(*rho_min > 0.0)) throw std::invalid_argument("QuadratureConfig: rho_min must be positive");
  if (rho_max && !(*rho_max > 0.0)) throw std::invalid_argument("QuadratureConfig: rho_max must be positive");
  if (rho_min && rho_max && !(*rho_min < *rho_max))
    throw std::invalid_argument("QuadratureConfig: rho_min must be below rho_max");
  if (points_per_decade < 8) throw std::invalid_argument("QuadratureConfig: points_per_decade must be >= 8");
  if (!(tol > 0.0)) throw std::invalid_argument("QuadratureConfig: tol must be positive");
}

std::string to_string(Method m) { return m == Method::exact_piecewise ? "exact_piecewise" : "quadrature"; }

PotentialEvaluation layer_integral(const Measure& mu, std::span<const double> x, double a, double theta,
                                   double lambda, const QuadratureConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(x.size()) != mu.dim())
    throw std::invalid_argument("potential: point dimension does not match measure");
  if (!(lambda > 0.0)) throw std::invalid_argument("potential: decay exponent must be positive");
  if (!(a >= 0.0)) throw std::invalid_argument("potential: lower limit must be nonnegative");

  const FlatMeasure& flat = mu.flat();
  if (flat.shells.empty() && !cfg.force_quadrature) return dirac_layer(mu, x, a, theta, lambda);

  PotentialEvaluation out;
  out.method = Method::quadrature;
  if (mu.is_zero()) return out;
  if (a == 0.0 && has_atom_at(mu, x)) return infinite(Method::quadrature, -lambda);

  auto mass = [&](double rho) { return ball_mass(mu, Ball(Point(x.begin(), x.end()), rho), cfg.tol); };
  auto g = [&](double rho) {
    double m = mass(rho);
    return m > 0.0 ? std::pow(m, theta) * std::pow(rho, -lambda) : 0.0;
  };

  const ScaleHint hint = scale_hint(mu, x);
  const double lo_support = std::max(a, mu.support_distance(x));
  const double saturation = mu.saturation_radius(x);

  if (saturation <= lo_support) {
    double m = total_mass(mu);
    double start = std::max(a, saturation);
    if (start == 0.0) return infinite(Method::quadrature, -lambda);
    out.value = std::pow(m, theta) * std::pow(start, -lambda) / lambda;
    out.upper = out.value;
    return out;
  }

  double start = lo_support;
  double head = 0.0, head_err = 0.0;
  if (start == 0.0) {
    start = cfg.rho_min.value_or(1e-8 * hint.smallest);
    double m1 = mass(start), m2 = mass(2.0 * start), m4 = mass(4.0 * start);
    if (m1 > 0.0) {
      double e1 = theta * std::log2(m2 / m1) - lambda;
      double e2 = theta * std::log2(m4 / m2) - lambda;
      if (e1 <= kFlatExponent) return infinite(Method::quadrature, e1);
      double g1 = std::pow(m1, theta) * std::pow(start, -lambda);
      head = g1 / e1;
      head_err = e2 > kFlatExponent ? std::abs(g1 / e2 - head) : head;
    }
  }

  double stop = saturation;
  if (std::isinf(stop)) stop = cfg.rho_max.value_or(1e4 * std::max(hint.largest, 1.0));
  else if (cfg.rho_max) stop = std::max(stop, *cfg.rho_max);
  std::vector<double> bps = mu.breakpoints(x);
  LogGridIntegral body = integrate_log_grid(g, start, stop, bps, cfg.points_per_decade);

  double tail = 0.0, tail_err = 0.0;
  if (std::isfinite(saturation)) {
    double m = total_mass(mu);
    tail = std::pow(m, theta) * std::pow(stop, -lambda) / lambda;
  } else {
    double m1 = mass(stop), m2 = mass(2.0 * stop), m4 = mass(4.0 * stop);
    double e1 = theta * std::log2(m2 / m1) - lambda;
    double e2 = theta * std::log2(m4 / m2) - lambda;
    if (e2 >= -kFlatExponent) return infinite(Method::quadrature, e2);
    double g1 = std::pow(m1, theta) * std::pow(stop, -lambda);
    tail = g1 / -e1;
    tail_err = std::abs(g1 / -e2 - tail);
  }

  out.value = head + body.value + tail;
  out.err_estimate = head_err + body.err + tail_err;
  out.upper = out.value;
  return out;
}

PotentialEvaluation wolff(const Measure& mu, std::span<const double> x, const SpaceParams& sp,
                          const QuadratureConfig& cfg) {
  if (static_cast<int>(x.size()) != sp.n()) throw std::invalid_argument("wolff: point dimension must equal n");
  return layer_integral(mu, x, 0.0, 1.0 / (sp.p() - 1.0), sp.beta(), cfg);
}

PotentialEvaluation wolff_tail(const Measure& mu, std::span<const double> x, double R, const SpaceParams& sp,
                               const QuadratureConfig& cfg) {
  if (!(R > 0.0)) throw std::invalid_argument("wolff_tail: R must be positive");
  if (static_cast<int>(x.size()) != sp.n()) throw std::invalid_argument("wolff_tail: point dimension must equal n");
  return layer_integral(mu, x, R, 1.0 / (sp.p() - 1.0), sp.beta(), cfg);
}

PotentialEvaluation kernel_integral(const Measure& mu, std::span<const double> x, double s,
                                    const QuadratureConfig& cfg) {
  if (!(s > 0.0)) throw std::invalid_argument("kernel_integral: exponent must be positive");
  PotentialEvaluation out = layer_integral(mu, x, 0.0, 1.0, s, cfg);
  out.value *= s;
  out.upper *= s;
  out.err_estimate *= s;
  return out;
}

PotentialEvaluation riesz(const Measure& mu, std::span<const double> x, double alpha, const QuadratureConfig& cfg) {
  int n = mu.dim();
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("riesz: alpha must lie in (0, n)");
  return kernel_integral(mu, x, n - alpha, cfg);
}

PotentialEvaluation frac_maximal(const Measure& mu, std::span<const double> x, double alpha,
                                 const QuadratureConfig& cfg) {
  cfg.validate();
  const int n = mu.dim();
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("frac_maximal: alpha must lie in (0, n)");
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("frac_maximal: point dimension mismatch");
  const double s = n - alpha;
  const FlatMeasure& flat = mu.flat();

  if (flat.shells.empty() && !cfg.force_quadrature) {
    std::vector<std::pair<double, double>> items;
    for (const Atom& a : flat.atoms) items.emplace_back(distance(x, a.point), a.weight);
    std::sort(items.begin(), items.end());
    PotentialEvaluation out;
    if (!items.empty() && items.front().first == 0.0) return infinite(Method::exact_piecewise, -s);
    double mass = 0.0, best = 0.0;
    for (const auto& [d, w] : items) {
      mass += w;
      best = std::max(best, mass / std::pow(d, s));
    }
    out.value = out.upper = best;
    return out;
  }

  PotentialEvaluation out;
  out.method = Method::quadrature;
  if (mu.is_zero()) return out;
  if (has_atom_at(mu, x)) return infinite(Method::quadrature, -s);
  auto ratio = [&](double r) { return ball_mass(mu, Ball(Point(x.begin(), x.end()), r), cfg.tol) / std::pow(r, s); };

  const ScaleHint hint = scale_hint(mu, x);
  double start = mu.support_distance(x);
  const double saturation = mu.saturation_radius(x);
  bool from_zero = start == 0.0;
  if (from_zero) start = cfg.rho_min.value_or(1e-8 * hint.smallest);
  double stop = std::isinf(saturation) ? cfg.rho_max.value_or(1e4 * std::max(hint.largest, 1.0)) : saturation;

  if (from_zero) {
    double r1 = ratio(start), r2 = ratio(2.0 * start);
    if (r1 > 0.0 && std::log2(r2 / r1) < -kFlatExponent) return infinite(Method::quadrature, std::log2(r2 / r1));
  }
  if (std::isinf(saturation)) {
    double r1 = ratio(stop), r2 = ratio(2.0 * stop);
    if (r1 > 0.0 && std::log2(r2 / r1) > kFlatExponent) return infinite(Method::quadrature, std::log2(r2 / r1));
  }

  std::vector<double> radii = log_ladder(start, stop, 4 * cfg.points_per_decade);
  radii.push_back(start);
  radii.push_back(stop);
  for (double b : mu.breakpoints(x)) {
    if (b >= start && b <= stop) radii.push_back(b);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  double lower = 0.0, upper = 0.0;
  std::vector<double> masses(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    masses[i] = ball_mass(mu, Ball(Point(x.begin(), x.end()), radii[i]), cfg.tol);
    lower = std::max(lower, masses[i] / std::pow(radii[i], s));
  }
  upper = lower;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    upper = std::max(upper, masses[i + 1] / std::pow(radii[i], s));
  }
  out.value = lower;
  out.upper = upper;
  out.err_estimate = upper - lower;
  return out;
}

}  // namespace wolffkit

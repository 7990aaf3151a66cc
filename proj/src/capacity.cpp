#include "wolffkit/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

namespace {

double power_integral(double e, double a, double b) {
  if (!(b > a)) return 0.0;
  if (std::abs(e) < 1e-14) return a > 0.0 ? std::log(b / a) : kInf;
  if (a == 0.0) return e > 0.0 ? std::pow(b, e) / e : kInf;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

using Interval = std::pair<double, double>;

// Parameters rho >= 0 with |y + rho u - c| <= R.
std::optional<Interval> ray_ball(std::span<const double> y, std::span<const double> u, std::span<const double> c,
                                 double R) {
  double b = 0.0, dd = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double v = y[i] - c[i];
    b += u[i] * v;
    dd += v * v;
  }
  double disc = b * b - (dd - R * R);
  if (disc <= 0.0) return std::nullopt;
  double s = std::sqrt(disc);
  double hi = -b + s;
  if (hi <= 0.0) return std::nullopt;
  return Interval{std::max(0.0, -b - s), hi};
}

std::vector<Interval> intersect(const std::vector<Interval>& a, const Interval& b) {
  std::vector<Interval> out;
  for (const Interval& x : a) {
    double lo = std::max(x.first, b.first), hi = std::min(x.second, b.second);
    if (hi > lo) out.emplace_back(lo, hi);
  }
  return out;
}

// int |z - y|^(-s) dmu(z) by integrating along rays from y.
double ray_kernel_integral(const FlatMeasure& flat, std::span<const double> y, double s, int angular) {
  const int n = flat.dim;
  double total = 0.0;
  for (const Atom& a : flat.atoms) {
    double d = distance(y, a.point);
    if (d == 0.0) return kInf;
    total += a.weight * std::pow(d, -s);
  }
  if (flat.shells.empty()) return total;
  const std::vector<SphereNode> rule = sphere_rule(n, angular);
  const GaussRule& gauss = gauss_legendre(16);
  const double e = n - s;
  const double area = sphere_area(n);
  for (const Shell& sh : flat.shells) {
    const bool centered = distance(y, sh.center) == 0.0;
    double acc = 0.0;
    for (const SphereNode& dir : rule) {
      std::vector<Interval> pieces;
      if (std::isinf(sh.r_hi)) {
        pieces.emplace_back(0.0, kInf);
      } else if (auto outer = ray_ball(y, dir.u, sh.center, sh.r_hi)) {
        pieces.push_back(*outer);
      }
      if (sh.r_lo > 0.0) {
        if (auto inner = ray_ball(y, dir.u, sh.center, sh.r_lo)) {
          std::vector<Interval> kept;
          for (const Interval& p : pieces) {
            if (inner->first > p.first) kept.emplace_back(p.first, std::min(p.second, inner->first));
            if (inner->second < p.second) kept.emplace_back(std::max(p.first, inner->second), p.second);
          }
          pieces = kept;
        }
      }
      for (const Ball& b : sh.clip) {
        auto iv = ray_ball(y, dir.u, b.center, b.radius);
        pieces = iv ? intersect(pieces, *iv) : std::vector<Interval>{};
      }
      double line = 0.0;
      for (const auto& [a, b] : pieces) {
        if (centered) {
          line += sh.coeff * power_integral(sh.gamma + e, a, b);
        } else if (sh.gamma == 0.0) {
          line += sh.coeff * power_integral(e, a, b);
        } else {
          if (std::isinf(b)) throw std::domain_error("kernel integral: unbounded off-center density");
          auto density = [&](double rho) {
            double d2 = 0.0;
            for (int i = 0; i < n; ++i) {
              double v = y[i] + rho * dir.u[i] - sh.center[i];
              d2 += v * v;
            }
            return sh.coeff * std::pow(d2, 0.5 * sh.gamma);
          };
          double part = 0.0;
          if (a == 0.0) {
            if (!(e > 0.0)) return kInf;
            for (int i = 0; i < 16; ++i) {
              double t = 0.5 * (gauss.nodes[i] + 1.0);
              part += 0.5 * gauss.weights[i] * density(b * std::pow(t, 1.0 / e));
            }
            part *= std::pow(b, e) / e;
          } else {
            double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (int i = 0; i < 16; ++i) {
              double rho = mid + half * gauss.nodes[i];
              part += gauss.weights[i] * density(rho) * std::pow(rho, e - 1.0);
            }
            part *= half;
          }
          line += part;
        }
        if (std::isinf(line)) return kInf;
      }
      acc += dir.weight * line;
    }
    total += area * acc;
  }
  return total;
}

double kernel_moment(const Measure& sigma_b, std::span<const double> y, double s, const KappaTrials& trials) {
  bool clipped = std::any_of(sigma_b.flat().shells.begin(), sigma_b.flat().shells.end(),
                             [](const Shell& sh) { return !sh.clip.empty(); });
  if (!clipped) return kernel_integral(sigma_b, y, s, trials.quad).value;
  return ray_kernel_integral(sigma_b.flat(), y, s, trials.angular);
}

std::vector<Point> trial_points(const Measure& sigma, const Ball& ball, const KappaTrials& trials, bool& capped) {
  std::vector<Point> out{ball.center};
  auto add = [&](const Point& p) {
    if (ball.contains(p) && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  for (const Atom& a : sigma.flat().atoms) add(a.point);
  for (const Shell& s : sigma.flat().shells) add(s.center);
  const int n = static_cast<int>(ball.center.size());
  const double h = trials.lattice_spacing;
  if (h > 0.0) {
    // A cube holding a few times max_trials lattice points contains the nearest ones.
    double reach = h * (std::ceil(0.5 * std::pow(8.0 * static_cast<double>(trials.max_trials), 1.0 / n)) + 1.0);
    reach = std::min(ball.radius, reach);
    std::vector<long long> lo(n), hi(n);
    long long count = 1;
    for (int i = 0; i < n; ++i) {
      lo[i] = static_cast<long long>(std::ceil((ball.center[i] - reach) / h));
      hi[i] = static_cast<long long>(std::floor((ball.center[i] + reach) / h));
      count *= std::max(0LL, hi[i] - lo[i] + 1);
    }
    std::vector<Point> lattice;
    if (count > 0) {
      std::vector<long long> idx = lo;
      while (true) {
        Point p(n);
        for (int i = 0; i < n; ++i) p[i] = h * static_cast<double>(idx[i]);
        if (ball.contains(p)) lattice.push_back(std::move(p));
        int i = 0;
        while (i < n && ++idx[i] > hi[i]) {
          idx[i] = lo[i];
          ++i;
        }
        if (i == n) break;
      }
    }
    std::stable_sort(lattice.begin(), lattice.end(), [&](const Point& a, const Point& b) {
      return distance(a, ball.center) < distance(b, ball.center);
    });
    for (const Point& p : lattice) {
      if (out.size() > trials.max_trials) break;
      add(p);
    }
  }
  capped = out.size() > trials.max_trials;
  if (capped) out.resize(trials.max_trials);
  return out;
}

}  // namespace

double ball_capacity(double r, const SpaceParams& sp) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_capacity: radius must be positive");
  return sp.omega() * std::pow(sp.beta(), sp.p() - 1.0) * std::pow(r, sp.n() - sp.p());
}

ConditionReport capacity_condition_const(const Measure& sigma, const SpaceParams& sp, const SamplingPlan& plan,
                                         bool check_stability) {
  if (sigma.dim() != sp.n()) throw std::invalid_argument("capacity_condition_const: dimension mismatch");
  auto f = [&](const Point& c, double R) { return ball_mass(sigma, Ball(c, R)) / ball_capacity(R, sp); };
  return sup_over_plan("capacity_condition", plan, f, check_stability);
}

std::string to_string(KappaMethod m) { return m == KappaMethod::dirac_trials ? "dirac_trials" : "fixed_point"; }

KappaEstimate kappa_lower(const Measure& sigma, const Ball& ball, const SpaceParams& sp, const KappaTrials& trials) {
  if (sigma.dim() != sp.n() || static_cast<int>(ball.center.size()) != sp.n())
    throw std::invalid_argument("kappa_lower: dimension mismatch");
  const double q = sp.q();
  KappaEstimate est;
  est.ball = ball;
  est.method = KappaMethod::dirac_trials;
  est.caveat = "lower bound from Dirac trial measures";
  Measure sigma_b = sigma.restricted(ball);
  if (sigma_b.is_zero()) return est;
  const double beta = sp.beta();
  std::vector<Point> ys = trial_points(sigma, ball, trials, est.capped);
  if (sigma_b.has_atoms()) {
    est.lower = kInf;
    est.best_trial = sigma_b.flat().atoms.front().point;
    est.trial_count = ys.size();
    return est;
  }
  for (const Point& y : ys) {
    double moment = kernel_moment(sigma_b, y, beta * q, trials);
    double val = std::pow(moment, 1.0 / q) / beta;
    ++est.trial_count;
    if (val > est.lower || est.best_trial.empty()) {
      est.lower = std::max(est.lower, val);
      est.best_trial = y;
    }
    if (std::isinf(val)) break;
  }
  if (trials.include_self && std::isfinite(est.lower)) {
    std::vector<WeightedNode> nodes = quadrature_nodes(sigma_b, NodeOptions{2, 1, 5, 4});
    double mass = total_mass(sigma_b);
    double acc = 0.0;
    for (const WeightedNode& w : nodes) acc += w.weight * std::pow(wolff(sigma_b, w.x, sp, trials.quad).value, q);
    double val = std::pow(acc, 1.0 / q) / std::pow(mass, 1.0 / (sp.p() - 1.0));
    ++est.trial_count;
    est.lower = std::max(est.lower, val);
  }
  return est;
}

KappaEstimate kappa_fixed_point(const Measure& sigma, const Ball& ball, const SpaceParams& sp,
                                const FixedPointConfig& cfg) {
  const double q = sp.q();
  if (!(q < sp.p() - 1.0)) throw std::invalid_argument("kappa_fixed_point: need 0 < q < p - 1");
  KappaEstimate est;
  est.ball = ball;
  est.method = KappaMethod::fixed_point;
  est.caveat = "two-sided only up to dimensional constants";
  Measure sigma_b = sigma.restricted(ball);
  if (sigma_b.is_zero()) return est;
  FixedPointResult res = fixed_point_subnatural(sigma_b, Measure::zero(sp.n()), sp, cfg);
  if (res.status != FixedPointStatus::converged)
    throw std::runtime_error("kappa_fixed_point: fixed point did not converge (" + to_string(res.status) + ")");
  est.trial_count = res.values.size();
  est.lower = std::pow(res.sigma_moment(q), (sp.p() - 1.0 - q) / (q * (sp.p() - 1.0)));
  return est;
}

namespace {

IntrinsicResult intrinsic_integral(const Measure& sigma, std::span<const double> x, double R, const SpaceParams& sp,
                                   const IntrinsicConfig& cfg) {
  if (sigma.dim() != sp.n() || static_cast<int>(x.size()) != sp.n())
    throw std::invalid_argument("intrinsic_potential: dimension mismatch");
  if (cfg.per_decade < 2) throw std::invalid_argument("intrinsic_potential: per_decade must be >= 2");
  IntrinsicResult out;
  if (sigma.is_zero()) return out;
  if (sigma.has_atoms()) {
    out.value = kInf;
    out.divergent = true;
    return out;
  }
  const double gamma = sp.kappa_exponent();
  const double theta = 1.0 / (sp.p() - 1.0);
  const double beta = sp.beta();
  const int n = sp.n();
  const double saturation = sigma.saturation_radius(x);
  if (std::isinf(saturation)) throw std::invalid_argument("intrinsic_potential: sigma must have bounded support");
  const Point center(x.begin(), x.end());
  auto kappa = [&](double r) { return kappa_lower(sigma, Ball(center, r), sp, cfg.trials).lower; };
  auto integrand = [&](double r, double k) { return std::pow(std::pow(k, gamma) / std::pow(r, n - sp.p()), theta); };

  double start = std::max(R, sigma.support_distance(x));
  double head = 0.0;
  bool from_zero = start == 0.0;
  if (from_zero) start = cfg.r_min_factor * sigma.support_extent();
  if (start < saturation) {
    std::vector<double> radii = log_ladder(start, saturation, cfg.per_decade);
    radii.push_back(start);
    radii.push_back(saturation);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    std::vector<double> g(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double k = kappa(radii[i]);
      out.radii.push_back(radii[i]);
      out.kappas.push_back(k);
      if (std::isinf(k)) {
        out.value = kInf;
        out.divergent = true;
        return out;
      }
      g[i] = integrand(radii[i], k);
    }
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
      out.value += 0.5 * (g[i] + g[i + 1]) * std::log(radii[i + 1] / radii[i]);
    }
    if (from_zero && g[0] > 0.0 && g[1] > 0.0) {
      double e = std::log(g[1] / g[0]) / std::log(radii[1] / radii[0]);
      if (e <= 1e-6) {
        out.value = kInf;
        out.divergent = true;
        return out;
      }
      head = g[0] / e;
    }
  }
  double r_tail = std::max(start, saturation);
  double k_sat = kappa(r_tail);
  out.radii.push_back(r_tail);
  out.kappas.push_back(k_sat);
  if (std::isinf(k_sat)) {
    out.value = kInf;
    out.divergent = true;
    return out;
  }
  out.value += head + std::pow(k_sat, gamma * theta) * std::pow(r_tail, -beta) / beta;
  return out;
}

}  // namespace

IntrinsicResult intrinsic_potential(const Measure& sigma, std::span<const double> x, const SpaceParams& sp,
                                    const IntrinsicConfig& cfg) {
  return intrinsic_integral(sigma, x, 0.0, sp, cfg);
}

IntrinsicResult intrinsic_tail(const Measure& sigma, std::span<const double> x, double R, const SpaceParams& sp,
                               const IntrinsicConfig& cfg) {
  if (!(R > 0.0)) throw std::invalid_argument("intrinsic_tail: R must be positive");
  return intrinsic_integral(sigma, x, R, sp, cfg);
}

}  // namespace wolffkit

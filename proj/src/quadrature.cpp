#include "wolffkit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace wolffkit {

namespace {

GaussRule make_rule(int k) {
  GaussRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  for (int i = 0; i < k; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int k) {
  static const std::array<GaussRule, 65> rules = [] {
    std::array<GaussRule, 65> r;
    for (int k = 1; k <= 64; ++k) r[k] = make_rule(k);
    return r;
  }();
  if (k < 1 || k > 64) throw std::invalid_argument("gauss_legendre: order must be in [1, 64]");
  return rules[k];
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int k) {
  const GaussRule& rule = gauss_legendre(k);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

double integrate_finite(const std::function<double(double)>& f, double a, double b, double tol,
                        double* error) {
  if (error) *error = 0.0;
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  double value = integrator.integrate(f, a, b, tol, &err, &l1);
  if (error) *error = err;
  return value;
}

LogGridIntegral integrate_log_grid(const std::function<double(double)>& g, double a, double b,
                                   std::span<const double> breakpoints, int points_per_decade,
                                   int order) {
  LogGridIntegral out;
  if (!(b > a) || a <= 0.0) return out;
  std::vector<double> cuts{std::log(a)};
  for (double bp : breakpoints) {
    if (bp > a && bp < b && std::isfinite(bp)) cuts.push_back(std::log(bp));
  }
  cuts.push_back(std::log(b));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-13; }),
             cuts.end());

  const GaussRule& rule = gauss_legendre(order);
  auto composite = [&](int ppd) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      double t0 = cuts[s], t1 = cuts[s + 1];
      int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / std::log(10.0) * ppd)));
      double w = (t1 - t0) / panels;
      for (int k = 0; k < panels; ++k) {
        double mid = t0 + (k + 0.5) * w;
        double acc = 0.0;
        for (int i = 0; i < order; ++i) acc += rule.weights[i] * g(std::exp(mid + 0.5 * w * rule.nodes[i]));
        total += acc * 0.5 * w;
      }
    }
    return total;
  };
  double coarse = composite(points_per_decade);
  double fine = composite(2 * points_per_decade);
  out.value = fine;
  out.err = std::abs(fine - coarse);
  return out;
}

std::vector<SphereNode> sphere_rule(int n, int m) {
  if (n < 2 || m < 1) throw std::invalid_argument("sphere_rule: need n >= 2 and m >= 1");
  std::vector<SphereNode> out;
  if (n == 2) {
    int count = 2 * m;
    for (int k = 0; k < count; ++k) {
      double phi = 2.0 * std::numbers::pi * (k + 0.5) / count;
      out.push_back({{std::cos(phi), std::sin(phi)}, 1.0 / count});
    }
    return out;
  }
  std::vector<SphereNode> sub = sphere_rule(n - 1, m);
  const GaussRule& rule = gauss_legendre(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double phi = 0.5 * std::numbers::pi * (rule.nodes[i] + 1.0);
    double w = rule.weights[i] * std::pow(std::sin(phi), n - 2);
    for (const SphereNode& d : sub) {
      std::vector<double> u(n);
      u[0] = std::cos(phi);
      for (int j = 0; j < n - 1; ++j) u[j + 1] = std::sin(phi) * d.u[j];
      out.push_back({std::move(u), w * d.weight});
      total += w * d.weight;
    }
  }
  for (SphereNode& d : out) d.weight /= total;
  return out;
}

std::vector<double> log_ladder(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1)
    throw std::invalid_argument("log_ladder: need 0 < lo <= hi and per_decade >= 1");
  std::vector<double> out;
  long k0 = static_cast<long>(std::floor(std::log10(lo) * per_decade - 1e-9));
  long k1 = static_cast<long>(std::ceil(std::log10(hi) * per_decade + 1e-9));
  for (long k = k0; k <= k1; ++k) {
    double r = std::pow(10.0, static_cast<double>(k) / per_decade);
    if (r >= lo * (1 - 1e-12) && r <= hi * (1 + 1e-12)) out.push_back(r);
  }
  if (out.empty()) out.push_back(lo);
  return out;
}

}  // namespace wolffkit

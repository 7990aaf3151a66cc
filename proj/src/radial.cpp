#include "wolffkit/radial.hpp"

#include <algorithm>
#include <stdexcept>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

namespace {

constexpr int kPanelsPerDecade = 8;
constexpr int kOrder = 10;

// int_x^y f(s) ds with Gauss panels in t = log s, 0 < x < y.
double log_gauss(const std::function<double(double)>& f, double x, double y) {
  if (!(y > x)) return 0.0;
  const GaussRule& rule = gauss_legendre(kOrder);
  double t0 = std::log(x), t1 = std::log(y);
  int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / std::log(10.0) * kPanelsPerDecade)));
  double w = (t1 - t0) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    double mid = t0 + (k + 0.5) * w;
    double acc = 0.0;
    for (int i = 0; i < kOrder; ++i) {
      double s = std::exp(mid + 0.5 * w * rule.nodes[i]);
      acc += rule.weights[i] * f(s) * s;
    }
    total += 0.5 * w * acc;
  }
  return total;
}

// Monotone cubic slopes (Fritsch-Carlson) for data y over abscissae t.
std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& y) {
  std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t[i + 1] - t[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  return d;
}

}  // namespace

double integrate_radial(const std::function<double(double)>& f, double a, double b, const std::vector<double>& knots) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double k : knots) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  double total = 0.0;
  std::size_t first = 0;
  if (a == 0.0) {
    double top = cuts[1];
    double eps = top * 1e-12;
    double f1 = f(eps), f2 = f(2.0 * eps);
    total += log_gauss(f, eps, top);
    if (f1 > 0.0) {
      double k = std::log2(f2 / f1);
      if (!(k > -1.0)) return kInf;
      total += f1 * eps / (k + 1.0);
    }
    first = 1;
  }
  for (std::size_t i = first; i + 1 < cuts.size(); ++i) total += log_gauss(f, cuts[i], cuts[i + 1]);
  return total;
}

RadialFunction RadialFunction::exact(int dim, Profile gradient, std::vector<double> knots, std::vector<double> values,
                                     PowerLaw tail) {
  if (knots.size() != values.size()) throw std::invalid_argument("RadialFunction: knots and values differ in size");
  if (!std::is_sorted(knots.begin(), knots.end())) throw std::invalid_argument("RadialFunction: knots must increase");
  RadialFunction f;
  f.dim_ = dim;
  f.gradient_ = std::move(gradient);
  f.knots_ = std::move(knots);
  f.values_ = std::move(values);
  f.tail_ = tail;
  return f;
}

RadialFunction RadialFunction::sampled(int dim, std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.empty())
    throw std::invalid_argument("RadialFunction: need matching, nonempty knots and values");
  if (!std::is_sorted(knots.begin(), knots.end()) || !(knots.front() > 0.0))
    throw std::invalid_argument("RadialFunction: knots must be positive and increasing");
  RadialFunction f;
  f.dim_ = dim;
  f.knots_ = std::move(knots);
  f.values_ = std::move(values);
  std::vector<double> t(f.knots_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::log(f.knots_[i]);
  f.slopes_ = pchip_slopes(t, f.values_);
  std::size_t m = f.knots_.size();
  if (m >= 2 && f.values_[m - 1] > 0.0 && f.values_[m - 2] > 0.0) {
    f.tail_.exponent = std::log(f.values_[m - 1] / f.values_[m - 2]) / (t[m - 1] - t[m - 2]);
  }
  f.tail_.coeff = f.values_[m - 1] * std::pow(f.knots_[m - 1], -f.tail_.exponent);
  return f;
}

double RadialFunction::integrate_gradient(double a, double b) const {
  return integrate_radial(gradient_, a, b, knots_);
}

double RadialFunction::sampled_value(double r) const {
  if (r <= knots_.front()) return values_.front();
  double t = std::log(r);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  double t0 = std::log(knots_[i]), t1 = std::log(knots_[i + 1]);
  double h = t1 - t0, s = (t - t0) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] + h11 * h * slopes_[i + 1];
}

double RadialFunction::value(double r) const {
  if (dim_ == 0) return 0.0;
  if (r < 0.0) throw std::invalid_argument("RadialFunction: radius must be nonnegative");
  if (r >= tail_start()) {
    if (tail_.coeff == 0.0) return 0.0;
    return r == 0.0 ? (tail_.exponent < 0.0 ? kInf : tail_.coeff) : tail_.coeff * std::pow(r, tail_.exponent);
  }
  if (!gradient_) return sampled_value(r);
  auto it = std::lower_bound(knots_.begin(), knots_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  if (knots_[i] == r) return values_[i];
  return values_[i] + integrate_gradient(r, knots_[i]);
}

double RadialFunction::gradient(double r) const {
  if (dim_ == 0) return 0.0;
  if (gradient_) return gradient_(r);
  if (r >= tail_start()) return std::abs(tail_.exponent * tail_.coeff * std::pow(r, tail_.exponent - 1.0));
  if (r <= knots_.front()) return 0.0;
  double eps = 1e-6 * r;
  return std::abs(sampled_value(r + eps) - sampled_value(r - eps)) / (2.0 * eps);
}

double radial_mass(const Measure& mu, double r) {
  const FlatMeasure& flat = mu.flat();
  double m = 0.0;
  for (const Atom& a : flat.atoms) m += a.weight;
  for (const Shell& s : flat.shells) m += s.radial_mass(flat.dim, r);
  return m;
}

std::vector<double> radial_breakpoints(const Measure& mu) {
  std::vector<double> out;
  for (const Shell& s : mu.flat().shells) {
    for (double r : {s.r_lo, s.r_hi}) {
      if (r > 0.0 && std::isfinite(r)) out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RadialFunction radial_solve(const Measure& mu, const SpaceParams& sp, const RadialSolveConfig& cfg) {
  if (mu.dim() != sp.n()) throw std::invalid_argument("radial_solve: dimension mismatch");
  if (!mu.is_radial()) throw std::invalid_argument("radial_solve: measure is not radial about the origin");
  if (cfg.points_per_decade < 1) throw std::invalid_argument("radial_solve: points_per_decade must be positive");
  const int n = sp.n();
  const double theta = 1.0 / (sp.p() - 1.0);
  const double omega = sp.omega();
  const double beta = sp.beta();
  const FlatMeasure flat = mu.flat();

  for (const Shell& s : flat.shells) {
    if (std::isinf(s.r_hi)) {
      double e = s.gamma + n;
      double growth = e > 0.0 ? theta * (e - n + 1.0) : -theta * (n - 1.0);
      if (growth >= -1.0) {
        throw std::domain_error("radial_solve: finiteness condition fails, integrand decays like s^" +
                                std::to_string(growth));
      }
    }
  }

  auto mass = [flat](double r) {
    double m = 0.0;
    for (const Atom& a : flat.atoms) m += a.weight;
    for (const Shell& s : flat.shells) m += s.radial_mass(flat.dim, r);
    return m;
  };
  auto grad = [mass, theta, omega, n](double r) {
    double m = mass(r);
    return m > 0.0 ? std::pow(m / (omega * std::pow(r, n - 1)), theta) : 0.0;
  };

  std::vector<double> bps = radial_breakpoints(mu);
  bool unbounded = std::any_of(flat.shells.begin(), flat.shells.end(), [](const Shell& s) { return std::isinf(s.r_hi); });
  if (bps.empty() && !unbounded) {
    double total = mass(kInf);
    RadialFunction::PowerLaw tail{std::pow(total / omega, theta) / beta, -beta};
    return RadialFunction::exact(n, grad, {}, {}, tail);
  }

  std::vector<double> knots;
  double lo = bps.empty() ? 1.0 : bps.front();
  double hi = bps.empty() ? 1.0 : bps.back();
  if (unbounded) {
    for (double r : log_ladder(lo * 1e-3, hi * 1e3, cfg.points_per_decade)) knots.push_back(r);
  } else {
    for (double r : log_ladder(lo * 1e-3, hi, cfg.points_per_decade)) knots.push_back(r);
  }
  knots.insert(knots.end(), bps.begin(), bps.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  if (!unbounded) {
    while (!knots.empty() && knots.back() > hi) knots.pop_back();
  }

  std::vector<double> values(knots.size());
  RadialFunction::PowerLaw tail;
  double last = knots.back();
  if (!unbounded) {
    double total = mass(kInf);
    tail = {std::pow(total / omega, theta) / beta, -beta};
    values.back() = tail.coeff * std::pow(last, tail.exponent);
  } else {
    double acc = 0.0;
    double a = last;
    for (int decade = 0; decade < 400; ++decade) {
      double piece = log_gauss(grad, a, 10.0 * a);
      acc += piece;
      a *= 10.0;
      if (piece <= 1e-17 * acc) break;
    }
    values.back() = acc;
  }
  for (std::size_t i = knots.size() - 1; i-- > 0;) values[i] = values[i + 1] + log_gauss(grad, knots[i], knots[i + 1]);

  if (unbounded) {
    std::size_t m = knots.size();
    double e = std::log(values[m - 1] / values[m - 2]) / std::log(knots[m - 1] / knots[m - 2]);
    tail = {values[m - 1] * std::pow(knots[m - 1], -e), e};
  }
  return RadialFunction::exact(n, grad, std::move(knots), std::move(values), tail);
}

}  // namespace wolffkit

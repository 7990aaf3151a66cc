#include "wolffkit/solver.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "wolffkit/potential.hpp"
#include "wolffkit/quadrature.hpp"

namespace wolffkit {

namespace {

constexpr int kRhoOrder = 6;

// Gauss nodes and weights for d(rho)/rho on [a, b], split at cuts.
void log_panels(double a, double b, std::vector<double> cuts, int per_decade, std::vector<double>& rho,
                std::vector<double>& weight) {
  if (!(b > a) || !(a > 0.0)) return;
  cuts.push_back(a);
  cuts.push_back(b);
  std::vector<double> t;
  for (double c : cuts) {
    if (c >= a && c <= b && c > 0.0) t.push_back(std::log(c));
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), t.end());
  const GaussRule& rule = gauss_legendre(kRhoOrder);
  for (std::size_t s = 0; s + 1 < t.size(); ++s) {
    int panels = std::max(1, static_cast<int>(std::ceil((t[s + 1] - t[s]) / std::log(10.0) * per_decade)));
    double w = (t[s + 1] - t[s]) / panels;
    for (int k = 0; k < panels; ++k) {
      double mid = t[s] + (k + 0.5) * w;
      for (int i = 0; i < kRhoOrder; ++i) {
        rho.push_back(std::exp(mid + 0.5 * w * rule.nodes[i]));
        weight.push_back(0.5 * w * rule.weights[i]);
      }
    }
  }
}

double relative_change(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

// W_p(f sigma + mu) on radial nodes, with f piecewise linear in s between
// the basis nodes.
class RadialOperator {
 public:
  RadialOperator(const SpaceParams& sp, const Measure& sigma, const Measure& mu, const std::vector<double>& nodes,
                 const std::vector<std::size_t>& basis, double support_lo, double support_hi, int per_decade)
      : sp_(sp), basis_(basis) {
    const int n = sp.n();
    const double omega = sp.omega();
    const FlatMeasure& sflat = sigma.flat();
    for (std::size_t j : basis) s_.push_back(nodes[j]);
    const std::size_t J = s_.size();

    auto density = [&sflat](double s) {
      double d = 0.0;
      for (const Shell& sh : sflat.shells) {
        if (s >= sh.r_lo && s < sh.r_hi) d += sh.coeff * std::pow(s, sh.gamma);
      }
      return d;
    };
    // Piecewise-linear hat j restricted to one of its two halves.
    auto hat = [this, J, support_lo](std::size_t j, double s) {
      if (j > 0 && s < s_[j]) return (s - s_[j - 1]) / (s_[j] - s_[j - 1]);
      if (j + 1 < J && s > s_[j]) return (s_[j + 1] - s) / (s_[j + 1] - s_[j]);
      if (j == 0 && s <= s_[0]) return s >= support_lo ? 1.0 : 0.0;
      return s == s_[j] ? 1.0 : 0.0;
    };
    double e0 = 0.0;
    for (const Shell& sh : sflat.shells) {
      if (sh.r_lo == 0.0) e0 = sh.gamma + n;
    }
    const GaussRule& rule = gauss_legendre(8);
    // int_a^b hat_j(s) dens(s) omega s^(n-1) w(s) ds for a smooth weight w.
    auto segment = [&](std::size_t j, double a, double b, const std::function<double(double)>& w) {
      if (!(b > a)) return 0.0;
      double total = 0.0;
      if (a == 0.0 && e0 > 0.0) {
        double scale = std::pow(b, e0) / e0;
        for (int i = 0; i < 8; ++i) {
          double t = 0.5 * (rule.nodes[i] + 1.0);
          double s = b * std::pow(t, 1.0 / e0);
          double dens_over = density(s) * std::pow(s, n - e0);
          total += 0.5 * rule.weights[i] * hat(j, s) * dens_over * w(s);
        }
        return omega * scale * total;
      }
      double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int i = 0; i < 8; ++i) {
        double s = mid + half * rule.nodes[i];
        total += rule.weights[i] * hat(j, s) * density(s) * std::pow(s, n - 1) * w(s);
      }
      return omega * half * total;
    };
    auto support_of = [&](std::size_t j) {
      double lo = j == 0 ? support_lo : s_[j - 1];
      double hi = j + 1 < J ? s_[j + 1] : s_[j];
      return std::pair{lo, hi};
    };
    auto one = [](double) { return 1.0; };
    auto integrate_hat = [&](std::size_t j, const std::function<double(double)>& w, std::vector<double> cuts) {
      auto [lo, hi] = support_of(j);
      cuts.push_back(lo);
      cuts.push_back(hi);
      cuts.push_back(s_[j]);
      std::sort(cuts.begin(), cuts.end());
      double total = 0.0;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double a = std::max(cuts[c], lo), b = std::min(cuts[c + 1], hi);
        total += segment(j, a, b, w);
      }
      return total;
    };
    mass_.resize(J);
    for (std::size_t j = 0; j < J; ++j) mass_[j] = integrate_hat(j, one, {});

    mu_total_ = total_mass(mu);
    double mu_extent = mu.is_zero() ? 0.0 : mu.support_extent();
    if (std::isinf(mu_extent)) throw std::invalid_argument("fixed point: mu must have bounded support");
    std::vector<double> mu_bps = radial_breakpoints(mu);

    const double theta = 1.0 / (sp.p() - 1.0);
    const double beta = sp.beta();
    targets_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Target& tg = targets_[i];
      const double r = nodes[i];
      Point x(n, 0.0);
      x[0] = r;
      double dist_sigma = J == 0 ? kInf : (r < support_lo ? support_lo - r : (r > support_hi ? r - support_hi : 0.0));
      double dist_mu = mu.is_zero() ? kInf : mu.support_distance(x);
      double start = std::min(dist_sigma, dist_mu);
      double sat = r + std::max(J == 0 ? 0.0 : support_hi, mu_extent);
      bool head = false;
      if (start == 0.0) {
        start = 1e-6 * std::max(r, support_hi);
        head = true;
      }
      if (!std::isfinite(start) || start >= sat) start = sat;
      std::vector<double> cuts{r};
      for (double b : {support_lo, support_hi}) {
        cuts.push_back(std::abs(r - b));
        cuts.push_back(r + b);
      }
      for (double b : mu_bps) {
        cuts.push_back(std::abs(r - b));
        cuts.push_back(r + b);
      }
      std::vector<double> rho, w;
      if (head) {
        rho.push_back(start);
        w.push_back(1.0 / (theta * n - beta));
      }
      log_panels(start, sat, cuts, per_decade, rho, w);
      tg.coef.resize(rho.size());
      tg.mu_mass.resize(rho.size());
      tg.matrix.assign(rho.size() * J, 0.0);
      for (std::size_t k = 0; k < rho.size(); ++k) {
        const double R = rho[k];
        tg.coef[k] = w[k] * std::pow(R, -beta);
        tg.mu_mass[k] = mu.is_zero() ? 0.0 : ball_mass(mu, Ball(x, R), 1e-12);
        const double lo = std::abs(r - R), hi = r + R;
        const double full = R - r;
        auto frac = [r, R, n](double s) {
          if (s <= 0.0) return R >= r ? 1.0 : 0.0;
          return sphere_fraction_in_ball(n, s, r, R);
        };
        for (std::size_t j = 0; j < J; ++j) {
          auto [slo, shi] = support_of(j);
          double v = 0.0;
          if (shi <= full) {
            v = mass_[j];
          } else if (slo >= hi || (R < r && shi <= lo)) {
            v = 0.0;
          } else {
            v = integrate_hat(j, frac, {lo, hi});
          }
          tg.matrix[k * J + j] = v;
        }
      }
      tg.tail = std::pow(sat, -beta) / beta;
    }
  }

  std::size_t basis_size() const { return s_.size(); }
  const std::vector<double>& basis_mass() const { return mass_; }

  std::vector<double> apply(const std::vector<double>& f, bool include_mu) const {
    const double theta = 1.0 / (sp_.p() - 1.0);
    const std::size_t J = s_.size();
    double sigma_total = 0.0;
    for (std::size_t j = 0; j < J; ++j) sigma_total += mass_[j] * f[j];
    std::vector<double> out(targets_.size());
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const Target& tg = targets_[i];
      double acc = 0.0;
      for (std::size_t k = 0; k < tg.coef.size(); ++k) {
        double m = include_mu ? tg.mu_mass[k] : 0.0;
        const double* row = &tg.matrix[k * J];
        for (std::size_t j = 0; j < J; ++j) m += row[j] * f[j];
        if (m > 0.0) acc += tg.coef[k] * std::pow(m, theta);
      }
      double total = sigma_total + (include_mu ? mu_total_ : 0.0);
      if (total > 0.0) acc += tg.tail * std::pow(total, theta);
      out[i] = acc;
    }
    return out;
  }

 private:
  struct Target {
    std::vector<double> coef;
    std::vector<double> mu_mass;
    std::vector<double> matrix;
    double tail = 0.0;
  };
  SpaceParams sp_;
  std::vector<std::size_t> basis_;
  std::vector<double> s_;
  std::vector<double> mass_;
  std::vector<Target> targets_;
  double mu_total_ = 0.0;
};

struct Problem {
  std::vector<Point> nodes;
  std::vector<double> radii;
  std::vector<std::size_t> basis;
  std::function<std::vector<double>(const std::vector<double>&, bool)> apply;
  std::function<std::vector<double>(const std::vector<double>&, bool)> apply_fine;
  std::vector<double> sigma_weights;
  bool radial = false;
};

Problem make_problem(const Measure& sigma, const Measure& mu, const SpaceParams& sp, const FixedPointConfig& cfg) {
  if (sigma.dim() != sp.n() || mu.dim() != sp.n()) throw std::invalid_argument("fixed point: dimension mismatch");
  if (sigma.has_atoms()) throw std::invalid_argument("fixed point: sigma must not carry atoms");
  if (cfg.points_per_decade < 4 || cfg.rho_panels_per_decade < 2 || cfg.max_iter < 1 || !(cfg.tol > 0.0))
    throw std::invalid_argument("fixed point: invalid configuration");
  Problem pb;
  if (sigma.is_radial() && mu.is_radial()) {
    pb.radial = true;
    double lo = kInf, hi = 0.0;
    for (const Shell& s : sigma.flat().shells) {
      lo = std::min(lo, s.r_lo);
      hi = std::max(hi, s.r_hi);
    }
    if (std::isinf(hi)) throw std::invalid_argument("fixed point: sigma must have bounded support");
    double scale = hi > 0.0 ? hi : (mu.is_zero() ? 1.0 : std::max(mu.support_extent(), 1e-300));
    if (!(scale > 0.0)) scale = 1.0;
    std::vector<double> r = log_ladder(1e-3 * scale, 10.0 * scale, cfg.points_per_decade);
    for (double b : radial_breakpoints(sigma)) r.push_back(b);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    pb.radii = r;
    for (std::size_t i = 0; i < r.size(); ++i) {
      Point x(sp.n(), 0.0);
      x[0] = r[i];
      pb.nodes.push_back(x);
      if (hi > 0.0 && r[i] >= lo && r[i] <= hi) pb.basis.push_back(i);
    }
    auto coarse = std::make_shared<RadialOperator>(sp, sigma, mu, r, pb.basis, lo, hi, cfg.rho_panels_per_decade);
    auto fine_maker = [=]() {
      return std::make_shared<RadialOperator>(sp, sigma, mu, r, pb.basis, lo, hi, 2 * cfg.rho_panels_per_decade);
    };
    std::vector<std::size_t> basis = pb.basis;
    auto expand = [basis](const std::vector<double>& values) {
      std::vector<double> f(basis.size());
      for (std::size_t j = 0; j < basis.size(); ++j) f[j] = values[basis[j]];
      return f;
    };
    pb.apply = [coarse, expand](const std::vector<double>& f_nodes, bool with_mu) {
      return coarse->apply(expand(f_nodes), with_mu);
    };
    pb.apply_fine = [fine_maker, expand](const std::vector<double>& f_nodes, bool with_mu) {
      return fine_maker()->apply(expand(f_nodes), with_mu);
    };
    pb.sigma_weights.assign(r.size(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) pb.sigma_weights[basis[j]] = coarse->basis_mass()[j];
    return pb;
  }

  std::vector<WeightedNode> nodes = quadrature_nodes(sigma, cfg.nodes);
  if (nodes.empty()) throw std::invalid_argument("fixed point: sigma has no quadrature nodes");
  for (WeightedNode& w : nodes) {
    pb.nodes.push_back(w.x);
    pb.sigma_weights.push_back(w.weight);
  }
  auto coarse = std::make_shared<BlobWolff>(sp, nodes, pb.nodes, mu, cfg.rho_panels_per_decade);
  std::vector<double> weights = pb.sigma_weights;
  auto scale_by = [weights](const std::vector<double>& f) {
    std::vector<double> c(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) c[j] = weights[j] * f[j];
    return c;
  };
  pb.apply = [coarse, scale_by](const std::vector<double>& f, bool with_mu) {
    return coarse->apply(scale_by(f), with_mu);
  };
  std::vector<Point> targets = pb.nodes;
  pb.apply_fine = [=](const std::vector<double>& f, bool with_mu) {
    BlobWolff fine(sp, nodes, targets, mu, 2 * cfg.rho_panels_per_decade);
    return fine.apply(scale_by(f), with_mu);
  };
  return pb;
}

std::vector<double> powered(const std::vector<double>& v, double q) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? std::pow(v[i], q) : 0.0;
  return out;
}

FixedPointResult finish(const Problem& pb, const SpaceParams& sp, FixedPointResult res) {
  res.nodes = pb.nodes;
  res.sigma_weights = pb.sigma_weights;
  double ratio = 0.0;
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    if (res.wolff_mu[i] > 0.0) ratio = std::max(ratio, res.values[i] / res.wolff_mu[i]);
  }
  res.ratio_to_wolff_mu = ratio;
  if (pb.radial) {
    std::vector<double> vals = res.values;
    bool ok = std::all_of(vals.begin(), vals.end(), [](double v) { return std::isfinite(v); });
    if (ok) res.profile = RadialFunction::sampled(sp.n(), pb.radii, vals);
  }
  return res;
}

FixedPointResult iterate(const Problem& pb, const SpaceParams& sp, const FixedPointConfig& cfg,
                         std::vector<double> v, bool supernatural, double q) {
  FixedPointResult res;
  std::vector<double> zero(v.size(), 0.0);
  res.wolff_mu = pb.apply(zero, true);
  double base = *std::max_element(res.wolff_mu.begin(), res.wolff_mu.end());
  for (int it = 1; it <= cfg.max_iter; ++it) {
    std::vector<double> next = pb.apply(powered(v, q), true);
    if (cfg.damping != 1.0) {
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = cfg.damping * next[i] + (1.0 - cfg.damping) * v[i];
    }
    double change = relative_change(next, v);
    res.changes.push_back(change);
    res.iterations = it;
    double top = *std::max_element(next.begin(), next.end());
    if (supernatural && (!std::isfinite(top) || top > cfg.divergence_factor * base)) {
      res.status = FixedPointStatus::diverged;
      res.values = std::isfinite(top) ? next : v;
      res.residual = change;
      res.posthoc_residual = kInf;
      return finish(pb, sp, std::move(res));
    }
    if (change <= cfg.tol) {
      res.status = FixedPointStatus::converged;
      res.values = v;
      res.residual = change;
      std::vector<double> fine = pb.apply_fine(powered(v, q), true);
      res.posthoc_residual = relative_change(fine, v);
      return finish(pb, sp, std::move(res));
    }
    v = std::move(next);
  }
  res.status = FixedPointStatus::max_iter;
  res.values = v;
  res.residual = res.changes.empty() ? kInf : res.changes.back();
  res.posthoc_residual = kInf;
  return finish(pb, sp, std::move(res));
}

}  // namespace

std::string to_string(FixedPointStatus s) {
  switch (s) {
    case FixedPointStatus::converged:
      return "converged";
    case FixedPointStatus::diverged:
      return "diverged";
    default:
      return "max_iter";
  }
}

double FixedPointResult::sigma_moment(double q) const {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sigma_weights[i] > 0.0) total += sigma_weights[i] * std::pow(values[i], q);
  }
  return total;
}

FixedPointResult fixed_point_subnatural(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                        const FixedPointConfig& cfg) {
  const double q = sp.q();
  if (!(q < sp.p() - 1.0)) throw std::invalid_argument("fixed_point_subnatural: need 0 < q < p - 1");
  if (sigma.is_zero()) {
    Problem pb;
    pb.radial = mu.is_radial();
    double scale = mu.is_zero() ? 1.0 : mu.support_extent();
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
    pb.radii = log_ladder(1e-3 * scale, 10.0 * scale, cfg.points_per_decade);
    for (double r : pb.radii) {
      Point x(sp.n(), 0.0);
      x[0] = r;
      pb.nodes.push_back(x);
    }
    pb.sigma_weights.assign(pb.nodes.size(), 0.0);
    FixedPointResult res;
    res.wolff_mu.resize(pb.nodes.size());
    for (std::size_t i = 0; i < pb.nodes.size(); ++i) res.wolff_mu[i] = wolff(mu, pb.nodes[i], sp).value;
    res.values = res.wolff_mu;
    res.iterations = 1;
    res.changes = {0.0};
    res.status = FixedPointStatus::converged;
    return finish(pb, sp, std::move(res));
  }
  Problem pb = make_problem(sigma, mu, sp, cfg);
  std::vector<double> ones(pb.nodes.size(), 1.0);
  std::vector<double> w_mu = pb.apply(std::vector<double>(pb.nodes.size(), 0.0), true);
  std::vector<double> w_sigma = pb.apply(ones, false);
  const double expo = (sp.p() - 1.0) / (sp.p() - 1.0 - q);
  std::vector<double> v0(pb.nodes.size());
  for (std::size_t i = 0; i < v0.size(); ++i) v0[i] = w_mu[i] + std::pow(w_sigma[i], expo);
  return iterate(pb, sp, cfg, std::move(v0), false, q);
}

FixedPointResult fixed_point_supernatural(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                          const FixedPointConfig& cfg) {
  const double q = sp.q();
  if (!(q > sp.p() - 1.0)) throw std::invalid_argument("fixed_point_supernatural: need q > p - 1");
  if (mu.is_zero()) throw std::invalid_argument("fixed_point_supernatural: mu must be nonzero");
  if (sigma.is_zero()) {
    FixedPointResult res = fixed_point_subnatural(sigma, mu, sp.with_q(0.5 * (sp.p() - 1.0)), cfg);
    res.ratio_to_wolff_mu = 1.0;
    return res;
  }
  Problem pb = make_problem(sigma, mu, sp, cfg);
  std::vector<double> u0 = pb.apply(std::vector<double>(pb.nodes.size(), 0.0), true);
  for (double u : u0) {
    if (!std::isfinite(u)) throw std::invalid_argument("fixed_point_supernatural: W_p mu is infinite at a node");
  }
  return iterate(pb, sp, cfg, std::move(u0), true, q);
}

BlobWolff::BlobWolff(const SpaceParams& sp, std::vector<WeightedNode> blobs, std::vector<Point> targets,
                     const Measure& fixed, int rho_panels_per_decade)
    : sp_(sp), blobs_(std::move(blobs)) {
  const int n = sp.n();
  const double vn = unit_ball_volume(n);
  const double beta = sp.beta();
  const double theta = 1.0 / (sp.p() - 1.0);
  double min_cell = kInf;
  for (const WeightedNode& b : blobs_) {
    if (!(b.cell_radius > 0.0)) throw std::invalid_argument("BlobWolff: blobs need positive radii");
    min_cell = std::min(min_cell, b.cell_radius);
  }
  const double fixed_total = fixed.is_zero() ? 0.0 : total_mass(fixed);
  targets_.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Target& tg = targets_[i];
    const Point& x = targets[i];
    std::vector<double> d(blobs_.size());
    double start = fixed.is_zero() ? kInf : fixed.support_distance(x);
    double sat = fixed.is_zero() ? 0.0 : fixed.saturation_radius(x);
    for (std::size_t j = 0; j < blobs_.size(); ++j) {
      d[j] = distance(x, blobs_[j].x);
      start = std::min(start, std::max(0.0, d[j] - blobs_[j].cell_radius));
      sat = std::max(sat, d[j] + blobs_[j].cell_radius);
    }
    if (std::isinf(sat)) throw std::invalid_argument("BlobWolff: fixed measure must have bounded support");
    bool head = false;
    if (start == 0.0) {
      start = 1e-3 * std::min(min_cell, sat);
      head = true;
    }
    if (!std::isfinite(start) || start >= sat) start = sat;
    if (head) {
      tg.rho.push_back(start);
      tg.weight.push_back(1.0 / (theta * n - beta));
    }
    log_panels(start, sat, fixed.is_zero() ? std::vector<double>{} : fixed.breakpoints(x), rho_panels_per_decade,
               tg.rho, tg.weight);
    tg.order.resize(blobs_.size());
    std::iota(tg.order.begin(), tg.order.end(), 0);
    std::sort(tg.order.begin(), tg.order.end(), [&](std::size_t a, std::size_t b) {
      return d[a] + blobs_[a].cell_radius < d[b] + blobs_[b].cell_radius;
    });
    tg.inside.resize(tg.rho.size());
    tg.partial.resize(tg.rho.size());
    tg.fixed_mass.resize(tg.rho.size());
    for (std::size_t k = 0; k < tg.rho.size(); ++k) {
      const double R = tg.rho[k];
      std::size_t count = 0;
      while (count < tg.order.size() && d[tg.order[count]] + blobs_[tg.order[count]].cell_radius <= R) ++count;
      tg.inside[k] = count;
      for (std::size_t c = count; c < tg.order.size(); ++c) {
        std::size_t j = tg.order[c];
        double r = blobs_[j].cell_radius;
        if (d[j] - r >= R) continue;
        double frac = ball_intersection_volume(n, R, r, d[j]) / (vn * std::pow(r, n));
        if (frac > 0.0) tg.partial[k].emplace_back(j, frac);
      }
      tg.fixed_mass[k] = fixed.is_zero() ? 0.0 : ball_mass(fixed, Ball(x, R), 1e-12);
      tg.weight[k] *= std::pow(R, -beta);
    }
    tg.saturation = sat;
    tg.fixed_total = fixed_total;
  }
}

std::vector<double> BlobWolff::apply(const std::vector<double>& coeffs, bool include_fixed) const {
  if (coeffs.size() != blobs_.size()) throw std::invalid_argument("BlobWolff: coefficient count mismatch");
  const double theta = 1.0 / (sp_.p() - 1.0);
  const double beta = sp_.beta();
  double total = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
  std::vector<double> out(targets_.size());
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const Target& tg = targets_[i];
    std::vector<double> prefix(tg.order.size() + 1, 0.0);
    for (std::size_t c = 0; c < tg.order.size(); ++c) prefix[c + 1] = prefix[c] + coeffs[tg.order[c]];
    double acc = 0.0;
    for (std::size_t k = 0; k < tg.rho.size(); ++k) {
      double m = prefix[tg.inside[k]] + (include_fixed ? tg.fixed_mass[k] : 0.0);
      for (const auto& [j, frac] : tg.partial[k]) m += coeffs[j] * frac;
      if (m > 0.0) acc += tg.weight[k] * std::pow(m, theta);
    }
    double all = total + (include_fixed ? tg.fixed_total : 0.0);
    if (all > 0.0 && tg.saturation > 0.0) acc += std::pow(all, theta) * std::pow(tg.saturation, -beta) / beta;
    out[i] = acc;
  }
  return out;
}

}  // namespace wolffkit

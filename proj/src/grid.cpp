#include "wolffkit/grid.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wolffkit {

GridFunction::GridFunction(int dim, double half_width, double h) : dim_(dim), half_width_(half_width), h_(h) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("GridFunction: dimension must be 1, 2 or 3");
  if (!(half_width > 0.0) || !(h > 0.0)) throw std::invalid_argument("GridFunction: N and h must be positive");
  double cells = 2.0 * half_width / h;
  long long rounded = std::llround(cells);
  if (rounded < 2 || std::abs(cells - static_cast<double>(rounded)) > 1e-9 * cells)
    throw std::invalid_argument("GridFunction: 2N/h must be an integer >= 2");
  per_axis_ = static_cast<int>(rounded) + 1;
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(per_axis_);
  if (total > 50000000) throw std::invalid_argument("GridFunction: grid too large");
  values_.assign(total, 0.0);
}

Point GridFunction::node(std::size_t i) const {
  Point x(dim_);
  for (int k = 0; k < dim_; ++k) {
    x[k] = -half_width_ + h_ * static_cast<double>(i % per_axis_);
    i /= per_axis_;
  }
  return x;
}

std::size_t GridFunction::index_of(std::span<const int> multi) const {
  std::size_t i = 0;
  for (int k = dim_ - 1; k >= 0; --k) i = i * per_axis_ + static_cast<std::size_t>(multi[k]);
  return i;
}

bool GridFunction::on_boundary(std::size_t i) const {
  for (int k = 0; k < dim_; ++k) {
    std::size_t c = i % per_axis_;
    if (c == 0 || c + 1 == static_cast<std::size_t>(per_axis_)) return true;
    i /= per_axis_;
  }
  return false;
}

double GridFunction::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("GridFunction: dimension mismatch");
  std::vector<int> base(dim_);
  std::vector<double> frac(dim_);
  for (int k = 0; k < dim_; ++k) {
    double t = (x[k] + half_width_) / h_;
    if (t < 0.0 || t > per_axis_ - 1) return 0.0;
    int b = std::min(static_cast<int>(std::floor(t)), per_axis_ - 2);
    base[k] = b;
    frac[k] = t - b;
  }
  std::vector<int> order(dim_);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  double prev = values_[index_of(base)];
  double v = prev;
  for (int k : order) {
    ++base[k];
    double next = values_[index_of(base)];
    v += frac[k] * (next - prev);
    prev = next;
  }
  return v;
}

namespace {

std::vector<std::vector<int>> permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

GridProblem::GridProblem(const Measure& mu, double half_width, double h, const SpaceParams& sp)
    : sp_(sp), shape_(sp.n(), half_width, h), perms_(permutations(sp.n())) {
  if (mu.dim() != sp.n()) throw std::invalid_argument("GridProblem: dimension mismatch");
  const int n = sp.n();
  const int m = shape_.per_axis();
  loads_.assign(shape_.size(), 0.0);

  for (const Atom& a : mu.flat().atoms) {
    std::vector<int> idx(n);
    bool inside = true;
    for (int k = 0; k < n; ++k) {
      long long c = std::llround((a.point[k] + half_width) / h);
      if (c < 0 || c >= m) inside = false;
      idx[k] = static_cast<int>(c);
    }
    if (inside) loads_[shape_.index_of(idx)] += a.weight;
  }
  if (mu.flat().shells.empty()) return;

  Measure inside = mu.restricted(Ball(Point(n, 0.0), half_width * std::sqrt(static_cast<double>(n))));
  double r = 0.0;
  for (const Shell& s : inside.flat().shells) {
    double hi = s.r_hi;
    for (const Ball& b : s.clip) hi = std::min(hi, distance(b.center, s.center) + b.radius);
    r = std::max(r, hi);
  }
  // Quadrature nodes no farther apart than about one grid cell.
  NodeOptions opts;
  opts.angular = std::clamp(static_cast<int>(std::ceil(std::numbers::pi * r / h)), 8, 64);
  opts.radial_panels_per_halving = std::max(1, static_cast<int>(std::ceil(r / (8.0 * h))));
  for (const WeightedNode& w : quadrature_nodes(inside, opts)) {
    if (w.cell_radius == 0.0) continue;
    std::vector<int> base(n);
    std::vector<double> f(n);
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      double t = (w.x[k] + half_width) / h;
      if (t < 0.0 || t > m - 1) ok = false;
      base[k] = std::clamp(static_cast<int>(std::floor(t)), 0, m - 2);
      f[k] = t - base[k];
    }
    if (!ok) continue;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> c = base;
      double wt = w.weight;
      for (int k = 0; k < n; ++k) {
        if ((mask >> k) & 1u) {
          ++c[k];
          wt *= f[k];
        } else {
          wt *= 1.0 - f[k];
        }
      }
      loads_[shape_.index_of(c)] += wt;
    }
  }
}

double GridProblem::energy(const std::vector<double>& u) const {
  std::vector<double> unused;
  return energy(u, unused);
}

double GridProblem::energy(const std::vector<double>& u, std::vector<double>& grad) const {
  if (u.size() != shape_.size()) throw std::invalid_argument("GridProblem: wrong vector size");
  const int n = shape_.dim();
  const int m = shape_.per_axis();
  const double h = shape_.h();
  const double p = sp_.p();
  double vol = std::pow(h, n);
  for (int k = 2; k <= n; ++k) vol /= k;
  grad.assign(u.size(), 0.0);

  std::vector<std::size_t> stride(n);
  stride[0] = 1;
  for (int k = 1; k < n; ++k) stride[k] = stride[k - 1] * static_cast<std::size_t>(m);
  std::size_t cubes = 1;
  for (int k = 0; k < n; ++k) cubes *= static_cast<std::size_t>(m - 1);

  double total = 0.0;
  std::vector<double> g(n);
  std::vector<std::size_t> chain(n + 1);
  for (std::size_t c = 0; c < cubes; ++c) {
    std::size_t rest = c, base = 0;
    for (int k = 0; k < n; ++k) {
      base += (rest % (m - 1)) * stride[k];
      rest /= (m - 1);
    }
    for (const std::vector<int>& perm : perms_) {
      chain[0] = base;
      double g2 = 0.0;
      for (int k = 0; k < n; ++k) {
        chain[k + 1] = chain[k] + stride[perm[k]];
        g[k] = (u[chain[k + 1]] - u[chain[k]]) / h;
        g2 += g[k] * g[k];
      }
      if (g2 == 0.0) continue;
      double gp = std::pow(g2, 0.5 * p);
      total += vol * gp / p;
      double coef = vol * gp / g2 / h;
      for (int k = 0; k < n; ++k) {
        grad[chain[k + 1]] += coef * g[k];
        grad[chain[k]] -= coef * g[k];
      }
    }
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    total -= u[i] * loads_[i];
    grad[i] -= loads_[i];
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (shape_.on_boundary(i)) grad[i] = 0.0;
  }
  return total;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GridFunction grid_solve(const Measure& mu, double half_width, double h, const SpaceParams& sp, const GridConfig& cfg) {
  if (sp.n() > 3) throw std::invalid_argument("grid_solve: dimension must be at most 3");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.memory < 1) throw std::invalid_argument("grid_solve: bad config");
  GridProblem prob(mu, half_width, h, sp);
  GridFunction u = prob.shape();
  std::vector<double>& x = u.values();
  std::vector<double> g, g_new, x_new, d;
  double e = prob.energy(x, g);
  u.energy_history.push_back(e);
  if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) {
    u.converged = true;
    return u;
  }

  std::vector<std::vector<double>> S, Y;
  std::vector<double> rho;
  const std::size_t size = x.size();
  for (int it = 0; it < cfg.max_iter; ++it) {
    // Two-loop recursion for d = -H g.
    d = g;
    std::vector<double> alpha(S.size());
    for (std::size_t j = S.size(); j-- > 0;) {
      alpha[j] = rho[j] * dot(S[j], d);
      for (std::size_t i = 0; i < size; ++i) d[i] -= alpha[j] * Y[j][i];
    }
    double scale = 1.0;
    if (!S.empty()) {
      scale = dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
    } else {
      double gmax = 0.0;
      for (double v : g) gmax = std::max(gmax, std::abs(v));
      scale = h / gmax;
    }
    for (double& v : d) v *= scale;
    for (std::size_t j = 0; j < S.size(); ++j) {
      double beta = rho[j] * dot(Y[j], d);
      for (std::size_t i = 0; i < size; ++i) d[i] += (alpha[j] - beta) * S[j][i];
    }
    for (double& v : d) v = -v;
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      double gmax = 0.0;
      for (double v : g) gmax = std::max(gmax, std::abs(v));
      for (std::size_t i = 0; i < size; ++i) d[i] = -g[i] * h / gmax;
      slope = dot(g, d);
    }

    double step = 1.0;
    double e_new = e;
    bool accepted = false;
    x_new.resize(size);
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < size; ++i) x_new[i] = x[i] + step * d[i];
      e_new = prob.energy(x_new, g_new);
      if (e_new <= e + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!S.empty()) {
        S.clear();
        Y.clear();
        rho.clear();
        continue;
      }
      std::ostringstream msg;
      msg << "grid_solve: line search failed at iteration " << it << ", energy " << e << ", slope " << slope;
      throw std::runtime_error(msg.str());
    }

    std::vector<double> s(size), y(size);
    for (std::size_t i = 0; i < size; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > cfg.memory) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho.erase(rho.begin());
      }
    }
    double decrease = e - e_new;
    x.swap(x_new);
    g.swap(g_new);
    e = e_new;
    u.energy_history.push_back(e);
    u.iterations = it + 1;
    if (decrease < cfg.tol * std::abs(e)) {
      u.converged = true;
      break;
    }
  }
  return u;
}

namespace {

double sup_change_on(const GridFunction& small, const GridFunction& a, const GridFunction& b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    Point x = small.node(i);
    double va = a(x), vb = b(x);
    diff = std::max(diff, std::abs(va - vb));
    ref = std::max(ref, std::abs(vb));
  }
  return ref > 0.0 ? diff / ref : 0.0;
}

}  // namespace

SweepReport expanding_domain_sweep(const Measure& mu, std::vector<double> half_widths, double h, const SpaceParams& sp,
                                   const GridConfig& cfg) {
  if (half_widths.empty()) throw std::invalid_argument("expanding_domain_sweep: no box sizes");
  std::sort(half_widths.begin(), half_widths.end());
  SweepReport rep;
  rep.half_widths = half_widths;
  for (double N : half_widths) {
    rep.solutions.push_back(grid_solve(mu, N, h, sp, cfg));
    if (!rep.solutions.back().converged) rep.notes.push_back("solve did not converge for N = " + std::to_string(N));
  }
  const GridFunction& small = rep.solutions.front();
  for (std::size_t k = 0; k + 1 < rep.solutions.size(); ++k) {
    rep.changes.push_back(sup_change_on(small, rep.solutions[k], rep.solutions[k + 1]));
  }
  for (std::size_t k = 0; k + 1 < rep.changes.size(); ++k) {
    if (rep.changes[k + 1] > rep.changes[k]) rep.stabilizing = false;
  }
  return rep;
}

PowerFit fit_power_law(const GridFunction& u, double r_lo, double r_hi) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("fit_power_law: need 0 < r_lo < r_hi");
  std::vector<double> r, v;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = norm(u.node(i));
    if (d >= r_lo && d <= r_hi) {
      r.push_back(d);
      v.push_back(u.values()[i]);
    }
  }
  if (r.size() < 3) throw std::invalid_argument("fit_power_law: fewer than three nodes in the annulus");
  PowerFit best;
  best.samples = r.size();
  // For fixed s the best A and B solve a 2x2 normal system.
  auto solve = [&](double s, PowerFit& fit) {
    double sxx = 0, sx = 0, sxy = 0, sy = 0;
    const double k = static_cast<double>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      double t = std::pow(r[i], -s);
      sxx += t * t;
      sx += t;
      sxy += t * v[i];
      sy += v[i];
    }
    double det = k * sxx - sx * sx;
    fit.coeff = (k * sxy - sx * sy) / det;
    fit.offset = (sy - fit.coeff * sx) / k;
    fit.exponent = s;
    double ss = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      double e = v[i] - fit.coeff * std::pow(r[i], -s) - fit.offset;
      ss += e * e;
    }
    fit.rms = std::sqrt(ss / k);
    return fit.rms;
  };
  auto [s, rms] = boost::math::tools::brent_find_minima(
      [&](double s) {
        PowerFit f;
        return solve(s, f);
      },
      1e-3, 6.0, 40);
  (void)rms;
  solve(s, best);
  return best;
}

RadialComparison compare_with_radial(const GridFunction& u, const RadialFunction& f, double exclude_radius) {
  std::vector<double> uv, fv;
  const double half = 0.5 * u.half_width() + 1e-12;
  for (std::size_t i = 0; i < u.size(); ++i) {
    Point x = u.node(i);
    bool in = std::all_of(x.begin(), x.end(), [&](double c) { return std::abs(c) <= half; });
    double r = norm(x);
    if (!in || r < exclude_radius || r == 0.0) continue;
    uv.push_back(u.values()[i]);
    fv.push_back(f.value(r));
  }
  RadialComparison out;
  out.nodes = uv.size();
  if (uv.empty()) return out;
  auto error = [&](double c) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < uv.size(); ++i) {
      diff = std::max(diff, std::abs(uv[i] - fv[i] + c));
      ref = std::max(ref, std::abs(fv[i] - c));
    }
    return ref > 0.0 ? diff / ref : (diff > 0.0 ? kInf : 0.0);
  };
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    lo = std::min(lo, fv[i] - uv[i]);
    hi = std::max(hi, fv[i] - uv[i]);
  }
  if (hi - lo < 1e-300) {
    out.shift = lo;
  } else {
    out.shift = boost::math::tools::brent_find_minima(error, lo, hi, 50).first;
  }
  out.sup_rel_error = error(out.shift);
  return out;
}

}  // namespace wolffkit

#include "wolffkit/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "wolffkit/capacity.hpp"

namespace wolffkit {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long cell_index(double x, int level) { return static_cast<long long>(std::floor(std::ldexp(x, -level))); }

// Half side of the cube with the volume of B(0, r).
double half_side(int n, double r) { return 0.5 * std::pow(unit_ball_volume(n), 1.0 / n) * r; }

constexpr std::size_t kCubeBudget = 20000000;

}  // namespace

DyadicCube DyadicCube::containing(std::span<const double> x, int level) {
  DyadicCube q;
  q.level = level;
  q.index.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) q.index[i] = cell_index(x[i], level);
  return q;
}

Point DyadicCube::lower() const {
  Point p(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) p[i] = std::ldexp(static_cast<double>(index[i]), level);
  return p;
}

Point DyadicCube::upper() const {
  Point p(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) p[i] = std::ldexp(static_cast<double>(index[i] + 1), level);
  return p;
}

bool DyadicCube::contains(std::span<const double> x) const {
  if (x.size() != index.size()) throw std::invalid_argument("DyadicCube: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (cell_index(x[i], level) != index[i]) return false;
  }
  return true;
}

bool DyadicCube::star_contains(std::span<const double> x) const {
  if (x.size() != index.size()) throw std::invalid_argument("DyadicCube: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    long long m = cell_index(x[i], level);
    if (m < index[i] - 1 || m > index[i] + 1) return false;
  }
  return true;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.index.size() != index.size()) throw std::invalid_argument("DyadicCube: dimension mismatch");
  if (other.level > level) return false;
  long long f = 1LL << (level - other.level);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (floor_div(other.index[i], f) != index[i]) return false;
  }
  return true;
}

DyadicCube DyadicCube::parent() const {
  DyadicCube q{level + 1, index};
  for (long long& m : q.index) m = floor_div(m, 2);
  return q;
}

std::vector<DyadicCube> DyadicCube::children() const {
  const int n = dim();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    DyadicCube c{level - 1, index};
    for (int i = 0; i < n; ++i) c.index[i] = 2 * index[i] + ((mask >> i) & 1u);
    out.push_back(std::move(c));
  }
  return out;
}

void DyadicFamily::validate(int dim) const {
  if (k_min > k_max) throw std::invalid_argument("DyadicFamily: k_min must not exceed k_max");
  if (k_max - k_min > 200) throw std::invalid_argument("DyadicFamily: at most 200 levels");
  if (region_lo.has_value() != region_hi.has_value())
    throw std::invalid_argument("DyadicFamily: region needs both corners");
  if (region_lo) {
    if (static_cast<int>(region_lo->size()) != dim || static_cast<int>(region_hi->size()) != dim)
      throw std::invalid_argument("DyadicFamily: region dimension mismatch");
    for (int i = 0; i < dim; ++i) {
      if (!((*region_lo)[i] < (*region_hi)[i])) throw std::invalid_argument("DyadicFamily: empty region");
    }
  }
}

CubeMeasure CubeMeasure::from_measure(const Measure& mu, const NodeOptions& opts) {
  CubeMeasure m;
  m.dim_ = mu.dim();
  if (!std::isfinite(total_mass(mu))) throw std::invalid_argument("CubeMeasure: measure must be finite");
  m.points_ = quadrature_nodes(mu, opts);
  for (WeightedNode& w : m.points_) w.cell_radius = half_side(m.dim_, w.cell_radius);
  return m;
}

CubeMeasure CubeMeasure::lebesgue_box(Point lo, Point hi) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("lebesgue_box: corner dimensions differ");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("lebesgue_box: empty box");
  }
  CubeMeasure m;
  m.dim_ = static_cast<int>(lo.size());
  m.box_ = std::make_pair(std::move(lo), std::move(hi));
  return m;
}

namespace {

// Mass of one smeared node (half side h, zero for atoms) inside [lo, hi).
double node_mass(const WeightedNode& w, std::span<const double> lo, std::span<const double> hi) {
  const double h = w.cell_radius;
  double frac = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (h == 0.0) {
      if (!(w.x[i] >= lo[i] && w.x[i] < hi[i])) return 0.0;
    } else {
      double overlap = std::min(hi[i], w.x[i] + h) - std::max(lo[i], w.x[i] - h);
      if (overlap <= 0.0) return 0.0;
      frac *= std::min(1.0, overlap / (2.0 * h));
    }
  }
  return w.weight * frac;
}

double box_overlap(const std::pair<Point, Point>& box, std::span<const double> lo, std::span<const double> hi) {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    double o = std::min(hi[i], box.second[i]) - std::max(lo[i], box.first[i]);
    if (o <= 0.0) return 0.0;
    v *= o;
  }
  return v;
}

}  // namespace

double CubeMeasure::box_mass(std::span<const double> lo, std::span<const double> hi) const {
  if (static_cast<int>(lo.size()) != dim_ || static_cast<int>(hi.size()) != dim_)
    throw std::invalid_argument("CubeMeasure: dimension mismatch");
  double m = box_ ? box_overlap(*box_, lo, hi) : 0.0;
  for (const WeightedNode& w : points_) m += node_mass(w, lo, hi);
  return m;
}

double CubeMeasure::mass(const DyadicCube& q, bool star) const {
  Point lo = q.lower(), hi = q.upper();
  if (star) {
    double s = q.side();
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= s;
      hi[i] += s;
    }
  }
  return box_mass(lo, hi);
}

double CubeMeasure::total() const {
  double m = 0.0;
  if (box_) {
    m = 1.0;
    for (int i = 0; i < dim_; ++i) m *= box_->second[i] - box_->first[i];
  }
  for (const WeightedNode& w : points_) m += w.weight;
  return m;
}

std::pair<Point, Point> CubeMeasure::bounds() const {
  if (is_zero()) throw std::invalid_argument("CubeMeasure: zero measure has no bounds");
  Point lo(dim_, kInf), hi(dim_, -kInf);
  if (box_) {
    lo = box_->first;
    hi = box_->second;
  }
  for (const WeightedNode& w : points_) {
    for (int i = 0; i < dim_; ++i) {
      lo[i] = std::min(lo[i], w.x[i] - w.cell_radius);
      hi[i] = std::max(hi[i], w.x[i] + w.cell_radius);
    }
  }
  return {lo, hi};
}

namespace {

DyadicSum level_sum(const CubeMeasure& mu, std::span<const double> x, const SpaceParams& sp, const DyadicFamily& fam,
                    bool star) {
  if (mu.dim() != sp.n() || static_cast<int>(x.size()) != sp.n())
    throw std::invalid_argument("dyadic_wolff: dimension mismatch");
  fam.validate(sp.n());
  const double theta = 1.0 / (sp.p() - 1.0);
  const double np = sp.n() - sp.p();
  auto term = [&](int k) {
    double m = mu.mass(DyadicCube::containing(x, k), star);
    return m > 0.0 ? std::pow(m * std::pow(std::ldexp(1.0, k), -np), theta) : 0.0;
  };
  DyadicSum out;
  if (mu.is_zero()) {
    out.terms.assign(fam.k_max - fam.k_min + 1, 0.0);
    return out;
  }
  for (int k = fam.k_min; k <= fam.k_max; ++k) {
    out.terms.push_back(term(k));
    out.value += out.terms.back();
  }
  // Levels below k_min: probe a few; steady growth means the full sum diverges.
  constexpr int kProbe = 8;
  std::vector<double> below;
  for (int j = 1; j <= kProbe; ++j) below.push_back(term(fam.k_min - j));
  bool growing = below.front() > 0.0;
  double prev = out.terms.front();
  for (double b : below) {
    if (!(b > 0.0) || b < prev) growing = false;
    prev = b;
  }
  if (growing) {
    out.divergent = true;
    out.truncation_estimate = kInf;
    return out;
  }
  for (double b : below) out.truncation_estimate += b;
  std::size_t m = out.terms.size();
  if (m >= 2 && out.terms[m - 1] > 0.0 && out.terms[m - 2] > 0.0) {
    double r = out.terms[m - 1] / out.terms[m - 2];
    if (r < 1.0) {
      out.truncation_estimate += out.terms[m - 1] * r / (1.0 - r);
    } else {
      out.divergent = true;
      out.truncation_estimate = kInf;
    }
  }
  return out;
}

}  // namespace

DyadicSum dyadic_wolff(const CubeMeasure& mu, std::span<const double> x, const SpaceParams& sp,
                       const DyadicFamily& fam) {
  return level_sum(mu, x, sp, fam, false);
}

DyadicSum modified_dyadic_wolff(const CubeMeasure& mu, std::span<const double> x, const SpaceParams& sp,
                                const DyadicFamily& fam) {
  return level_sum(mu, x, sp, fam, true);
}

// Depth-first walk computing the Carleson sum of every visited cube. Cubes on
// which the measure has constant density are summed in closed form.
struct CarlesonWalker {
  using Visit = std::function<void(const DyadicCube&, double sum, double mass)>;

  const CubeMeasure& m;
  double p_conj;
  double beta;
  int k_min;
  Visit visit;
  std::vector<double> level_totals;
  std::size_t visited = 0;

  void add_level(std::size_t depth, double v) {
    if (level_totals.size() <= depth) level_totals.resize(depth + 1, 0.0);
    level_totals[depth] += v;
  }

  double term(double mass, double side) const { return std::pow(mass, p_conj) * std::pow(side, -beta); }

  // Density when it is constant on q, NaN otherwise.
  double uniform_density(const DyadicCube& q, std::span<const double> lo, std::span<const double> hi,
                         const std::vector<std::size_t>& idx) const {
    const int n = q.dim();
    double rho = 0.0;
    if (m.box_) {
      bool inside = true, outside = false;
      for (int i = 0; i < n; ++i) {
        if (lo[i] < m.box_->first[i] || hi[i] > m.box_->second[i]) inside = false;
        if (hi[i] <= m.box_->first[i] || lo[i] >= m.box_->second[i]) outside = true;
      }
      if (!inside && !outside) return std::nan("");
      if (inside) rho += 1.0;
    }
    for (std::size_t j : idx) {
      const WeightedNode& w = m.points_[j];
      if (w.cell_radius == 0.0) return std::nan("");
      for (int i = 0; i < n; ++i) {
        if (lo[i] < w.x[i] - w.cell_radius || hi[i] > w.x[i] + w.cell_radius) return std::nan("");
      }
      rho += w.weight / std::pow(2.0 * w.cell_radius, n);
    }
    return rho;
  }

  double closed_form(const DyadicCube& q, double rho, std::size_t depth) {
    const int n = q.dim();
    const int levels = q.level - k_min;
    std::vector<double> per_level(levels + 1);
    for (int j = 0; j <= levels; ++j) {
      double side = std::ldexp(q.side(), -j);
      per_level[j] = std::ldexp(term(rho * std::pow(side, n), side), n * j);
      add_level(depth + j, per_level[j]);
    }
    // The descendant along the lower corner stands for its whole level.
    double tail = 0.0;
    std::vector<double> sums(levels + 1);
    for (int j = levels; j >= 0; --j) {
      tail += per_level[j];
      sums[j] = tail;
    }
    DyadicCube c = q;
    for (int j = 0; j <= levels; ++j) {
      double side = std::ldexp(q.side(), -j);
      if (visit) visit(c, std::ldexp(sums[j], -n * j), rho * std::pow(side, n));
      if (j < levels) c = c.children().front();
    }
    return sums[0];
  }

  double walk(const DyadicCube& q, const std::vector<std::size_t>& idx, std::size_t depth) {
    if (++visited > kCubeBudget) throw std::runtime_error("carleson: cube budget exceeded, raise k_min");
    Point lo = q.lower(), hi = q.upper();
    double mass = m.box_ ? box_overlap(*m.box_, lo, hi) : 0.0;
    for (std::size_t j : idx) mass += node_mass(m.points_[j], lo, hi);
    if (!(mass > 0.0)) return 0.0;
    double rho = uniform_density(q, lo, hi, idx);
    if (!std::isnan(rho)) return closed_form(q, rho, depth);
    double sum = term(mass, q.side());
    add_level(depth, sum);
    if (q.level > k_min) {
      for (const DyadicCube& c : q.children()) {
        Point clo = c.lower(), chi = c.upper();
        std::vector<std::size_t> sub;
        for (std::size_t j : idx) {
          if (node_mass(m.points_[j], clo, chi) > 0.0) sub.push_back(j);
        }
        if (sub.empty() && !m.box_) continue;
        sum += walk(c, sub, depth + 1);
      }
    }
    if (visit) visit(q, sum, mass);
    return sum;
  }

  std::vector<std::size_t> indices_in(const DyadicCube& q) const {
    Point lo = q.lower(), hi = q.upper();
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < m.points_.size(); ++j) {
      if (node_mass(m.points_[j], lo, hi) > 0.0) idx.push_back(j);
    }
    return idx;
  }
};

namespace {

// Deep levels growing by more than 5% per level mean the sum diverges as
// k_min decreases; otherwise the geometric remainder is estimated.
std::pair<bool, double> deep_end(const std::vector<double>& totals) {
  std::size_t m = totals.size();
  if (m < 3) return {false, 0.0};
  double a = totals[m - 3], b = totals[m - 2], c = totals[m - 1];
  if (a > 0.0 && b > 1.05 * a && c > 1.05 * b) return {true, kInf};
  if (!(c > 0.0)) return {false, 0.0};
  if (c >= b) return {true, kInf};
  double r = c / b;
  return {false, c * r / (1.0 - r)};
}

}  // namespace

CarlesonResult carleson_sum(const CubeMeasure& sigma, const DyadicCube& P, const SpaceParams& sp,
                            const DyadicFamily& fam) {
  if (sigma.dim() != sp.n() || P.dim() != sp.n()) throw std::invalid_argument("carleson_sum: dimension mismatch");
  fam.validate(sp.n());
  if (P.level < fam.k_min || P.level > fam.k_max)
    throw std::invalid_argument("carleson_sum: cube level outside the family");
  CarlesonResult out;
  if (sigma.is_zero()) return out;
  CarlesonWalker w{sigma, sp.p_conjugate(), sp.beta(), fam.k_min, nullptr, {}, 0};
  out.value = w.walk(P, w.indices_in(P), 0);
  out.level_totals = std::move(w.level_totals);
  auto [div, est] = deep_end(out.level_totals);
  out.divergent = div;
  out.truncation_estimate = est;
  return out;
}

CarlesonConstant carleson_constant(const CubeMeasure& sigma, const SpaceParams& sp, const DyadicFamily& fam) {
  if (sigma.dim() != sp.n()) throw std::invalid_argument("carleson_constant: dimension mismatch");
  fam.validate(sp.n());
  CarlesonConstant out;
  if (sigma.is_zero()) return out;
  const int n = sp.n();
  auto [blo, bhi] = sigma.bounds();
  if (fam.region_lo) {
    for (int i = 0; i < n; ++i) {
      blo[i] = std::max(blo[i], (*fam.region_lo)[i]);
      bhi[i] = std::min(bhi[i], (*fam.region_hi)[i]);
      if (bhi[i] < blo[i]) return out;
    }
  }
  auto in_region = [&](const DyadicCube& q) {
    if (!fam.region_lo) return true;
    Point lo = q.lower(), hi = q.upper();
    for (int i = 0; i < n; ++i) {
      if (lo[i] < (*fam.region_lo)[i] || hi[i] > (*fam.region_hi)[i]) return false;
    }
    return true;
  };

  std::vector<long long> lo(n), hi(n);
  double count = 1.0;
  for (int i = 0; i < n; ++i) {
    lo[i] = cell_index(blo[i], fam.k_max);
    hi[i] = cell_index(bhi[i], fam.k_max);
    count *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (count > 1e6) throw std::invalid_argument("carleson_constant: too many top-level cubes, raise k_max");

  CarlesonWalker w{sigma, sp.p_conjugate(), sp.beta(), fam.k_min, nullptr, {}, 0};
  w.visit = [&](const DyadicCube& q, double sum, double mass) {
    if (!(mass > 0.0) || !in_region(q)) return;
    ++out.cubes;
    double ratio = sum / mass;
    if (ratio > out.constant) {
      out.constant = ratio;
      out.achieving = q;
    }
  };
  std::vector<long long> idx = lo;
  while (true) {
    DyadicCube top{fam.k_max, idx};
    w.level_totals.clear();
    w.walk(top, w.indices_in(top), 0);
    if (deep_end(w.level_totals).first) out.divergent = true;
    int i = 0;
    while (i < n && ++idx[i] > hi[i]) {
      idx[i] = lo[i];
      ++i;
    }
    if (i == n) break;
  }
  if (out.divergent) out.constant = kInf;
  return out;
}

int finite_intersection_count(std::span<const double> x, int k) {
  int count = 1;
  for (double xi : x) {
    // Level-k cubes m with x in 2^k [m - 1, m + 2): m - 1 <= floor(x / 2^k) <= m + 1.
    long long c = cell_index(xi, k);
    int per_axis = 0;
    for (long long m = c - 2; m <= c + 2; ++m) {
      if (m - 1 <= c && c <= m + 1) ++per_axis;
    }
    count *= per_axis;
  }
  return count;
}

Lemma52Result verify_lemma52(const Measure& sigma, const Measure& mu, const SpaceParams& sp, const Lemma52Config& cfg) {
  if (!(sp.p() > 2.0)) throw std::invalid_argument("verify_lemma52: requires p > 2");
  if (sigma.dim() != sp.n() || mu.dim() != sp.n()) throw std::invalid_argument("verify_lemma52: dimension mismatch");
  if (!std::isfinite(total_mass(sigma)) || !std::isfinite(total_mass(mu)))
    throw std::invalid_argument("verify_lemma52: measures must have finite mass");
  Lemma52Result out;
  if (sigma.is_zero() || mu.is_zero()) return out;
  const double p = sp.p();

  for (const WeightedNode& w : quadrature_nodes(sigma, cfg.nodes)) {
    double v = wolff(mu, w.x, sp, cfg.quad).value;
    out.lhs += w.weight * std::pow(v, p - 1.0);
  }
  for (const WeightedNode& w : quadrature_nodes(mu, cfg.nodes)) {
    out.rhs += w.weight * wolff(sigma, w.x, sp, cfg.quad).value;
  }
  out.c_ball = capacity_condition_const(sigma, sp, default_plan({sigma}, cfg.plan), false).sup_constant;
  if (!std::isfinite(out.lhs) || !std::isfinite(out.rhs) || !std::isfinite(out.c_ball)) {
    out.divergent = true;
    out.ratio = kInf;
    return out;
  }
  double denom = std::pow(out.c_ball, (p - 2.0) / (p - 1.0)) * out.rhs;
  if (out.lhs == 0.0) {
    out.ratio = 0.0;
  } else if (denom > 0.0) {
    out.ratio = out.lhs / denom;
  } else {
    out.divergent = true;
    out.ratio = kInf;
  }
  return out;
}

}  // namespace wolffkit

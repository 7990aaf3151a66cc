#include "wolffkit/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wolffkit/quadrature.hpp"

namespace wolffkit {

const ConditionReport& CompositeReport::condition(const std::string& id) const {
  for (const ConditionReport& c : conditions) {
    if (c.criterion == id) return c;
  }
  throw std::out_of_range("CompositeReport: no condition " + id);
}

namespace {

void check_dims(const Measure& m, const SpaceParams& sp, const char* who) {
  if (m.dim() != sp.n()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void combine(CompositeReport& rep) {
  rep.verdict = Verdict::finite;
  for (const ConditionReport& c : rep.conditions) {
    if (c.verdict == Verdict::divergent) rep.verdict = Verdict::divergent;
  }
  for (const ConditionReport& c : rep.conditions) {
    if (c.verdict == Verdict::inapplicable) rep.verdict = Verdict::inapplicable;
  }
}

ConditionReport zero_report(const std::string& id, const SamplingPlan& plan) {
  ConditionReport r;
  r.criterion = id;
  r.plan = plan;
  r.notes.push_back("zero measure");
  return r;
}

// sup over sampled points of a pointwise quantity; infinite values make it divergent.
ConditionReport sup_over_points(const std::string& id, const SamplingPlan& plan, const std::vector<Point>& points,
                                const std::function<double(const Point&)>& f) {
  ConditionReport r;
  r.criterion = id;
  r.plan = plan;
  r.refined_constant = std::nan("");
  for (const Point& x : points) {
    double v = 0.0;
    try {
      v = f(x);
    } catch (const std::domain_error&) {
      ++r.skipped;
      continue;
    }
    if (std::isnan(v)) {
      ++r.skipped;
      continue;
    }
    ++r.samples;
    if (v > r.sup_constant || r.center.empty()) {
      r.sup_constant = std::max(r.sup_constant, v);
      r.center = x;
    }
  }
  if (std::isinf(r.sup_constant)) {
    r.verdict = Verdict::divergent;
    r.notes.push_back("infinite value at a sampled point");
  }
  return r;
}

// sigma(B(x,R)) * T(x,R)^e / R^(n-p) for a tail functional T.
ConditionReport tail_condition(const std::string& id, const Measure& sigma, const SpaceParams& sp,
                               const SamplingPlan& plan, bool stable, double slope_tol,
                               const std::function<double(const Point&, double)>& tail, double e) {
  auto f = [&](const Point& c, double R) {
    double s = ball_mass(sigma, Ball(c, R));
    if (s == 0.0) return 0.0;
    double t = tail(c, R);
    return s * std::pow(t, e) / std::pow(R, sp.n() - sp.p());
  };
  return sup_over_plan(id, plan, f, stable, slope_tol);
}

// Dirac-trial kappa of balls about one center, memoized by radius.
class KappaCache {
 public:
  KappaCache(const Measure& sigma, const SpaceParams& sp, const KappaTrials& trials, int per_decade)
      : sigma_(sigma), sp_(sp), trials_(trials), per_decade_(per_decade) {}

  double kappa(const Point& c, double r) {
    auto& row = memo_[c];
    auto it = row.find(r);
    if (it != row.end()) return it->second;
    double k = kappa_lower(sigma_, Ball(c, r), sp_, trials_).lower;
    row.emplace(r, k);
    return k;
  }

  /// int_R^inf (kappa(B(c,r))^gamma / r^(n-p))^(1/(p-1)) dr / r.
  double intrinsic_tail(const Point& c, double R) {
    const double gamma = sp_.kappa_exponent();
    const double theta = 1.0 / (sp_.p() - 1.0);
    const double beta = sp_.beta();
    const double sat = sigma_.saturation_radius(c);
    if (std::isinf(sat)) throw std::invalid_argument("intrinsic tail: sigma must have bounded support");
    auto g = [&](double r, double k) { return std::pow(std::pow(k, gamma) * std::pow(r, sp_.p() - sp_.n()), theta); };
    std::vector<double> radii{R};
    if (sat > R) {
      double step = std::pow(10.0, 1.0 / per_decade_);
      double r = std::pow(step, std::ceil(std::log(R) / std::log(step) + 1e-9));
      for (; r < sat; r *= step) {
        if (r > R) radii.push_back(r);
      }
      radii.push_back(sat);
    }
    double total = 0.0, prev_r = 0.0, prev_g = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double k = kappa(c, radii[i]);
      if (std::isinf(k)) return kInf;
      double gi = g(radii[i], k);
      if (i > 0) total += 0.5 * (gi + prev_g) * std::log(radii[i] / prev_r);
      prev_r = radii[i];
      prev_g = gi;
    }
    double k_end = kappa(c, radii.back());
    return total + std::pow(k_end, gamma * theta) * std::pow(radii.back(), -beta) / beta;
  }

 private:
  const Measure& sigma_;
  SpaceParams sp_;
  KappaTrials trials_;
  int per_decade_;
  std::map<Point, std::map<double, double>> memo_;
};

}  // namespace

ConditionReport morrey_constant(const Measure& mu, const SpaceParams& sp, const SamplingPlan& plan,
                                bool check_stability) {
  check_dims(mu, sp, "morrey_constant");
  if (mu.is_zero()) return zero_report("morrey", plan);
  auto f = [&](const Point& c, double R) { return ball_mass(mu, Ball(c, R)) / std::pow(R, sp.n() - sp.p()); };
  return sup_over_plan("morrey", plan, f, check_stability);
}

ConditionReport finiteness_check(const Measure& mu, const SpaceParams& sp, const QuadratureConfig& cfg) {
  check_dims(mu, sp, "finiteness_check");
  ConditionReport r;
  r.criterion = "finiteness";
  r.center = Point(sp.n(), 0.0);
  r.radius = 1.0;
  r.samples = 1;
  r.refined_constant = std::nan("");
  if (mu.is_zero()) return r;
  PotentialEvaluation ev = wolff_tail(mu, r.center, 1.0, sp, cfg);
  r.sup_constant = ev.value;
  if (ev.divergent()) {
    r.verdict = Verdict::divergent;
    r.divergence_exponent = ev.divergence_exponent;
    r.notes.push_back("integrand does not decay fast enough at infinity");
  }
  return r;
}

ConditionReport holder_condition(const Measure& mu, double alpha, const SpaceParams& sp, const SamplingPlan& plan,
                                 bool check_stability) {
  check_dims(mu, sp, "holder_condition");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("holder_condition: alpha must lie in (0, 1)");
  if (mu.is_zero()) return zero_report("holder", plan);
  const double e = sp.n() - sp.p() + alpha * (sp.p() - 1.0);
  auto f = [&](const Point& c, double R) { return ball_mass(mu, Ball(c, R)) / std::pow(R, e); };
  return sup_over_plan("holder", plan, f, check_stability);
}

CompositeReport thm1_verdict(const Measure& mu, const SpaceParams& sp, const SamplingPlan& plan,
                             const CheckConfig& cfg) {
  CompositeReport rep;
  rep.criterion = "thm1";
  rep.conditions.push_back(finiteness_check(mu, sp, cfg.quad));
  rep.conditions.push_back(morrey_constant(mu, sp, plan, cfg.check_stability));
  combine(rep);
  rep.notes.push_back(rep.verdict == Verdict::finite ? "a solution in BMO exists" : "no solution in BMO");
  return rep;
}

CompositeReport thm2_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg) {
  check_dims(sigma, sp, "thm2_conditions");
  check_dims(mu, sp, "thm2_conditions");
  const double q = sp.q();
  if (!(q > sp.p() - 1.0)) throw std::invalid_argument("thm2_conditions: requires q > p - 1");
  CompositeReport rep;
  rep.criterion = "thm2";

  if (sigma.is_zero()) {
    rep.conditions.push_back(zero_report("a", plan));
  } else {
    std::vector<WeightedNode> nodes = quadrature_nodes(sigma, cfg.nodes);
    for (WeightedNode& w : nodes) w.weight *= std::pow(wolff(mu, w.x, sp, cfg.quad).value, q);
    bool infinite = std::any_of(nodes.begin(), nodes.end(), [](const WeightedNode& w) { return std::isinf(w.weight); });
    if (infinite) {
      ConditionReport r;
      r.criterion = "a";
      r.plan = plan;
      r.sup_constant = kInf;
      r.verdict = Verdict::divergent;
      r.notes.push_back("W_p mu is infinite on the support of sigma");
      rep.conditions.push_back(r);
    } else {
      std::vector<Point> points = plan.centers();
      std::vector<double> inner_at(points.size());
      bool blobs = std::all_of(nodes.begin(), nodes.end(), [](const WeightedNode& w) { return w.cell_radius > 0.0; });
      if (blobs) {
        std::vector<double> coeffs;
        for (const WeightedNode& w : nodes) coeffs.push_back(w.weight);
        BlobWolff op(sp, nodes, points, Measure::zero(sp.n()));
        inner_at = op.apply(coeffs, false);
      } else {
        Measure inner = blob_measure(sp.n(), nodes, 0.0);
        for (std::size_t i = 0; i < points.size(); ++i) inner_at[i] = wolff(inner, points[i], sp, cfg.quad).value;
      }
      std::size_t next = 0;
      ConditionReport r = sup_over_points("a", plan, points, [&](const Point& x) {
        double inner = inner_at[next++];
        double base = wolff(mu, x, sp, cfg.quad).value;
        if (!std::isfinite(base) || !(base > 0.0)) return std::nan("");
        return inner / base;
      });
      if (r.verdict == Verdict::finite) {
        r.notes.push_back(r.sup_constant < cfg.small_threshold ? "below the smallness threshold"
                                                               : "not below the smallness threshold");
      }
      rep.conditions.push_back(r);
    }
  }

  if (sigma.is_zero() || mu.is_zero()) {
    rep.conditions.push_back(zero_report("b", plan));
  } else {
    rep.conditions.push_back(tail_condition(
        "b", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
        [&](const Point& c, double R) { return wolff_tail(mu, c, R, sp, cfg.quad).value; }, q));
  }
  rep.conditions.push_back(morrey_constant(mu, sp, plan, cfg.check_stability));
  combine(rep);
  rep.notes.push_back("smallness thresholds are not sharp");
  return rep;
}

CompositeReport thm3_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg) {
  check_dims(sigma, sp, "thm3_conditions");
  check_dims(mu, sp, "thm3_conditions");
  const double q = sp.q();
  if (!(q > 0.0 && q < sp.p() - 1.0)) throw std::invalid_argument("thm3_conditions: requires 0 < q < p - 1");
  const double gamma = sp.kappa_exponent();
  const double np = sp.n() - sp.p();
  CompositeReport rep;
  rep.criterion = "thm3";
  if (sigma.is_zero()) {
    for (const char* id : {"a", "b", "c", "d"}) rep.conditions.push_back(zero_report(id, plan));
    combine(rep);
    return rep;
  }
  KappaCache cache(sigma, sp, cfg.trials, cfg.kappa_per_decade);

  rep.conditions.push_back(sup_over_plan(
      "a", plan, [&](const Point& c, double R) { return std::pow(cache.kappa(c, R), gamma) / std::pow(R, np); },
      cfg.check_stability, cfg.slope_tol));
  if (mu.is_zero()) {
    rep.conditions.push_back(zero_report("b", plan));
  } else {
    rep.conditions.push_back(tail_condition(
        "b", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
        [&](const Point& c, double R) { return wolff_tail(mu, c, R, sp, cfg.quad).value; }, q));
  }
  rep.conditions.push_back(tail_condition(
      "c", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
      [&](const Point& c, double R) { return wolff_tail(sigma, c, R, sp, cfg.quad).value; }, gamma));
  rep.conditions.push_back(tail_condition(
      "d", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
      [&](const Point& c, double R) { return cache.intrinsic_tail(c, R); }, q));
  for (ConditionReport& c : rep.conditions) {
    if (c.criterion == "a" || c.criterion == "d")
      c.notes.push_back("kappa is a lower bound: divergence is conclusive, finiteness only consistent");
  }
  combine(rep);
  return rep;
}

CompositeReport cor1_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg) {
  check_dims(sigma, sp, "cor1_conditions");
  check_dims(mu, sp, "cor1_conditions");
  const double q = sp.q();
  if (!(q > 0.0 && q < sp.p() - 1.0)) throw std::invalid_argument("cor1_conditions: requires 0 < q < p - 1");
  CompositeReport rep;
  rep.criterion = "cor1";
  if (sigma.is_zero()) {
    for (const char* id : {"capacity", "a", "b"}) rep.conditions.push_back(zero_report(id, plan));
    rep.conditions.push_back(morrey_constant(mu, sp, plan, cfg.check_stability));
    combine(rep);
    rep.notes.push_back("sigma = 0: degenerate");
    return rep;
  }
  ConditionReport cap = capacity_condition_const(sigma, sp, plan, cfg.check_stability);
  cap.criterion = "capacity";
  if (!cap.finite()) {
    cap.verdict = Verdict::inapplicable;
    cap.notes.push_back("capacity condition fails; the corollary does not apply");
    rep.conditions.push_back(cap);
    combine(rep);
    return rep;
  }
  rep.conditions.push_back(cap);
  if (mu.is_zero()) {
    rep.conditions.push_back(zero_report("a", plan));
  } else {
    rep.conditions.push_back(tail_condition(
        "a", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
        [&](const Point& c, double R) { return wolff_tail(mu, c, R, sp, cfg.quad).value; }, q));
  }
  rep.conditions.push_back(tail_condition(
      "b", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
      [&](const Point& c, double R) { return wolff_tail(sigma, c, R, sp, cfg.quad).value; }, sp.kappa_exponent()));
  rep.conditions.push_back(morrey_constant(mu, sp, plan, cfg.check_stability));
  combine(rep);
  return rep;
}

CompositeReport thm4_conditions(const Measure& sigma, const Measure& mu, const SpaceParams& sp,
                                const SamplingPlan& plan, const CheckConfig& cfg) {
  check_dims(sigma, sp, "thm4_conditions");
  check_dims(mu, sp, "thm4_conditions");
  CompositeReport rep;
  rep.criterion = "thm4";
  if (sigma.is_zero()) {
    ConditionReport r = zero_report("assumption", plan);
    r.verdict = Verdict::inapplicable;
    r.notes.push_back("the theorem assumes sigma != 0");
    rep.conditions.push_back(r);
    combine(rep);
    return rep;
  }
  const double p = sp.p();
  std::vector<Point> points = plan.centers();
  if (p > 2.0) {
    rep.conditions.push_back(sup_over_points(
        "assumption", plan, points, [&](const Point& x) { return wolff(sigma, x, sp, cfg.quad).value; }));
    rep.conditions.back().notes.push_back("p > 2: sup W_p sigma");
  } else {
    rep.conditions.push_back(sup_over_points(
        "assumption", plan, points, [&](const Point& x) { return riesz(sigma, x, p, cfg.quad).value; }));
    rep.conditions.back().notes.push_back("p <= 2: sup I_p sigma");
  }
  if (mu.is_zero()) {
    rep.conditions.push_back(zero_report("tail", plan));
  } else {
    rep.conditions.push_back(tail_condition(
        "tail", sigma, sp, plan, cfg.check_stability, cfg.slope_tol,
        [&](const Point& c, double R) { return wolff_tail(mu, c, R, sp, cfg.quad).value; }, p - 1.0));
  }
  ConditionReport cap = capacity_condition_const(sigma, sp, plan, cfg.check_stability);
  cap.criterion = "capacity";
  if (cap.finite()) {
    cap.notes.push_back(cap.sup_constant < cfg.small_threshold ? "below the smallness threshold"
                                                               : "not below the smallness threshold");
  }
  rep.conditions.push_back(cap);
  rep.conditions.push_back(morrey_constant(mu, sp, plan, cfg.check_stability));
  combine(rep);
  return rep;
}

namespace {

// Midpoints of a lattice^n grid over the cube around the ball, kept if inside.
std::vector<Point> ball_midpoints(const Ball& ball, int lattice, double& cell) {
  const int n = static_cast<int>(ball.center.size());
  const double step = 2.0 * ball.radius / lattice;
  cell = std::pow(step, n);
  std::vector<Point> out;
  std::vector<int> idx(n, 0);
  while (true) {
    Point x(n);
    double d2 = 0.0;
    for (int k = 0; k < n; ++k) {
      double off = -ball.radius + (idx[k] + 0.5) * step;
      x[k] = ball.center[k] + off;
      d2 += off * off;
    }
    if (d2 <= ball.radius * ball.radius) out.push_back(std::move(x));
    int k = 0;
    while (k < n && ++idx[k] == lattice) {
      idx[k] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return out;
}

double oscillation_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return kInf;
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  double osc = 0.0;
  for (double x : v) osc += std::abs(x - mean);
  return osc / static_cast<double>(v.size());
}

using BallNorm = std::function<double(const Ball&)>;

NormEstimate norm_engine(const BallNorm& f, const SamplingPlan& plan, const NormConfig& cfg) {
  plan.validate();
  if (cfg.refinements < 0 || cfg.lattice < 2) throw std::invalid_argument("norm: bad configuration");
  NormEstimate est;
  const std::vector<Point> centers = plan.centers();
  auto visit = [&](const Point& c, double R) {
    double v = 0.0;
    try {
      v = f(Ball(c, R));
    } catch (const std::domain_error&) {
      ++est.skipped;
      return;
    }
    if (std::isnan(v)) {
      ++est.skipped;
      return;
    }
    ++est.samples;
    if (v > est.value || est.center.empty()) {
      est.value = std::max(est.value, v);
      est.center = c;
      est.radius = R;
    }
  };
  for (const Point& c : centers) {
    for (double R : plan.radii()) visit(c, R);
  }
  est.by_refinement.push_back(est.value);
  // Each refinement halves the smallest radius.
  for (int k = 1; k <= cfg.refinements; ++k) {
    double R = std::ldexp(plan.r_min, -k);
    for (const Point& c : centers) visit(c, R);
    est.by_refinement.push_back(est.value);
  }
  for (std::size_t k = 1; k < est.by_refinement.size(); ++k) {
    double a = est.by_refinement[k - 1], b = est.by_refinement[k];
    est.growth.push_back(a > 0.0 ? b / a : (b > 0.0 ? kInf : 1.0));
  }
  if (std::isinf(est.value)) est.verdict = Verdict::divergent;
  for (double g : est.growth) {
    if (g > 1.0 + cfg.drift_tol) est.verdict = Verdict::divergent;
  }
  return est;
}

double campanato_factor(const Ball& b, double alpha) {
  const int n = static_cast<int>(b.center.size());
  return std::pow(unit_ball_volume(n) * std::pow(b.radius, n), -alpha / n);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("campanato_norm: alpha must lie in (0, 1]");
}

BallNorm grid_oscillation(const GridFunction& u, int lattice) {
  return [&u, lattice](const Ball& b) {
    for (double c : b.center) {
      if (std::abs(c) + b.radius > u.half_width()) throw std::domain_error("ball leaves the grid box");
    }
    return mean_oscillation([&u](const Point& x) { return u(x); }, b, lattice);
  };
}

}  // namespace

namespace {

double sphere_in_ball(int n, double r, double d, double R) { return sphere_fraction_in_ball(n, r, d, R); }

// int_{B} F(|x|) dx for a radial integrand F.
double radial_over_ball(const std::function<double(double)>& F, int n, const Ball& ball, std::vector<double> knots) {
  const double d = norm(ball.center), R = ball.radius;
  const double area = sphere_area(n);
  for (double k : {R - d, d - R, d + R}) {
    if (k > 0.0) knots.push_back(k);
  }
  std::sort(knots.begin(), knots.end());
  auto f = [&](double r) {
    double w = sphere_in_ball(n, r, d, R);
    return w > 0.0 ? F(r) * area * std::pow(r, n - 1) * w : 0.0;
  };
  if (d - R > 0.0) return integrate_radial(f, d - R, d + R, knots);
  // Power-law head below lo; a non-integrable head means an infinite integral.
  const double lo = 1e-6 * (d + R);
  double f1 = f(lo), f2 = f(2.0 * lo);
  double head = 0.0;
  if (f1 > 0.0) {
    double k = std::log2(f2 / f1);
    if (!(k > -1.0)) return kInf;
    head = f1 * lo / (k + 1.0);
  }
  return head + integrate_radial(f, lo, d + R, knots);
}

// (value, measure) shells of B over a log ladder in |x|, for distribution functions.
std::vector<std::pair<double, double>> radial_shells(const std::function<double(double)>& F, int n,
                                                     const Ball& ball, double r0) {
  const double d = norm(ball.center), R = ball.radius;
  auto vol = [&](double r) { return ball_intersection_volume(n, r, R, d); };
  double lo = std::max(r0, d - R);
  std::vector<double> ladder = log_ladder(lo, d + R, 128);
  for (double k : {R - d, d - R}) {
    if (k > lo && k < d + R) ladder.push_back(k);
  }
  std::sort(ladder.begin(), ladder.end());
  std::vector<std::pair<double, double>> out;
  if (d < R) out.emplace_back(F(lo), vol(lo));
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    double a = ladder[i], b = ladder[i + 1];
    double m = vol(b) - vol(a);
    if (m > 0.0) out.emplace_back(std::min(F(a), F(b)), m);
  }
  return out;
}

}  // namespace

double mean_oscillation(const Field& u, const Ball& ball, int lattice) {
  double cell = 0.0;
  std::vector<Point> pts = ball_midpoints(ball, lattice, cell);
  std::vector<double> v;
  v.reserve(pts.size());
  for (const Point& x : pts) v.push_back(u(x));
  return oscillation_of(v);
}

double mean_oscillation(const RadialFunction& u, const Ball& ball, int lattice) {
  (void)lattice;
  const int n = static_cast<int>(ball.center.size());
  if (u.dim() != n) throw std::invalid_argument("mean_oscillation: dimension mismatch");
  const double R = ball.radius, d = norm(ball.center);
  const double vol = unit_ball_volume(n) * std::pow(R, n);
  std::vector<double> knots = u.knots();
  double mean = radial_over_ball([&](double r) { return u.value(r); }, n, ball, knots) / vol;
  if (!std::isfinite(mean)) return kInf;
  // Crossings of the mean split the panels of the second integral.
  double lo = std::max(d - R, (d + R) * 1e-6);
  std::vector<double> ladder = log_ladder(lo, d + R, 16);
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    double a = ladder[i], b = ladder[i + 1];
    double fa = u.value(a) - mean, fb = u.value(b) - mean;
    if (fa * fb < 0.0) {
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        double fm = u.value(m) - mean;
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      knots.push_back(0.5 * (a + b));
    }
  }
  return radial_over_ball([&](double r) { return std::abs(u.value(r) - mean); }, n, ball, knots) / vol;
}

NormEstimate bmo_norm(const Field& u, const SamplingPlan& plan, const NormConfig& cfg) {
  return norm_engine([&](const Ball& b) { return mean_oscillation(u, b, cfg.lattice); }, plan, cfg);
}

NormEstimate bmo_norm(const RadialFunction& u, const SamplingPlan& plan, const NormConfig& cfg) {
  return norm_engine([&](const Ball& b) { return mean_oscillation(u, b, cfg.lattice); }, plan, cfg);
}

NormEstimate bmo_norm(const GridFunction& u, const SamplingPlan& plan, const NormConfig& cfg) {
  return norm_engine(grid_oscillation(u, cfg.lattice), plan, cfg);
}

NormEstimate campanato_norm(const Field& u, double alpha, const SamplingPlan& plan, const NormConfig& cfg) {
  check_alpha(alpha);
  return norm_engine(
      [&](const Ball& b) { return campanato_factor(b, alpha) * mean_oscillation(u, b, cfg.lattice); }, plan, cfg);
}

NormEstimate campanato_norm(const RadialFunction& u, double alpha, const SamplingPlan& plan,
                            const NormConfig& cfg) {
  check_alpha(alpha);
  return norm_engine(
      [&](const Ball& b) { return campanato_factor(b, alpha) * mean_oscillation(u, b, cfg.lattice); }, plan, cfg);
}

NormEstimate campanato_norm(const GridFunction& u, double alpha, const SamplingPlan& plan, const NormConfig& cfg) {
  check_alpha(alpha);
  BallNorm osc = grid_oscillation(u, cfg.lattice);
  return norm_engine([&](const Ball& b) { return campanato_factor(b, alpha) * osc(b); }, plan, cfg);
}

double weak_lq_norm(std::vector<std::pair<double, double>> samples, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("weak_lq_norm: q must be positive");
  for (auto& [v, m] : samples) {
    if (m < 0.0) throw std::invalid_argument("weak_lq_norm: negative cell measure");
    v = std::abs(v);
  }
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = 0.0, cum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    cum += samples[i].second;
    // Thresholds just below a value count every sample with that value.
    if (i + 1 < samples.size() && samples[i + 1].first == samples[i].first) continue;
    if (samples[i].first > 0.0) best = std::max(best, samples[i].first * std::pow(cum, 1.0 / q));
  }
  return best;
}

std::vector<std::pair<double, double>> gradient_samples(const GridFunction& u, const Ball& ball) {
  const int n = u.dim();
  if (static_cast<int>(ball.center.size()) != n) throw std::invalid_argument("gradient_samples: dimension mismatch");
  const int m = u.per_axis();
  const double h = u.h();
  double vol = std::pow(h, n);
  for (int k = 2; k <= n; ++k) vol /= k;
  std::vector<int> perm(n);
  for (int k = 0; k < n; ++k) perm[k] = k;
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  // Only cubes that can meet the ball.
  std::vector<int> lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::floor((ball.center[k] - ball.radius + u.half_width()) / h)) - 1);
    hi[k] = std::min(m - 2, static_cast<int>(std::ceil((ball.center[k] + ball.radius + u.half_width()) / h)) + 1);
    if (hi[k] < lo[k]) return {};
  }
  std::vector<std::pair<double, double>> out;
  std::vector<int> idx = lo, v(n);
  std::vector<double> g(n);
  while (true) {
    for (const std::vector<int>& pi : perms) {
      v = idx;
      Point centroid(n, 0.0);
      double prev = u.values()[u.index_of(v)];
      for (int k = 0; k < n; ++k) centroid[k] += v[k];
      double g2 = 0.0;
      for (int k = 0; k < n; ++k) {
        ++v[pi[k]];
        double next = u.values()[u.index_of(v)];
        g2 += (next - prev) * (next - prev);
        prev = next;
        for (int j = 0; j < n; ++j) centroid[j] += v[j];
      }
      double d2 = 0.0;
      for (int k = 0; k < n; ++k) {
        double c = -u.half_width() + h * centroid[k] / (n + 1) - ball.center[k];
        d2 += c * c;
      }
      if (d2 <= ball.radius * ball.radius) out.emplace_back(std::sqrt(g2) / h, vol);
    }
    int k = 0;
    while (k < n && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      ++k;
    }
    if (k == n) break;
  }
  return out;
}

double weak_gradient_norm(const RadialFunction& u, const Ball& ball, double p, int lattice) {
  (void)lattice;
  const int n = static_cast<int>(ball.center.size());
  if (u.dim() != n) throw std::invalid_argument("weak_gradient_norm: dimension mismatch");
  if (!(p > 0.0)) throw std::invalid_argument("weak_gradient_norm: p must be positive");
  const double V = unit_ball_volume(n);
  const double d = norm(ball.center), R = ball.radius;
  const double r0 = (d + R) * 1e-8;
  if (d < R) {
    // Blow-up of g(r) |B_r|^(1/p) at the origin makes the norm infinite.
    auto h = [&](double r) { return u.gradient(r) * std::pow(V * std::pow(r, n), 1.0 / p); };
    double h0 = h(r0), h1 = h(10.0 * r0);
    if (h0 > 0.0 && h1 > 0.0 && std::log10(h0 / h1) > 0.01) return kInf;
  }
  return weak_lq_norm(radial_shells([&](double r) { return u.gradient(r); }, n, ball, r0), p);
}

double gradient_integral(const RadialFunction& u, const Ball& ball, double s, int lattice) {
  (void)lattice;
  const int n = static_cast<int>(ball.center.size());
  if (u.dim() != n) throw std::invalid_argument("gradient_integral: dimension mismatch");
  return radial_over_ball([&](double r) { return std::pow(u.gradient(r), s); }, n, ball, u.knots());
}

namespace {

GradientReport gradient_report(const std::function<double(const Ball&)>& integral,
                               const std::function<double(const Ball&)>& weak, const Measure& mu, double s,
                               const SpaceParams& sp, const SamplingPlan& plan, bool check_stability) {
  if (!(s > 0.0 && s < sp.p())) throw std::invalid_argument("gradient_morrey_check: need 0 < s < p");
  const int n = sp.n();
  const double p = sp.p();
  GradientReport rep;
  std::vector<Point> singular;
  auto morrey = [&](const Point& c, double R) {
    double I = integral(Ball(c, R));
    if (std::isinf(I) && std::find(singular.begin(), singular.end(), c) == singular.end()) singular.push_back(c);
    return std::pow(std::pow(R, s - n) * I, 1.0 / s);
  };
  rep.morrey = sup_over_plan("gradient_morrey", plan, morrey, check_stability);
  rep.weak = sup_over_plan(
      "gradient_weak", plan, [&](const Point& c, double R) { return weak(Ball(c, R)) / std::pow(R, (n - p) / p); },
      check_stability);
  rep.M = mu.is_zero() ? 0.0 : morrey_constant(mu, sp, plan, false).sup_constant;
  double scale = std::pow(rep.M, 1.0 / (p - 1.0));
  rep.morrey_ratio = scale > 0.0 ? rep.morrey.sup_constant / scale : 0.0;
  rep.weak_ratio = scale > 0.0 ? rep.weak.sup_constant / scale : 0.0;
  if (!singular.empty()) {
    std::string where;
    for (const Point& c : singular) {
      where += where.empty() ? "(" : " (";
      for (std::size_t i = 0; i < c.size(); ++i) where += (i ? "," : "") + std::to_string(c[i]);
      where += ")";
    }
    rep.notes.push_back("morrey form diverges on balls centered at " + where);
    bool away_finite = true;
    for (const Point& c : plan.centers()) {
      if (std::find(singular.begin(), singular.end(), c) != singular.end()) continue;
      for (double R : plan.radii()) {
        if (!std::isfinite(morrey(c, R))) away_finite = false;
      }
    }
    if (away_finite) rep.notes.push_back("finite on all sampled balls with other centers");
  }
  return rep;
}

}  // namespace

GradientReport gradient_morrey_check(const RadialFunction& u, const Measure& mu, double s, const SpaceParams& sp,
                                     const SamplingPlan& plan, bool check_stability) {
  check_dims(mu, sp, "gradient_morrey_check");
  if (u.dim() != sp.n()) throw std::invalid_argument("gradient_morrey_check: dimension mismatch");
  return gradient_report([&](const Ball& b) { return gradient_integral(u, b, s); },
                         [&](const Ball& b) { return weak_gradient_norm(u, b, sp.p()); }, mu, s, sp, plan,
                         check_stability);
}

GradientReport gradient_morrey_check(const GridFunction& u, const Measure& mu, double s, const SpaceParams& sp,
                                     const SamplingPlan& plan, bool check_stability) {
  check_dims(mu, sp, "gradient_morrey_check");
  if (u.dim() != sp.n()) throw std::invalid_argument("gradient_morrey_check: dimension mismatch");
  auto inside = [&](const Ball& b) {
    for (double c : b.center) {
      if (std::abs(c) + b.radius > u.half_width()) throw std::domain_error("ball leaves the grid box");
    }
  };
  return gradient_report(
      [&](const Ball& b) {
        inside(b);
        double total = 0.0;
        for (const auto& [g, m] : gradient_samples(u, b)) total += std::pow(g, s) * m;
        return total;
      },
      [&](const Ball& b) {
        inside(b);
        return weak_lq_norm(gradient_samples(u, b), sp.p());
      },
      mu, s, sp, plan, check_stability);
}

double gradient_decay(const RadialFunction& u, double R, double q) {
  if (!(R > 0.0) || !(q > 0.0)) throw std::invalid_argument("gradient_decay: R and q must be positive");
  const int n = u.dim();
  return std::pow(R, q - n) * gradient_integral(u, Ball(Point(n, 0.0), R), q);
}

}  // namespace wolffkit

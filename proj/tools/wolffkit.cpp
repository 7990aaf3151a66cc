#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wolffkit/capacity.hpp"
#include "wolffkit/dyadic.hpp"
#include "wolffkit/grid.hpp"
#include "wolffkit/measure_io.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/quadrature.hpp"
#include "wolffkit/radial.hpp"
#include "wolffkit/random_measures.hpp"
#include "wolffkit/regularity.hpp"
#include "wolffkit/report.hpp"
#include "wolffkit/solver.hpp"

using namespace wolffkit;

namespace {

constexpr int kUsage = 64;
constexpr int kDataErr = 65;
constexpr int kNoInput = 66;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<int> n;
  std::optional<double> p;
  std::optional<double> q;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int plan_centers = 3;
  int plan_radii = 4;
  std::string out;
  bool no_stability = false;

  std::string kind;
  std::string measure, sigma, mu, points, samples;
  std::optional<double> alpha, radius, s, threshold;
  std::vector<double> center;
  int random = 0;
  std::string emit;
  int k_min = -8, k_max = 4;
  std::vector<double> region_lo, region_hi;
  bool modified = false;
  std::string method = "trials";
  bool grid = false;
  double half_width = 1.0, h = 1.0 / 32;
  std::vector<double> widths{1.0, 2.0, 4.0};
  double r_min = 1e-3, r_max = 1e3;
  int per_decade = 8;
  int refinements = 2;
  int max_iter = 20000;
};

struct Output {
  std::string text;
  int code = 0;
};

std::string tsv(double v) { return format_number(v); }

Measure load(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing ") + flag);
  return read_measure_file(path);
}

int measure_dim(const RunConfig& c, const Measure& m) {
  if (c.n && *c.n != m.dim())
    throw UsageError("--n " + std::to_string(*c.n) + " does not match measure dimension " + std::to_string(m.dim()));
  return m.dim();
}

SpaceParams space(const RunConfig& c, int dim, bool with_q = false) {
  if (!c.p) throw UsageError("missing --p");
  if (with_q && !c.q) throw UsageError("missing --q");
  try {
    return with_q ? SpaceParams(dim, *c.p, *c.q) : (c.q ? SpaceParams(dim, *c.p, *c.q) : SpaceParams(dim, *c.p));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SamplingPlan plan_for(const RunConfig& c, const std::vector<Measure>& ms) {
  PlanOptions o;
  o.per_decade = c.plan_radii;
  o.lattice_per_axis = c.plan_centers;
  return default_plan(ms, o);
}

QuadratureConfig quad(const RunConfig& c) {
  QuadratureConfig q;
  q.tol = c.tol;
  return q;
}

void put_space(Report& r, const SpaceParams& sp) {
  r.put("n", sp.n());
  r.put("p", sp.p());
  if (sp.has_q()) r.put("q", sp.q());
}

// ---- potential ----

Output run_potential(const RunConfig& c) {
  Measure mu = load(c.measure, "--measure");
  const int n = measure_dim(c, mu);
  if (c.points.empty()) throw UsageError("missing --points");
  std::vector<Point> pts = read_points_file(c.points, n);
  QuadratureConfig cfg = quad(c);
  std::ostringstream out;
  out << "#";
  for (int i = 0; i < n; ++i) out << (i ? "\t" : " ") << "x" << i + 1;
  out << "\tvalue\terr\tmethod\n";
  for (const Point& x : pts) {
    PotentialEvaluation e;
    if (c.kind == "wolff") {
      e = wolff(mu, x, space(c, n), cfg);
    } else if (c.kind == "wolff_tail") {
      if (!c.radius) throw UsageError("wolff_tail needs --radius");
      e = wolff_tail(mu, x, *c.radius, space(c, n), cfg);
    } else if (c.kind == "riesz" || c.kind == "maximal") {
      if (!c.alpha) throw UsageError(c.kind + " needs --alpha");
      e = c.kind == "riesz" ? riesz(mu, x, *c.alpha, cfg) : frac_maximal(mu, x, *c.alpha, cfg);
    } else {
      throw UsageError("unknown potential kind '" + c.kind + "'");
    }
    for (std::size_t i = 0; i < x.size(); ++i) out << (i ? "\t" : "") << tsv(x[i]);
    out << '\t' << tsv(e.value) << '\t' << tsv(e.err_estimate) << '\t' << to_string(e.method) << '\n';
  }
  return {out.str(), 0};
}

// ---- capacity ----

Output run_capacity(const RunConfig& c) {
  Report r;
  r.put("command", "capacity " + c.kind);
  if (c.kind == "ball") {
    if (!c.n) throw UsageError("capacity ball needs --n");
    if (!c.radius) throw UsageError("capacity ball needs --radius");
    SpaceParams sp = space(c, *c.n);
    put_space(r, sp);
    r.put("radius", *c.radius);
    r.put("capacity", ball_capacity(*c.radius, sp));
    return {r.str(), 0};
  }
  Measure sigma = load(c.measure.empty() ? c.sigma : c.measure, "--measure");
  const int n = measure_dim(c, sigma);
  if (c.kind == "condition") {
    SpaceParams sp = space(c, n);
    put_space(r, sp);
    ConditionReport cr = capacity_condition_const(sigma, sp, plan_for(c, {sigma}), !c.no_stability);
    append_condition(r, "condition", cr, true);
    return {r.str(), exit_code(cr.verdict)};
  }
  if (c.kind == "kappa") {
    SpaceParams sp = space(c, n, true);
    if (static_cast<int>(c.center.size()) != n) throw UsageError("kappa needs --center with n coordinates");
    if (!c.radius) throw UsageError("kappa needs --radius");
    Ball ball(c.center, *c.radius);
    KappaEstimate k;
    if (c.method == "trials") {
      KappaTrials t;
      t.quad = quad(c);
      k = kappa_lower(sigma, ball, sp, t);
    } else if (c.method == "fixedpoint") {
      k = kappa_fixed_point(sigma, ball, sp);
    } else {
      throw UsageError("--method must be trials or fixedpoint");
    }
    put_space(r, sp);
    r.put("center", ball.center);
    r.put("radius", ball.radius);
    r.put("method", to_string(k.method));
    r.put("kappa_lower", k.lower);
    r.put("trials", k.trial_count);
    r.put("capped", k.capped);
    if (!k.best_trial.empty()) r.put("best_trial", k.best_trial);
    if (!k.caveat.empty()) r.put("caveat", k.caveat);
    return {r.str(), k.divergent() ? 2 : 0};
  }
  if (c.kind == "intrinsic") {
    SpaceParams sp = space(c, n, true);
    if (c.points.empty()) throw UsageError("missing --points");
    std::ostringstream out;
    out << "#";
    for (int i = 0; i < n; ++i) out << (i ? "\t" : " ") << "x" << i + 1;
    out << "\tvalue\tradii\n";
    IntrinsicConfig ic;
    ic.trials.quad = quad(c);
    for (const Point& x : read_points_file(c.points, n)) {
      IntrinsicResult res = intrinsic_potential(sigma, x, sp, ic);
      for (std::size_t i = 0; i < x.size(); ++i) out << (i ? "\t" : "") << tsv(x[i]);
      out << '\t' << tsv(res.value) << '\t' << res.radii.size() << '\n';
    }
    return {out.str(), 0};
  }
  throw UsageError("unknown capacity kind '" + c.kind + "'");
}

// ---- solve ----

std::string header(const Report& r) {
  std::string s;
  for (const auto& [k, v] : r.entries()) s += "# " + k + ": " + v + "\n";
  return s;
}

CheckConfig check_config(const RunConfig& c) {
  CheckConfig cc;
  cc.quad = quad(c);
  cc.check_stability = !c.no_stability;
  if (c.threshold) cc.small_threshold = *c.threshold;
  return cc;
}

Output run_solve(const RunConfig& c) {
  Report r;
  r.put("command", "solve " + c.kind);
  if (c.kind == "radial") {
    Measure mu = load(c.measure, "--measure");
    SpaceParams sp = space(c, measure_dim(c, mu));
    put_space(r, sp);
    RadialFunction u;
    try {
      u = radial_solve(mu, sp);
    } catch (const std::domain_error& e) {
      r.put("status", "divergent");
      r.put("reason", e.what());
      return {r.str(), 2};
    }
    r.put("status", "solved");
    std::string s = header(r) + "# r\tu\tgrad\n";
    for (double x : log_ladder(c.r_min, c.r_max, c.per_decade))
      s += tsv(x) + "\t" + tsv(u.value(x)) + "\t" + tsv(u.gradient(x)) + "\n";
    return {s, 0};
  }
  if (c.kind == "fixedpoint") {
    Measure sigma = load(c.sigma, "--sigma");
    const int n = measure_dim(c, sigma);
    Measure mu = c.mu.empty() ? Measure::zero(n) : load(c.mu, "--mu");
    if (mu.dim() != n) throw UsageError("--sigma and --mu differ in dimension");
    SpaceParams sp = space(c, n, true);
    FixedPointConfig fc;
    fc.tol = std::max(c.tol, 1e-14);
    const bool sub = sp.q() < sp.p() - 1.0;
    if (sp.q() == sp.p() - 1.0) throw UsageError("fixedpoint needs q != p - 1");
    FixedPointResult res = sub ? fixed_point_subnatural(sigma, mu, sp, fc) : fixed_point_supernatural(sigma, mu, sp, fc);
    put_space(r, sp);
    r.put("regime", sub ? "subnatural" : "supernatural");
    r.put("status", to_string(res.status));
    r.put("iterations", res.iterations);
    r.put("residual", res.residual);
    r.put("posthoc_residual", res.posthoc_residual);
    r.put("ratio_to_wolff_mu", res.ratio_to_wolff_mu);
    r.put("nodes", res.nodes.size());
    std::string s = header(r) + "# node\tvalue\n";
    for (std::size_t i = 0; i < res.nodes.size(); ++i) s += format_point(res.nodes[i]) + "\t" + tsv(res.values[i]) + "\n";
    return {s, res.status == FixedPointStatus::diverged ? 2 : 0};
  }
  if (c.kind == "grid" || c.kind == "sweep") {
    Measure mu = load(c.measure, "--measure");
    SpaceParams sp = space(c, measure_dim(c, mu));
    GridConfig gc;
    gc.max_iter = c.max_iter;
    put_space(r, sp);
    r.put("h", c.h);
    if (c.kind == "sweep") {
      SweepReport sw = expanding_domain_sweep(mu, c.widths, c.h, sp, gc);
      for (std::size_t i = 0; i < sw.half_widths.size(); ++i) {
        const std::string p = "box" + std::to_string(i + 1) + ".";
        r.put(p + "half_width", sw.half_widths[i]);
        r.put(p + "iterations", sw.solutions[i].iterations);
        r.put(p + "converged", sw.solutions[i].converged);
        if (i > 0) r.put(p + "change", sw.changes[i - 1]);
      }
      r.put("stabilizing", sw.stabilizing);
      for (std::size_t i = 0; i < sw.notes.size(); ++i) r.put("note" + std::to_string(i + 1), sw.notes[i]);
      CompositeReport bmo = thm1_verdict(mu, sp, plan_for(c, {mu}), check_config(c));
      r.put("bmo_criterion.verdict", to_string(bmo.verdict));
      if (bmo.verdict != Verdict::finite) r.put("bmo_criterion.note", "non-BMO solution expected");
      return {r.str(), 0};
    }
    GridFunction u = grid_solve(mu, c.half_width, c.h, sp, gc);
    r.put("half_width", c.half_width);
    r.put("nodes", u.size());
    r.put("iterations", u.iterations);
    r.put("converged", u.converged);
    r.put("energy", u.energy_history.empty() ? 0.0 : u.energy_history.back());
    std::string s = header(r) + "# node\tvalue\n";
    for (std::size_t i = 0; i < u.size(); ++i) s += format_point(u.node(i)) + "\t" + tsv(u.values()[i]) + "\n";
    return {s, 0};
  }
  throw UsageError("unknown solve kind '" + c.kind + "'");
}

// ---- check ----


Output run_check(const RunConfig& c) {
  Report r;
  r.put("command", "check " + c.kind);
  if (c.kind == "thm1" || c.kind == "holder" || c.kind == "morrey" || c.kind == "finiteness") {
    Measure mu = load(c.measure.empty() ? c.mu : c.measure, "--measure");
    SpaceParams sp = space(c, measure_dim(c, mu));
    put_space(r, sp);
    SamplingPlan plan = plan_for(c, {mu});
    if (c.kind == "thm1") {
      CompositeReport cr = thm1_verdict(mu, sp, plan, check_config(c));
      append_composite(r, cr);
      return {r.str(), exit_code(cr.verdict)};
    }
    ConditionReport cr;
    if (c.kind == "holder") {
      if (!c.alpha) throw UsageError("holder needs --alpha");
      cr = holder_condition(mu, *c.alpha, sp, plan, !c.no_stability);
    } else if (c.kind == "morrey") {
      cr = morrey_constant(mu, sp, plan, !c.no_stability);
    } else {
      cr = finiteness_check(mu, sp, quad(c));
    }
    append_condition(r, "condition", cr, c.kind != "finiteness");
    return {r.str(), exit_code(cr.verdict)};
  }
  Measure sigma = load(c.sigma, "--sigma");
  const int n = measure_dim(c, sigma);
  Measure mu = c.mu.empty() ? Measure::zero(n) : load(c.mu, "--mu");
  if (mu.dim() != n) throw UsageError("--sigma and --mu differ in dimension");
  SamplingPlan plan = plan_for(c, {sigma, mu});
  CompositeReport cr;
  if (c.kind == "thm4") {
    SpaceParams sp = space(c, n);
    put_space(r, sp);
    cr = thm4_conditions(sigma, mu, sp, plan, check_config(c));
  } else {
    SpaceParams sp = space(c, n, true);
    put_space(r, sp);
    if (c.kind == "thm2") {
      cr = thm2_conditions(sigma, mu, sp, plan, check_config(c));
    } else if (c.kind == "thm3") {
      cr = thm3_conditions(sigma, mu, sp, plan, check_config(c));
    } else if (c.kind == "cor1") {
      cr = cor1_conditions(sigma, mu, sp, plan, check_config(c));
    } else {
      throw UsageError("unknown check kind '" + c.kind + "'");
    }
  }
  append_composite(r, cr);
  return {r.str(), exit_code(cr.verdict)};
}

// ---- norms ----

Output run_norms(const RunConfig& c) {
  Report r;
  r.put("command", "norms " + c.kind);
  if (c.kind == "weakLq") {
    if (c.samples.empty()) throw UsageError("weakLq needs --samples");
    if (!c.q) throw UsageError("weakLq needs --q");
    std::vector<std::pair<double, double>> cells;
    for (const Point& row : read_points_file(c.samples, 2)) cells.emplace_back(row[0], row[1]);
    r.put("q", *c.q);
    r.put("cells", cells.size());
    double v = weak_lq_norm(std::move(cells), *c.q);
    r.put("value", v);
    return {r.str(), std::isinf(v) ? 2 : 0};
  }
  Measure mu = load(c.measure, "--measure");
  SpaceParams sp = space(c, measure_dim(c, mu));
  put_space(r, sp);
  SamplingPlan plan = plan_for(c, {mu});
  NormConfig nc;
  nc.refinements = c.refinements;

  std::optional<RadialFunction> ur;
  std::optional<GridFunction> ug;
  if (c.grid) {
    GridConfig gc;
    gc.max_iter = c.max_iter;
    ug = grid_solve(mu, c.half_width, c.h, sp, gc);
    r.put("solution", "grid");
    r.put("half_width", c.half_width);
    r.put("h", c.h);
  } else {
    try {
      ur = radial_solve(mu, sp);
    } catch (const std::domain_error& e) {
      r.put("solution", "none");
      r.put("reason", e.what());
      return {r.str(), 2};
    }
    r.put("solution", "radial");
  }

  if (c.kind == "bmo" || c.kind == "campanato") {
    NormEstimate e;
    if (c.kind == "bmo") {
      e = ur ? bmo_norm(*ur, plan, nc) : bmo_norm(*ug, plan, nc);
    } else {
      if (!c.alpha) throw UsageError("campanato needs --alpha");
      e = ur ? campanato_norm(*ur, *c.alpha, plan, nc) : campanato_norm(*ug, *c.alpha, plan, nc);
    }
    append_norm(r, c.kind, e);
    append_plan(r, "plan", plan);
    return {r.str(), exit_code(e.verdict)};
  }
  if (c.kind == "gradient") {
    if (!c.s) throw UsageError("gradient needs --s");
    GradientReport g = ur ? gradient_morrey_check(*ur, mu, *c.s, sp, plan, !c.no_stability)
                          : gradient_morrey_check(*ug, mu, *c.s, sp, plan, !c.no_stability);
    append_condition(r, "morrey", g.morrey);
    append_condition(r, "weak", g.weak);
    r.put("M", g.M);
    r.put("morrey_ratio", g.morrey_ratio);
    r.put("weak_ratio", g.weak_ratio);
    for (std::size_t i = 0; i < g.notes.size(); ++i) r.put("note" + std::to_string(i + 1), g.notes[i]);
    append_plan(r, "plan", plan);
    Verdict v = g.morrey.verdict == Verdict::divergent || g.weak.verdict == Verdict::divergent ? Verdict::divergent
                                                                                               : Verdict::finite;
    return {r.str(), exit_code(v)};
  }
  throw UsageError("unknown norm kind '" + c.kind + "'");
}

// ---- verify ----

DyadicFamily family(const RunConfig& c, int n) {
  DyadicFamily f;
  f.k_min = c.k_min;
  f.k_max = c.k_max;
  if (!c.region_lo.empty() || !c.region_hi.empty()) {
    if (static_cast<int>(c.region_lo.size()) != n || static_cast<int>(c.region_hi.size()) != n)
      throw UsageError("--region-lo and --region-hi need n coordinates each");
    f.region_lo = c.region_lo;
    f.region_hi = c.region_hi;
  }
  try {
    f.validate(n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return f;
}

void put_cube(Report& r, const std::string& key, const DyadicCube& q) {
  r.put(key + ".level", q.level);
  r.put(key + ".lower", q.lower());
}

Output run_verify(const RunConfig& c) {
  Report r;
  r.put("command", "verify " + c.kind);
  if (c.kind == "dyadic") {
    if (c.random > 0) {
      if (!c.n) throw UsageError("verify dyadic --random needs --n");
      SpaceParams sp = space(c, *c.n);
      DyadicFamily fam = family(c, *c.n);
      put_space(r, sp);
      r.put("seed", static_cast<std::size_t>(c.seed));
      r.put("trials", c.random);
      MeasureSampler rng(c.seed);
      double max_up = 0.0, max_down = 0.0;
      for (int t = 0; t < c.random; ++t) {
        Measure mu = rng.dirac_sum(*c.n, 1 + static_cast<int>(rng.uniform(0.0, 5.0)));
        Point x = rng.point_in_cube(*c.n, 1.5);
        CubeMeasure cm = CubeMeasure::from_measure(mu);
        double w = wolff(mu, x, sp, quad(c)).value;
        double d = dyadic_wolff(cm, x, sp, fam).value;
        double m = modified_dyadic_wolff(cm, x, sp, fam).value;
        if (w > 0.0) max_up = std::max(max_up, d / w);
        if (m > 0.0) max_down = std::max(max_down, w / m);
        if (!c.emit.empty()) write_measure_file(c.emit + std::to_string(t + 1) + ".measure", mu);
      }
      r.put("max_dyadic_over_wolff", max_up);
      r.put("max_wolff_over_modified", max_down);
      return {r.str(), 0};
    }
    Measure sigma = load(c.measure.empty() ? c.sigma : c.measure, "--measure");
    const int n = measure_dim(c, sigma);
    SpaceParams sp = space(c, n);
    DyadicFamily fam = family(c, n);
    put_space(r, sp);
    r.put("k_min", fam.k_min);
    r.put("k_max", fam.k_max);
    CubeMeasure cm = CubeMeasure::from_measure(sigma);
    CarlesonConstant cc = carleson_constant(cm, sp, fam);
    r.put("carleson.constant", cc.constant);
    r.put("carleson.verdict", cc.divergent ? "divergent" : "finite");
    r.put("carleson.cubes", cc.cubes);
    if (cc.achieving) {
      put_cube(r, "carleson.achieving", *cc.achieving);
      CarlesonResult cs = carleson_sum(cm, *cc.achieving, sp, fam);
      r.put("carleson.truncation_estimate", cs.truncation_estimate);
    }
    if (!c.points.empty()) {
      std::vector<Point> pts = read_points_file(c.points, n);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string p = "point" + std::to_string(i + 1) + ".";
        DyadicSum d = c.modified ? modified_dyadic_wolff(cm, pts[i], sp, fam) : dyadic_wolff(cm, pts[i], sp, fam);
        r.put(p + "x", pts[i]);
        r.put(p + "dyadic_wolff", d.value);
        r.put(p + "truncation_estimate", d.truncation_estimate);
        r.put(p + "wolff", wolff(sigma, pts[i], sp, quad(c)).value);
      }
    }
    return {r.str(), cc.divergent ? 2 : 0};
  }
  if (c.kind == "lemma52") {
    Lemma52Config lc;
    lc.quad = quad(c);
    lc.plan.per_decade = c.plan_radii;
    lc.plan.lattice_per_axis = c.plan_centers;
    if (c.random > 0) {
      const int n = c.n.value_or(3);
      SpaceParams sp = space(c, n);
      put_space(r, sp);
      r.put("seed", static_cast<std::size_t>(c.seed));
      r.put("trials", c.random);
      MeasureSampler rng(c.seed);
      double lo = kInf, hi = 0.0;
      for (int t = 0; t < c.random; ++t) {
        Measure sigma = rng.ball_cloud(n, 1 + static_cast<int>(rng.uniform(0.0, 3.0)));
        Measure mu = rng.dirac_sum(n, 1 + static_cast<int>(rng.uniform(0.0, 3.0)));
        if (!c.emit.empty()) {
          write_measure_file(c.emit + std::to_string(t + 1) + ".sigma.measure", sigma);
          write_measure_file(c.emit + std::to_string(t + 1) + ".mu.measure", mu);
        }
        Lemma52Result res = verify_lemma52(sigma, mu, sp, lc);
        r.put("trial" + std::to_string(t + 1) + ".ratio", res.ratio);
        lo = std::min(lo, res.ratio);
        hi = std::max(hi, res.ratio);
      }
      r.put("ratio_min", lo);
      r.put("ratio_max", hi);
      r.put("spread", hi / lo);
      return {r.str(), std::isfinite(hi) ? 0 : 2};
    }
    Measure sigma = load(c.sigma, "--sigma");
    const int n = measure_dim(c, sigma);
    Measure mu = load(c.mu, "--mu");
    if (mu.dim() != n) throw UsageError("--sigma and --mu differ in dimension");
    SpaceParams sp = space(c, n);
    put_space(r, sp);
    Lemma52Result res = verify_lemma52(sigma, mu, sp, lc);
    r.put("lhs", res.lhs);
    r.put("rhs", res.rhs);
    r.put("c_ball", res.c_ball);
    r.put("ratio", res.ratio);
    r.put("divergent", res.divergent);
    return {r.str(), res.divergent ? 2 : 0};
  }
  throw UsageError("unknown verify kind '" + c.kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wolff potentials, capacities and regularity criteria for -Delta_p u = mu"};
  app.require_subcommand(1);
  RunConfig c;

  app.add_option("--n", c.n, "Dimension (defaults to the measure's)");
  app.add_option("--p", c.p, "Exponent p, 1 < p < n");
  app.add_option("--q", c.q, "Exponent q > 0");
  app.add_option("--tol", c.tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Seed for randomized sweeps");
  app.add_option("--plan-centers", c.plan_centers, "Lattice centers per axis")->check(CLI::NonNegativeNumber);
  app.add_option("--plan-radii", c.plan_radii, "Radii per decade")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Write output to this file");
  app.add_flag("--no-stability", c.no_stability, "Skip the refined-plan stability pass");

  auto kind = [&](CLI::App* sub, std::vector<std::string> kinds) {
    sub->fallthrough();
    sub->add_option("kind", c.kind)->required()->check(CLI::IsMember(kinds));
  };
  auto* potential = app.add_subcommand("potential", "Evaluate a potential at points");
  kind(potential, {"wolff", "wolff_tail", "riesz", "maximal"});
  auto* capacity = app.add_subcommand("capacity", "Capacities, kappa estimates and intrinsic potentials");
  kind(capacity, {"ball", "condition", "kappa", "intrinsic"});
  auto* solve = app.add_subcommand("solve", "Radial, fixed-point and grid solutions");
  kind(solve, {"radial", "fixedpoint", "grid", "sweep"});
  auto* check = app.add_subcommand("check", "Existence and regularity criteria");
  kind(check, {"thm1", "thm2", "thm3", "cor1", "thm4", "holder", "morrey", "finiteness"});
  auto* norms = app.add_subcommand("norms", "Norms of computed solutions");
  kind(norms, {"bmo", "campanato", "weakLq", "gradient"});
  auto* verify = app.add_subcommand("verify", "Dyadic comparisons and the capacity inequality");
  kind(verify, {"dyadic", "lemma52"});

  for (CLI::App* sub : {potential, capacity, solve, check, norms, verify}) {
    sub->add_option("--measure", c.measure, "Measure file");
    sub->add_option("--sigma", c.sigma, "Measure file for sigma");
    sub->add_option("--mu", c.mu, "Measure file for mu");
    sub->add_option("--points", c.points, "Points file");
    sub->add_option("--alpha", c.alpha, "Order alpha");
    sub->add_option("--radius", c.radius, "Radius");
    sub->add_option("--center", c.center, "Ball center")->expected(1, 64);
    sub->add_option("--threshold", c.threshold, "Smallness threshold for constants");
  }
  capacity->add_option("--method", c.method, "kappa estimator: trials or fixedpoint");
  solve->add_option("--half-width", c.half_width, "Half width N of the grid box")->check(CLI::PositiveNumber);
  solve->add_option("--spacing", c.h, "Grid spacing")->check(CLI::PositiveNumber);
  solve->add_option("--widths", c.widths, "Half widths of a sweep")->delimiter(',');
  solve->add_option("--max-iter", c.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  solve->add_option("--r-min", c.r_min, "Smallest output radius")->check(CLI::PositiveNumber);
  solve->add_option("--r-max", c.r_max, "Largest output radius")->check(CLI::PositiveNumber);
  solve->add_option("--per-decade", c.per_decade, "Output radii per decade")->check(CLI::PositiveNumber);
  norms->add_option("--samples", c.samples, "Two columns: value, cell measure");
  norms->add_option("--s", c.s, "Gradient integrability exponent");
  norms->add_flag("--grid", c.grid, "Use the grid solver instead of the radial solution");
  norms->add_option("--half-width", c.half_width, "Half width of the grid box")->check(CLI::PositiveNumber);
  norms->add_option("--spacing", c.h, "Grid spacing")->check(CLI::PositiveNumber);
  norms->add_option("--max-iter", c.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  norms->add_option("--refinements", c.refinements, "Halvings of the smallest radius")->check(CLI::NonNegativeNumber);
  verify->add_option("--random", c.random, "Number of random trials")->check(CLI::NonNegativeNumber);
  verify->add_option("--kmin", c.k_min, "Finest dyadic level");
  verify->add_option("--kmax", c.k_max, "Coarsest dyadic level");
  verify->add_option("--region-lo", c.region_lo, "Lower corner of the cube region")->expected(1, 64);
  verify->add_option("--region-hi", c.region_hi, "Upper corner of the cube region")->expected(1, 64);
  verify->add_option("--emit-measures", c.emit, "Write each random measure to <prefix><trial>.measure");
  verify->add_flag("--modified", c.modified, "Use tripled cubes for the pointwise sums");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    Output o;
    if (*potential) o = run_potential(c);
    if (*capacity) o = run_capacity(c);
    if (*solve) o = run_solve(c);
    if (*check) o = run_check(c);
    if (*norms) o = run_norms(c);
    if (*verify) o = run_verify(c);
    if (c.out.empty()) {
      std::cout << o.text;
    } else {
      std::ofstream f(c.out);
      if (!f) throw std::runtime_error("cannot write '" + c.out + "'");
      f << o.text;
    }
    return o.code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kDataErr;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::cerr << "error: " << what << '\n';
    return what.rfind("cannot open", 0) == 0 ? kNoInput : 1;
  }
}

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wolffkit/capacity.hpp"
#include "wolffkit/dyadic.hpp"
#include "wolffkit/grid.hpp"
#include "wolffkit/measure.hpp"
#include "wolffkit/measure_io.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/radial.hpp"
#include "wolffkit/regularity.hpp"
#include "wolffkit/solver.hpp"

namespace py = pybind11;
using namespace wolffkit;

namespace {

QuadratureConfig quad(bool force_quadrature, int points_per_decade) {
  QuadratureConfig c;
  c.force_quadrature = force_quadrature;
  c.points_per_decade = points_per_decade;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wolff potentials, capacities and solvers for -Delta_p u = mu";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<SpaceParams>(m, "SpaceParams")
      .def(py::init<int, double, std::optional<double>>(), py::arg("n"), py::arg("p"), py::arg("q") = py::none())
      .def_property_readonly("n", &SpaceParams::n)
      .def_property_readonly("p", &SpaceParams::p)
      .def_property_readonly("q", &SpaceParams::q)
      .def_property_readonly("beta", &SpaceParams::beta)
      .def_property_readonly("omega", &SpaceParams::omega)
      .def("__repr__", [](const SpaceParams& s) {
        return "SpaceParams(n=" + std::to_string(s.n()) + ", p=" + std::to_string(s.p()) + ")";
      });

  py::class_<Ball>(m, "Ball")
      .def(py::init<Point, double>(), py::arg("center"), py::arg("radius"))
      .def_readonly("center", &Ball::center)
      .def_readonly("radius", &Ball::radius);

  py::class_<Measure>(m, "Measure")
      .def_static("zero", &Measure::zero, py::arg("dim"))
      .def_static("dirac", &Measure::dirac, py::arg("point"), py::arg("weight") = 1.0)
      .def_static(
          "dirac_sum",
          [](int dim, const std::vector<std::pair<Point, double>>& atoms) {
            std::vector<Atom> a;
            for (const auto& [pt, w] : atoms) a.push_back({pt, w});
            return Measure::dirac_sum(dim, std::move(a));
          },
          py::arg("dim"), py::arg("atoms"), "Atoms as (point, weight) pairs.")
      .def_static(
          "radial_density",
          [](int dim, const std::vector<std::tuple<double, double, double, double>>& pieces) {
            std::vector<RadialPiece> rp;
            for (const auto& [c, g, lo, hi] : pieces) rp.push_back({c, g, lo, hi});
            return Measure::radial_density(dim, std::move(rp));
          },
          py::arg("dim"), py::arg("pieces"), "Pieces (coeff, gamma, r_lo, r_hi) of coeff * |x|^gamma.")
      .def_static(
          "ball_cloud",
          [](int dim, const std::vector<std::tuple<Point, double, double>>& balls) {
            std::vector<UniformBall> ub;
            for (const auto& [c, r, w] : balls) ub.push_back({c, r, w});
            return Measure::ball_cloud(dim, std::move(ub));
          },
          py::arg("dim"), py::arg("balls"), "Balls as (center, radius, mass).")
      .def_static("lebesgue_ball", &Measure::lebesgue_ball, py::arg("center"), py::arg("radius"))
      .def_static("sum", &Measure::sum, py::arg("dim"), py::arg("parts"))
      .def_static("parse", &parse_measure_string, py::arg("text"))
      .def_static("read", &read_measure_file, py::arg("path"))
      .def_property_readonly("dim", &Measure::dim)
      .def_property_readonly("total_mass", [](const Measure& mu) { return total_mass(mu); })
      .def("scaled", &Measure::scaled, py::arg("factor"))
      .def("restricted", &Measure::restricted, py::arg("ball"))
      .def("mass", [](const Measure& mu, const Ball& b) { return ball_mass(mu, b); }, py::arg("ball"))
      .def("to_string", &measure_to_string)
      .def("write", [](const Measure& mu, const std::string& path) { write_measure_file(path, mu); }, py::arg("path"));

  py::enum_<Method>(m, "Method").value("exact_piecewise", Method::exact_piecewise).value("quadrature", Method::quadrature);
  py::enum_<Verdict>(m, "Verdict")
      .value("finite", Verdict::finite)
      .value("divergent", Verdict::divergent)
      .value("inapplicable", Verdict::inapplicable);
  py::enum_<FixedPointStatus>(m, "FixedPointStatus")
      .value("converged", FixedPointStatus::converged)
      .value("diverged", FixedPointStatus::diverged)
      .value("max_iter", FixedPointStatus::max_iter);

  py::class_<PotentialEvaluation>(m, "PotentialEvaluation")
      .def_readonly("value", &PotentialEvaluation::value)
      .def_readonly("err_estimate", &PotentialEvaluation::err_estimate)
      .def_readonly("method", &PotentialEvaluation::method)
      .def_readonly("divergence_exponent", &PotentialEvaluation::divergence_exponent)
      .def_property_readonly("divergent", &PotentialEvaluation::divergent);

  m.def(
      "wolff",
      [](const Measure& mu, const Point& x, const SpaceParams& sp, bool force_quadrature, int ppd) {
        return wolff(mu, x, sp, quad(force_quadrature, ppd));
      },
      py::arg("mu"), py::arg("x"), py::arg("sp"), py::arg("force_quadrature") = false,
      py::arg("points_per_decade") = 16);
  m.def(
      "riesz", [](const Measure& mu, const Point& x, double alpha) { return riesz(mu, x, alpha); }, py::arg("mu"),
      py::arg("x"), py::arg("alpha"));
  m.def(
      "frac_maximal", [](const Measure& mu, const Point& x, double alpha) { return frac_maximal(mu, x, alpha); },
      py::arg("mu"), py::arg("x"), py::arg("alpha"));

  py::class_<SamplingPlan>(m, "SamplingPlan")
      .def_readwrite("r_min", &SamplingPlan::r_min)
      .def_readwrite("r_max", &SamplingPlan::r_max)
      .def_readwrite("per_decade", &SamplingPlan::per_decade)
      .def("refined", &SamplingPlan::refined);
  m.def(
      "default_plan", [](const std::vector<Measure>& ms) { return default_plan(ms); }, py::arg("measures"));

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("criterion", &ConditionReport::criterion)
      .def_readonly("sup_constant", &ConditionReport::sup_constant)
      .def_readonly("center", &ConditionReport::center)
      .def_readonly("radius", &ConditionReport::radius)
      .def_readonly("verdict", &ConditionReport::verdict)
      .def_readonly("divergence_exponent", &ConditionReport::divergence_exponent)
      .def_readonly("refined_constant", &ConditionReport::refined_constant)
      .def_readonly("notes", &ConditionReport::notes);
  py::class_<CompositeReport>(m, "CompositeReport")
      .def_readonly("criterion", &CompositeReport::criterion)
      .def_readonly("conditions", &CompositeReport::conditions)
      .def_readonly("verdict", &CompositeReport::verdict)
      .def_readonly("notes", &CompositeReport::notes)
      .def("condition", &CompositeReport::condition, py::arg("id"), py::return_value_policy::copy);

  m.def("ball_capacity", &ball_capacity, py::arg("r"), py::arg("sp"));
  m.def(
      "capacity_condition_const",
      [](const Measure& sigma, const SpaceParams& sp, const SamplingPlan& plan) {
        return capacity_condition_const(sigma, sp, plan);
      },
      py::arg("sigma"), py::arg("sp"), py::arg("plan"));

  py::class_<KappaEstimate>(m, "KappaEstimate")
      .def_readonly("lower", &KappaEstimate::lower)
      .def_readonly("trial_count", &KappaEstimate::trial_count)
      .def_readonly("caveat", &KappaEstimate::caveat);
  m.def(
      "kappa_lower", [](const Measure& s, const Ball& b, const SpaceParams& sp) { return kappa_lower(s, b, sp); },
      py::arg("sigma"), py::arg("ball"), py::arg("sp"));

  py::class_<RadialFunction>(m, "RadialFunction")
      .def_property_readonly("dim", &RadialFunction::dim)
      .def("value", &RadialFunction::value, py::arg("r"))
      .def("gradient", &RadialFunction::gradient, py::arg("r"))
      .def_property_readonly("knots", &RadialFunction::knots)
      .def("__call__", [](const RadialFunction& f, const Point& x) { return f(x); });
  m.def(
      "radial_solve", [](const Measure& mu, const SpaceParams& sp) { return radial_solve(mu, sp); }, py::arg("mu"),
      py::arg("sp"));

  py::class_<FixedPointResult>(m, "FixedPointResult")
      .def_readonly("nodes", &FixedPointResult::nodes)
      .def_readonly("values", &FixedPointResult::values)
      .def_readonly("wolff_mu", &FixedPointResult::wolff_mu)
      .def_readonly("iterations", &FixedPointResult::iterations)
      .def_readonly("residual", &FixedPointResult::residual)
      .def_readonly("posthoc_residual", &FixedPointResult::posthoc_residual)
      .def_readonly("changes", &FixedPointResult::changes)
      .def_readonly("status", &FixedPointResult::status)
      .def_readonly("ratio_to_wolff_mu", &FixedPointResult::ratio_to_wolff_mu);
  m.def(
      "fixed_point_subnatural",
      [](const Measure& s, const Measure& mu, const SpaceParams& sp) { return fixed_point_subnatural(s, mu, sp); },
      py::arg("sigma"), py::arg("mu"), py::arg("sp"));
  m.def(
      "fixed_point_supernatural",
      [](const Measure& s, const Measure& mu, const SpaceParams& sp) { return fixed_point_supernatural(s, mu, sp); },
      py::arg("sigma"), py::arg("mu"), py::arg("sp"));

  py::class_<Lemma52Result>(m, "Lemma52Result")
      .def_readonly("lhs", &Lemma52Result::lhs)
      .def_readonly("rhs", &Lemma52Result::rhs)
      .def_readonly("c_ball", &Lemma52Result::c_ball)
      .def_readonly("ratio", &Lemma52Result::ratio)
      .def_readonly("divergent", &Lemma52Result::divergent);
  m.def(
      "verify_lemma52",
      [](const Measure& s, const Measure& mu, const SpaceParams& sp) { return verify_lemma52(s, mu, sp); },
      py::arg("sigma"), py::arg("mu"), py::arg("sp"));
  m.def(
      "dyadic_wolff",
      [](const Measure& mu, const Point& x, const SpaceParams& sp, int k_min, int k_max, bool modified) {
        CubeMeasure cm = CubeMeasure::from_measure(mu);
        DyadicFamily fam{k_min, k_max, {}, {}};
        DyadicSum s = modified ? modified_dyadic_wolff(cm, x, sp, fam) : dyadic_wolff(cm, x, sp, fam);
        return s.divergent ? kInf : s.value;
      },
      py::arg("mu"), py::arg("x"), py::arg("sp"), py::arg("k_min") = -10, py::arg("k_max") = 10,
      py::arg("modified") = false);
  m.def(
      "finite_intersection_count", [](const Point& x, int k) { return finite_intersection_count(x, k); },
      py::arg("x"), py::arg("k"));

  m.def("morrey_constant",
        [](const Measure& mu, const SpaceParams& sp, const SamplingPlan& plan) { return morrey_constant(mu, sp, plan); },
        py::arg("mu"), py::arg("sp"), py::arg("plan"));
  m.def(
      "thm1_verdict",
      [](const Measure& mu, const SpaceParams& sp, const SamplingPlan& plan) { return thm1_verdict(mu, sp, plan); },
      py::arg("mu"), py::arg("sp"), py::arg("plan"));

  py::class_<NormEstimate>(m, "NormEstimate")
      .def_readonly("value", &NormEstimate::value)
      .def_readonly("by_refinement", &NormEstimate::by_refinement)
      .def_readonly("growth", &NormEstimate::growth)
      .def_readonly("verdict", &NormEstimate::verdict);
  m.def(
      "bmo_norm", [](const RadialFunction& u, const SamplingPlan& plan) { return bmo_norm(u, plan); }, py::arg("u"),
      py::arg("plan"));
  m.def("weak_lq_norm", &weak_lq_norm, py::arg("samples"), py::arg("q"),
        "Samples are (value, cell measure) pairs.");
  m.def("gradient_decay", &gradient_decay, py::arg("u"), py::arg("R"), py::arg("q"));

  py::class_<GridFunction>(m, "GridFunction")
      .def_property_readonly("dim", &GridFunction::dim)
      .def_property_readonly("h", &GridFunction::h)
      .def_property_readonly("per_axis", &GridFunction::per_axis)
      .def_property_readonly("values", [](const GridFunction& g) { return g.values(); })
      .def_readonly("energy_history", &GridFunction::energy_history)
      .def_readonly("converged", &GridFunction::converged)
      .def("__call__", [](const GridFunction& g, const Point& x) { return g(x); });
  m.def(
      "grid_solve",
      [](const Measure& mu, double half_width, double h, const SpaceParams& sp) {
        py::gil_scoped_release unlock;
        return grid_solve(mu, half_width, h, sp);
      },
      py::arg("mu"), py::arg("half_width"), py::arg("h"), py::arg("sp"));
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eclab/cone.hpp"
#include "eclab/errors.hpp"
#include "eclab/euclid.hpp"
#include "eclab/gs_spaces.hpp"
#include "eclab/harness.hpp"
#include "eclab/laplace.hpp"
#include "eclab/models.hpp"
#include "eclab/wick.hpp"

namespace py = pybind11;
using namespace eclab;

namespace {

Norm parse_norm(const std::string& s) {
  if (s == "sup") return Norm::Sup;
  if (s == "euclidean") return Norm::Euclidean;
  throw InvalidInputError("norm must be 'sup' or 'euclidean'");
}

py::dict coefficient_condition(const std::string& spec, int kmax) {
  auto cc = check_coefficient_condition(CoefficientSequence::parse(spec), kmax);
  py::dict d;
  d["ok"] = cc.ok;
  d["A"] = cc.A;
  d["h"] = cc.h;
  d["witness"] = cc.witness ? py::cast(*cc.witness) : py::none();
  d["witness_log_ratio"] = cc.witness_log_ratio;
  return d;
}

py::dict oracle(const std::vector<int>& kappa) {
  py::dict d;
  for (const auto& [K, count] : pairing_oracle(kappa)) d[py::tuple(py::cast(K.entries()))] = count;
  return d;
}

std::string dk_exact(int n, const std::vector<int>& K, const std::string& spec) {
  auto v = coefficient_D_K(MultiIndexK(n, K), CoefficientSequence::parse(spec));
  if (!v.exact) throw UnsupportedError("D_K has no exact value for this index");
  return v.exact->str();
}

py::dict chrono(const std::vector<Vec>& x, int d) {
  auto r = chronological_order(x, d);
  py::dict out;
  out["rotation"] = r.rotation;
  out["permutation"] = r.permutation;
  out["direction"] = r.direction;
  out["min_gap"] = r.min_gap;
  out["min_distance"] = r.min_distance;
  out["ratio"] = r.ratio;
  out["floor"] = r.floor;
  out["above_floor"] = r.above_floor;
  return out;
}

py::tuple wightman(int n, const std::vector<CVec>& zeta, const std::string& model, const std::string& spec, int N) {
  auto w = TwoPointModel::from_registry(model);
  auto r = wightman_eval(n, zeta, w, CoefficientSequence::parse(spec), N);
  return py::make_tuple(r.value, r.tail);
}

std::string run(const std::string& name, const std::map<std::string, std::string>& overrides) {
  harness::Config over;
  for (const auto& [k, v] : overrides) over.set(k, v);
  return harness::run_scenario(name, over).summary().dump();
}

}  // namespace

PYBIND11_MODULE(_eclab, m) {
  m.doc() = "Cone-carried functionals, Wick series and Euclidean checks";

  auto base = py::register_exception<Error>(m, "EclabError", PyExc_RuntimeError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<TubeViolation>(m, "TubeViolation", base.ptr());
  py::register_exception<HypothesisViolated>(m, "HypothesisViolated", base.ptr());
  py::register_exception<harness::UsageError>(m, "UsageError", base.ptr());

  py::class_<Cone>(m, "Cone")
      .def_static("parse", &parse_cone, py::arg("text"))
      .def_property_readonly("dim", &Cone::dim)
      .def("contains", &Cone::contains, py::arg("p"), py::arg("tol") = 1e-9)
      .def(
          "distance", [](const Cone& c, const Vec& p, const std::string& n) { return c.distance(p, parse_norm(n)); },
          py::arg("p"), py::arg("norm") = "sup")
      .def("dual", [](const Cone& c) { return dual_cone(c, PairingForm::euclidean(c.dim())); })
      .def("__repr__", &Cone::describe);

  py::class_<TestFunction>(m, "TestFunction")
      .def_static("parse", [](const std::string& s) { return TestFunction::parse(s); }, py::arg("text"))
      .def_property_readonly("dim", &TestFunction::dim)
      .def("__call__", [](const TestFunction& f, const Vec& x) { return f(x); })
      .def("__repr__", &TestFunction::str);

  m.def("coefficient_D_K", &dk_exact, py::arg("n"), py::arg("K"), py::arg("coefficients"),
        "Exact D_K as a rational string");
  m.def("pairing_oracle", &oracle, py::arg("kappa"));
  m.def("check_coefficient_condition", &coefficient_condition, py::arg("coefficients"), py::arg("kmax") = 64);
  m.def("wightman_eval", &wightman, py::arg("n"), py::arg("zeta"), py::arg("model"), py::arg("coefficients"),
        py::arg("N"), "Truncated n-point function and its tail bound");
  m.def("exponential_closed_form",
        [](const std::vector<CVec>& zeta, const std::string& model, double g) {
          return exponential_closed_form(zeta, TwoPointModel::from_registry(model), g);
        },
        py::arg("zeta"), py::arg("model"), py::arg("g"));
  m.def(
      "lambda_constant",
      [](const std::string& cone, int max_terms, const std::string& norm, int samples) {
        LambdaOptions o;
        o.norm = parse_norm(norm);
        o.samples = samples;
        return lambda_constant(parse_cone(cone), max_terms, o).lambda;
      },
      py::arg("cone"), py::arg("max_terms"), py::arg("norm") = "sup", py::arg("samples") = 20000);
  m.def("example1_integral", &example1_divergence, py::arg("R"), py::arg("tol") = 1e-10);
  m.def("iota", &iota, py::arg("x"), py::arg("d"));
  m.def(
      "check_transform",
      [](const TestFunction& f, int d, int n, const Vec& p) { return check_transform(f, d, n, p); },
      py::arg("f"), py::arg("d"), py::arg("n"), py::arg("p"));
  m.def("chronological_order", &chrono, py::arg("points"), py::arg("d"));
  m.def("chronological_floor", &chronological_floor, py::arg("n"));

  m.def("scenario_names", &harness::scenario_names);
  m.def("default_config", [](const std::string& n) { return harness::find_scenario(n).defaults; }, py::arg("name"));
  m.def("_run_scenario", &run, py::arg("name"), py::arg("overrides"));
}

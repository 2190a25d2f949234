#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "selfaffine/affine_system.hpp"
#include "selfaffine/attractor_geometry.hpp"
#include "selfaffine/cli.hpp"
#include "selfaffine/fractal_measure.hpp"
#include "selfaffine/spectrum.hpp"
#include "selfaffine/transfer_operator.hpp"

namespace py = pybind11;
using namespace selfaffine;

namespace {

std::vector<std::string> strs(const Point& p) {
  std::vector<std::string> out;
  for (const auto& c : p) out.push_back(to_string(c));
  return out;
}

std::vector<std::vector<std::string>> strs(const std::vector<Point>& ps) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : ps) out.push_back(strs(p));
  return out;
}

Point parse_point(const std::vector<std::string>& s) {
  Point p;
  for (const auto& x : s) p.push_back(parse_rational(x));
  return p;
}

py::dict polytope_dict(const Polytope& y) {
  py::dict d;
  d["vertices"] = strs(y.vertices());
  d["affine_dim"] = y.affine_dim();
  d["volume"] = to_string(y.volume());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral analysis of affine self-similar measures";

  py::class_<AffineSystem>(m, "System")
      .def_property_readonly("name", &AffineSystem::name)
      .def_property_readonly("dim", &AffineSystem::dim)
      .def_property_readonly("size", &AffineSystem::size)
      .def_property_readonly("B", [](const AffineSystem& s) { return strs(s.B()); })
      .def_property_readonly("L", [](const AffineSystem& s) { return strs(s.L()); })
      .def("scaled", [](const AffineSystem& s, long r) { return s.scaled(Rational(r)); })
      .def("to_json", &system_to_json)
      .def("__repr__", [](const AffineSystem& s) { return "<System " + s.name() + ">"; });

  m.def("catalog", [] {
    std::vector<std::string> names;
    for (const auto& [n, s] : builtin_catalog()) names.push_back(n);
    return names;
  });
  m.def("system", [](const std::string& name) { return catalog_system(name); }, py::arg("name"));
  m.def("system_from_json", [](const std::string& text) { return parse_system_json(text); }, py::arg("text"));

  m.def("validate", [](const AffineSystem& s) {
    const auto rep = validate_system(s);
    py::dict d;
    for (const auto& c : rep.checks()) d[py::str(c.name)] = c.passed;
    d["passed"] = rep.passed();
    d["hadamard_defect"] = rep.hadamard_defect;
    return d;
  });

  m.def("mu_hat", [](const AffineSystem& s, const std::vector<double>& t) {
    const auto e = mu_hat_adaptive(s, t);
    return py::make_tuple(e.value, e.truncation_depth, e.tail_bound);
  }, py::arg("system"), py::arg("t"));
  m.def("mu2_closed_form", &mu2_closed_form);

  m.def("enumerate_P", [](const AffineSystem& s, int depth) { return strs(enumerate_P(s, depth).lambdas()); },
        py::arg("system"), py::arg("depth"));
  m.def("gram_max_off_diagonal", [](const AffineSystem& s, const std::vector<std::vector<std::string>>& pts) {
    std::vector<Point> p;
    for (const auto& x : pts) p.push_back(parse_point(x));
    const auto g = gram_matrix(s, p);
    return py::make_tuple(g.max_off_diagonal, g.worst_i, g.worst_j);
  });
  m.def("q1", [](const AffineSystem& s, const std::vector<double>& t, int p_depth) {
    const auto r = q1(s, t, p_depth);
    return py::make_tuple(r.partial_sum, r.increment);
  }, py::arg("system"), py::arg("t"), py::arg("p_depth"));

  m.def("lebesgue_Q", &lebesgue_Q);
  m.def("gamma_1d", [](long r) { return gamma_1d(r); });
  m.def("gamma_eiffel", &gamma_eiffel);
  m.def("contractivity", [](const AffineSystem& s) {
    const auto rep = gamma_supnorm(s, rho_hull(s));
    py::dict d;
    d["beta"] = rep.beta;
    d["gamma_sup"] = rep.gamma_sup;
    d["gamma_L1"] = rep.gamma_L1;
    d["gamma_L1_sharp"] = rep.gamma_L1_sharp ? py::object(py::float_(*rep.gamma_L1_sharp)) : py::object(py::none());
    return d;
  });

  m.def("hull", [](const AffineSystem& s) { return polytope_dict(rho_hull(s)); });
  m.def("attractor_points", [](const AffineSystem& s, const std::string& side, int depth) {
    return strs(attractor_points(s, parse_side(side), depth).points);
  }, py::arg("system"), py::arg("side"), py::arg("depth"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}

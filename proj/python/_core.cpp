#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "invobs/errors.hpp"
#include "invobs/examples.hpp"
#include "invobs/scenario.hpp"

namespace py = pybind11;
using namespace invobs;

namespace {

GroupKind parse_kind(const std::string& name) {
  if (name == "SO3") return GroupKind::kSO3;
  if (name == "SE2") return GroupKind::kSE2;
  if (name == "R2") return GroupKind::kR2;
  throw ValidationError("unknown group '" + name + "' (SO3, SE2 or R2)");
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["name"] = s.name;
  d["system"] = s.system;
  d["samples"] = s.samples;
  d["final_xi_norm"] = s.final_xi_norm;
  d["max_xi_norm"] = s.max_xi_norm;
  d["decay_rate"] = s.decay_rate;
  d["permanent"] = s.permanent;
  d["permanence_deviation"] = s.permanence_deviation;
  return d;
}

py::dict result_dict(const RunResult& r) {
  Matrix rows(static_cast<Eigen::Index>(r.record.rows.size()),
              static_cast<Eigen::Index>(r.record.header.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = r.record.rows[i][j];
  py::dict d;
  d["columns"] = r.record.header;
  d["data"] = rows;
  d["summary"] = summary_dict(r.summary);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Invariant observers on Lie groups";

  auto base = py::register_exception<Error>(m, "InvobsError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<GroupMismatch>(m, "GroupMismatch", base.ptr());
  py::register_exception<AtCutLocus>(m, "AtCutLocus", base.ptr());
  py::register_exception<SingularBasis>(m, "SingularBasis", base.ptr());
  py::register_exception<StepRejected>(m, "StepRejected", base.ptr());
  py::register_exception<NotObservable>(m, "NotObservable", base.ptr());

  py::class_<GroupElement>(m, "GroupElement")
      .def_static("identity", [](const std::string& g) { return GroupElement::identity(parse_kind(g)); })
      .def_static("exp", [](const std::string& g, const Vector& xi) { return exp(parse_kind(g), xi); })
      .def_static("from_params",
                  [](const std::string& g, const Vector& p) { return GroupElement::from_params(parse_kind(g), p); })
      .def_property_readonly("group", [](const GroupElement& g) { return std::string(group_name(g.kind())); })
      .def_property_readonly("dim", &GroupElement::dim)
      .def("params", &GroupElement::params, "quaternion (w, x, y, z); (theta, tx, ty); or (tx, ty)")
      .def("matrix", &GroupElement::matrix)
      .def("log", [](const GroupElement& g) { return log(g); })
      .def("inverse", [](const GroupElement& g) { return inverse(g); })
      .def("adjoint", [](const GroupElement& g) { return adjoint(g); })
      .def("__mul__", [](const GroupElement& a, const GroupElement& b) { return compose(a, b); })
      .def("distance", [](const GroupElement& a, const GroupElement& b) { return distance(a, b); })
      .def("__repr__", [](const GroupElement& g) {
        std::ostringstream os;
        os << "GroupElement(" << group_name(g.kind()) << ", " << g.params().transpose() << ")";
        return os.str();
      });

  m.def("bracket", [](const std::string& g, const Vector& a, const Vector& b) {
    return bracket(parse_kind(g), a, b);
  });
  m.def("system_names", &system_names);

  m.def(
      "linearize",
      [](const std::string& system, std::optional<Vector> ubar) {
        const InvariantSystem sys = make_named_system(system);
        const LinearizedPair p = linearize(sys, ubar ? *ubar : default_ubar(system));
        return py::make_tuple(p.A, p.C);
      },
      py::arg("system"), py::arg("ubar") = py::none(), "Linearized error pair (A, C) at u-bar.");
  m.def("observability_rank", &observability_rank, py::arg("A"), py::arg("C"));
  m.def("design_gain_pole", &design_gain_pole, py::arg("A"), py::arg("C"), py::arg("poles"),
        "Lbar with spec(A + Lbar C) equal to the requested poles.");
  m.def(
      "design_gain_adjoint",
      [](const std::string& system, const Vector& k) {
        return design_gain_adjoint(make_named_system(system), k).gain;
      },
      py::arg("system"), py::arg("K"));
  m.def(
      "check_equivariance",
      [](const std::string& system, int samples, std::uint64_t seed) {
        const EquivarianceReport rep = check_equivariance(make_named_system(system), samples, seed);
        py::list out;
        for (const auto& c : rep.checks) out.append(py::make_tuple(c.name, c.max_deviation, c.passed));
        return out;
      },
      py::arg("system"), py::arg("samples") = 200, py::arg("seed") = 1);

  m.def(
      "run_scenario_file", [](const std::string& path) { return result_dict(run_scenario_file(path)); },
      py::arg("path"));
  m.def(
      "run_scenario_text",
      [](const std::string& text) { return result_dict(run_scenario(parse_scenario(text))); },
      py::arg("text"));
}

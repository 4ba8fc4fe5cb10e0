#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fkdv/branch.hpp"
#include "fkdv/diagnostics.hpp"
#include "fkdv/error.hpp"
#include "fkdv/kernel.hpp"
#include "fkdv/spectral.hpp"

namespace py = pybind11;
using namespace fkdv;

namespace {

py::dict report_dict(const DiagnosticsReport& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["pass"] = c.pass;
    d["margin"] = c.margin;
    d["applicable"] = c.applicable;
    d["detail"] = c.detail;
    checks.append(d);
  }
  py::dict d;
  d["checks"] = checks;
  d["all_pass"] = r.all_pass();
  d["crest_exponent"] = r.crest_exponent;
  d["second_derivative_at_crest"] = r.second_derivative_at_crest;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fkdv, m) {
  m.doc() = "Spectral solver and continuation for fractional KdV traveling waves.";

  py::register_exception<Error>(m, "FkdvError", PyExc_RuntimeError);
  // Registered last, so tried first: argument errors surface as ValueError.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidArgument) throw;
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<MultiplierSymbol>(m, "MultiplierSymbol")
      .def(py::init<double, int>(), py::arg("alpha"), py::arg("scale") = 1)
      .def_property_readonly("alpha", &MultiplierSymbol::alpha)
      .def_property_readonly("scale", &MultiplierSymbol::scale)
      .def("rescaled", &MultiplierSymbol::rescaled)
      .def("__call__", [](const MultiplierSymbol& s, double xi) { return s(xi); });

  m.def("kernel_series_tail_bound", &kernel_series_tail_bound, py::arg("symbol"), py::arg("modes"));
  m.def("default_kernel_modes", &default_kernel_modes);
  m.def("eval_kernel", &eval_kernel, py::arg("symbol"), py::arg("x"), py::arg("modes"));
  m.def("sample_kernel", &sample_kernel, py::arg("symbol"), py::arg("intervals"), py::arg("modes"));
  m.def("lambda_constant", &lambda_constant, py::arg("symbol"), py::arg("grid_resolution"),
        py::arg("modes"));
  m.def(
      "certify_kernel_properties",
      [](const MultiplierSymbol& s, int grid, int modes) {
        const auto r = certify_kernel_properties(s, grid, modes);
        py::dict d;
        for (const auto& c : r.checks) d[py::str(c.check)] = py::make_tuple(c.pass, c.margin);
        return d;
      },
      py::arg("symbol"), py::arg("grid_resolution"), py::arg("modes"));

  py::class_<CosineSeries>(m, "CosineSeries")
      .def(py::init<int, int>(), py::arg("k"), py::arg("modes"))
      .def(py::init<int, std::vector<double>>(), py::arg("k"), py::arg("coeffs"))
      .def_property_readonly("k", &CosineSeries::base_wavenumber)
      .def_property_readonly("modes", &CosineSeries::modes)
      .def_property_readonly("coeffs",
                             [](const CosineSeries& c) {
                               return std::vector<double>(c.coeffs().begin(), c.coeffs().end());
                             })
      .def("value_at_zero", &CosineSeries::value_at_zero)
      .def("resized", &CosineSeries::resized)
      .def("__call__", [](const CosineSeries& c, double x) { return eval_series(c, x); });

  py::class_<SteadyState>(m, "SteadyState")
      .def(py::init<CosineSeries, double>(), py::arg("phi"), py::arg("mu"))
      .def_readwrite("phi", &SteadyState::phi)
      .def_readwrite("mu", &SteadyState::mu);

  m.def("apply_L", &apply_L);
  m.def("multiply", &multiply);
  m.def("residual", &residual, py::arg("state"), py::arg("symbol"));
  m.def("jacobian_matrix", &jacobian_matrix, py::arg("state"), py::arg("symbol"));
  m.def("sample_half_period", &sample_half_period, py::arg("phi"), py::arg("intervals"));

  m.def("bifurcation_point", &bifurcation_point, py::arg("symbol"), py::arg("k"));
  m.def("mu2_coefficient", &mu2_coefficient, py::arg("symbol"), py::arg("k"));
  m.def("asymptotic_branch", &asymptotic_branch, py::arg("symbol"), py::arg("k"), py::arg("eps"),
        py::arg("modes") = 8);

  py::class_<ContinuationConfig>(m, "ContinuationConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &ContinuationConfig::alpha)
      .def_readwrite("k", &ContinuationConfig::k)
      .def_readwrite("modes", &ContinuationConfig::modes)
      .def_readwrite("max_modes", &ContinuationConfig::max_modes)
      .def_readwrite("s_start", &ContinuationConfig::s_start)
      .def_readwrite("s_step", &ContinuationConfig::s_step)
      .def_readwrite("newton_tol", &ContinuationConfig::newton_tol)
      .def_readwrite("newton_max_iter", &ContinuationConfig::newton_max_iter)
      .def_readwrite("stop_crest_gap", &ContinuationConfig::stop_crest_gap)
      .def_readwrite("escalate_crest_gap", &ContinuationConfig::escalate_crest_gap)
      .def_readwrite("max_points", &ContinuationConfig::max_points)
      .def_readwrite("direction", &ContinuationConfig::direction)
      .def_readwrite("run_diagnostics", &ContinuationConfig::run_diagnostics)
      .def("validate", &ContinuationConfig::validate);

  py::class_<BranchPoint>(m, "BranchPoint")
      .def_readonly("state", &BranchPoint::state)
      .def_readonly("s", &BranchPoint::s)
      .def_readonly("newton_residual", &BranchPoint::newton_residual)
      .def_readonly("crest_gap", &BranchPoint::crest_gap)
      .def_readonly("iterations", &BranchPoint::iterations)
      .def_readonly("flagged", &BranchPoint::flagged)
      .def_property_readonly("diagnostics", [](const BranchPoint& p) { return report_dict(p.diagnostics); });

  py::class_<BranchRun>(m, "BranchRun")
      .def_readonly("points", &BranchRun::points)
      .def_readonly("lambda_", &BranchRun::lambda)
      .def_property_readonly("stopped_reason", [](const BranchRun& r) { return to_string(r.stopped_reason); });

  m.def("newton_correct", &newton_correct, py::arg("guess"), py::arg("s"), py::arg("symbol"),
        py::arg("config"));
  m.def("continue_branch", &continue_branch, py::arg("symbol"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "extrapolate_highest",
      [](const std::vector<BranchPoint>& tail) { return extrapolate_highest(tail); }, py::arg("tail"));
  m.def(
      "crest_exponent", [](const SteadyState& s) { return crest_exponent(s); }, py::arg("state"));
  m.def("crest_gap", &crest_gap, py::arg("state"), py::arg("grid_factor") = 4);
  m.def(
      "diagnose",
      [](const SteadyState& s, double lambda) { return report_dict(diagnose(s, lambda)); },
      py::arg("state"), py::arg("lambda_"));
}

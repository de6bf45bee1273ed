// Thin Python bindings: configs, the pipeline and the analysis verdicts.
// JSON crosses the boundary as text; the package decodes it.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlwlab/analysis.hpp"
#include "nlwlab/config.hpp"
#include "nlwlab/model.hpp"
#include "nlwlab/pipeline.hpp"

namespace py = pybind11;
using namespace nlwlab;

namespace {

FunctionalSeries to_series(const std::vector<std::pair<double, double>>& pairs) {
  FunctionalSeries s;
  s.label = "python";
  s.pairs = pairs;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "nlwlab core bindings";
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<CoverageError>(m, "CoverageError", PyExc_RuntimeError);

  m.attr("schema_version") = kSchemaVersion;

  m.def("critical_exponent", py::overload_cast<int, double>(&critical_exponent), py::arg("d"), py::arg("p"));
  m.def("scattering_threshold", &scattering_threshold, py::arg("d"));
  m.def("flux_decay_threshold", &flux_decay_threshold, py::arg("d"));
  m.def("energy_critical_power", &energy_critical_power, py::arg("d"));
  m.def(
      "gamma0_window",
      [](int d, double p, const std::string& mode) {
        ModelParams mp;
        mp.d = d;
        mp.p = p;
        const auto w = admissible_gamma0_window(mp, parse_mode(mode));
        return std::make_pair(w.lo, w.hi);
      },
      py::arg("d"), py::arg("p"), py::arg("mode"));

  m.def(
      "parse_config",
      [](const std::string& text) {
        const auto c = parse_config(text);
        validate(c);
        return to_json(c).dump();
      },
      py::arg("text"), "Parsed and validated config as JSON text.");
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"));

  m.def(
      "solve",
      [](const std::string& text, const std::string& out_dir) {
        const auto c = parse_config(text);
        py::gil_scoped_release release;
        return solve(c, out_dir).dump();
      },
      py::arg("config_text"), py::arg("out_dir"));
  m.def(
      "diagnose",
      [](const std::string& dir, const std::string& suite) {
        py::gil_scoped_release release;
        return diagnose(dir, suite).dump();
      },
      py::arg("run_dir"), py::arg("suite") = "full");
  m.def("render_report", &render_report, py::arg("dir"), py::arg("format") = "json");

  m.def(
      "fit_power_law",
      [](const std::vector<std::pair<double, double>>& pairs, double lo, double hi) {
        const auto f = fit_power_law(to_series(pairs), lo, hi);
        return py::dict(py::arg("exponent") = f.exponent, py::arg("intercept") = f.intercept,
                        py::arg("r_squared") = f.r_squared, py::arg("points") = f.points);
      },
      py::arg("pairs"), py::arg("lo"), py::arg("hi"));
  m.def(
      "plateau_check",
      [](const std::vector<std::pair<double, double>>& pairs, double tol) {
        const auto v = plateau_check(to_series(pairs), tol);
        return py::dict(py::arg("pass") = v.pass, py::arg("sup") = v.sup,
                        py::arg("last_increment_ratio") = v.last_increment_ratio);
      },
      py::arg("pairs"), py::arg("tolerance"));
  m.def(
      "convergence_order",
      [](double a, double b, double c) {
        const auto v = convergence_order(a, b, c);
        return std::make_pair(v.order, to_string(v.status));
      },
      py::arg("v_h"), py::arg("v_h2"), py::arg("v_h4"));
}

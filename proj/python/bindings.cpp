#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cqcd/asymptotics.hpp"
#include "cqcd/calibration.hpp"
#include "cqcd/commands.hpp"
#include "cqcd/detectors.hpp"
#include "cqcd/errors.hpp"
#include "cqcd/experiment.hpp"
#include "cqcd/montecarlo.hpp"
#include "cqcd/overshoot.hpp"
#include "cqcd/special_functions.hpp"

namespace py = pybind11;
using namespace cqcd;

namespace {

McConfig make_config(std::uint64_t replications, std::uint64_t seed, std::uint64_t cap, unsigned workers) {
  McConfig cfg;
  cfg.replications = replications;
  cfg.seed = seed;
  cfg.cap = cap;
  cfg.workers = workers;
  return cfg;
}

Hypothesis parse_hyp(const std::string& s) {
  if (s == "pre") return Hypothesis::Pre;
  if (s == "post") return Hypothesis::Post;
  throw DomainError("hypothesis must be \"pre\" or \"post\", got \"" + s + "\"");
}

ChangeModel to_model(const py::handle& obj) {
  if (py::isinstance<GaussianModel>(obj)) return obj.cast<GaussianModel>();
  if (py::isinstance<ExponentialModel>(obj)) return obj.cast<ExponentialModel>();
  throw py::type_error("expected GaussianModel or ExponentialModel");
}

py::dict table_dict(const CommandResult& r) {
  std::ostringstream csv;
  r.table.write(csv);
  py::dict d;
  d["header"] = r.table.header;
  d["rows"] = r.table.rows;
  d["passed"] = r.passed;
  d["csv"] = csv.str();
  return d;
}

}  // namespace

PYBIND11_MODULE(_cqcd, m) {
  m.doc() = "Quickest change detection with covert adversaries";

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  (void)domain;

  // special functions
  m.def("erf", &cqcd::erf, py::arg("x"));
  m.def("erfcx", &erfcx, py::arg("x"));
  m.def(
      "lambert_w",
      [](double z, int branch) {
        if (branch != 0 && branch != -1) throw DomainError("branch must be 0 or -1");
        return lambert_w(branch == 0 ? LambertBranch::Principal : LambertBranch::NegativeBranch, z);
      },
      py::arg("z"), py::arg("branch") = 0);
  m.def("g_mapping", &g_mapping, py::arg("y"));

  // models
  py::class_<GaussianModel>(m, "GaussianModel")
      .def(py::init<double, double>(), py::arg("mu"), py::arg("sigma2"))
      .def_property_readonly("mu", &GaussianModel::mu)
      .def_property_readonly("sigma2", &GaussianModel::sigma2)
      .def("__repr__", [](const GaussianModel& g) {
        return "GaussianModel(mu=" + format_real(g.mu()) + ", sigma2=" + format_real(g.sigma2()) + ")";
      });
  py::class_<ExponentialModel>(m, "ExponentialModel")
      .def(py::init<double, double>(), py::arg("lambda_pre"), py::arg("lambda_post"))
      .def_property_readonly("lambda_pre", &ExponentialModel::lambda_pre)
      .def_property_readonly("lambda_post", &ExponentialModel::lambda_post)
      .def("__repr__", [](const ExponentialModel& e) {
        return "ExponentialModel(lambda_pre=" + format_real(e.lambda_pre()) +
               ", lambda_post=" + format_real(e.lambda_post()) + ")";
      });
  m.def(
      "kl_divergences",
      [](const py::object& obj) {
        const ChangeModel model = to_model(obj);
        const auto kl = kl_divergences(model);
        return py::make_tuple(kl.d_pre_post, kl.d_post_pre);
      },
      py::arg("model"), "(D(q || q_gamma), D(q_gamma || q))");
  m.def("llr", [](const py::object& obj, double x) { return llr(to_model(obj), x); }, py::arg("model"), py::arg("x"));

  // asymptotics
  m.def("h_star_asymptotic", &h_star_asymptotic, py::arg("gamma"), py::arg("d_pre_post"));
  m.def(
      "sprt_error_asymptotes",
      [](double a, double b) {
        const auto e = sprt_error_asymptotes(a, b);
        return py::make_tuple(e.alpha, e.beta);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "sprt_expected_samples",
      [](double d_post_pre, double d_pre_post, double a, double b) {
        const auto e = sprt_expected_samples(d_post_pre, d_pre_post, a, b);
        return py::make_tuple(e.e_post, e.e_pre);
      },
      py::arg("d_post_pre"), py::arg("d_pre_post"), py::arg("a"), py::arg("b"));

  // overshoot
  m.def("delta1", &delta1, py::arg("x"));
  m.def("delta2", &delta2, py::arg("x"));
  m.def("j_mapping", &j_mapping, py::arg("x"), py::arg("theta"));
  m.def("g2_mapping", &g2_mapping, py::arg("x"), py::arg("theta"));
  m.def(
      "overshoot_report",
      [](const py::object& obj, const std::string& hyp) {
        const ChangeModel model = to_model(obj);
        const auto r = overshoot_report(model, parse_hyp(hyp));
        py::dict d;
        d["sup_upper"] = r.sup_upper;
        d["inf_lower"] = r.inf_lower;
        d["method_upper"] = to_string(r.method_upper);
        d["method_lower"] = to_string(r.method_lower);
        return d;
      },
      py::arg("model"), py::arg("hyp") = "pre");

  // detectors and Monte Carlo
  m.def(
      "run_cusum",
      [](const std::vector<double>& llrs, double h) -> py::object {
        const auto alarm = run_cusum(llrs, h);
        if (!alarm) return py::none();
        return py::make_tuple(alarm->stopping_time, alarm->overshoot);
      },
      py::arg("llrs"), py::arg("h"), "(stopping_time, overshoot) or None");

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("mean", &McEstimate::mean)
      .def_readonly("std_error", &McEstimate::std_error)
      .def_readonly("n_effective", &McEstimate::n_effective)
      .def_readonly("n_truncated", &McEstimate::n_truncated)
      .def("__repr__", [](const McEstimate& e) {
        return "McEstimate(mean=" + format_real(e.mean) + ", std_error=" + format_real(e.std_error) + ")";
      });

  m.def(
      "estimate_at2fa",
      [](const py::object& obj, double h, std::uint64_t replications, std::uint64_t seed, std::uint64_t cap,
         unsigned workers) {
        const ChangeModel model = to_model(obj);
        py::gil_scoped_release release;
        return estimate_at2fa(model, h, make_config(replications, seed, cap, workers));
      },
      py::arg("model"), py::arg("h"), py::arg("replications") = 2000, py::arg("seed") = 0,
      py::arg("cap") = 1000000, py::arg("workers") = 1);
  m.def(
      "estimate_add",
      [](const py::object& obj, double h, std::uint64_t replications, std::uint64_t seed, std::uint64_t cap,
         unsigned workers) {
        const ChangeModel model = to_model(obj);
        py::gil_scoped_release release;
        return estimate_add(model, h, make_config(replications, seed, cap, workers));
      },
      py::arg("model"), py::arg("h"), py::arg("replications") = 2000, py::arg("seed") = 0,
      py::arg("cap") = 1000000, py::arg("workers") = 1);
  m.def(
      "estimate_sprt_errors",
      [](const py::object& obj, double a, double b, std::uint64_t replications, std::uint64_t seed,
         unsigned workers) {
        const ChangeModel model = to_model(obj);
        const SprtConfig sprt(a, b);
        py::gil_scoped_release release;
        const auto e = estimate_sprt_errors(model, sprt, make_config(replications, seed, 1000000, workers));
        return std::make_pair(e.alpha, e.beta);
      },
      py::arg("model"), py::arg("a"), py::arg("b"), py::arg("replications") = 2000, py::arg("seed") = 0,
      py::arg("workers") = 1);
  m.def(
      "calibrate_threshold",
      [](const py::object& obj, double gamma, std::uint64_t replications, std::uint64_t seed, std::uint64_t cap,
         unsigned workers, double tol_rel) {
        const ChangeModel model = to_model(obj);
        py::gil_scoped_release release;
        const auto c = calibrate_threshold(model, gamma, make_config(replications, seed, cap, workers), tol_rel);
        return std::make_pair(c.h, c.at2fa);
      },
      py::arg("model"), py::arg("gamma"), py::arg("replications") = 2000, py::arg("seed") = 0,
      py::arg("cap") = 1000000, py::arg("workers") = 1, py::arg("tol_rel") = 0.05);

  // experiments
  m.def("parse_experiment", [](const std::string& text) { return emit_experiment(parse_experiment(text)); },
        py::arg("json_text"), "Validate a config and return its normalized JSON.");
  m.def("predict", [](const std::string& text) { return table_dict(cmd_predict(parse_experiment(text))); },
        py::arg("json_text"));
  m.def("validate", [](const std::string& text) { return table_dict(cmd_validate(parse_experiment(text))); },
        py::arg("json_text"));
  m.def("overshoot", [](const std::string& text) { return table_dict(cmd_overshoot(parse_experiment(text))); },
        py::arg("json_text"));
}

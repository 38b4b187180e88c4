#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "yamabe/config.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/report.hpp"
#include "yamabe/verify.hpp"

namespace py = pybind11;
using namespace yamabe;

namespace {

ExperimentConfig cone_config(int n, int k, const std::vector<double>& tau, bool normalize) {
  ExperimentConfig c;
  c.cone.family = tau.empty() ? "gamma-k" : "tau";
  c.cone.n = n;
  c.cone.k = k;
  c.cone.tau = tau;
  c.functional.normalize = normalize;
  return c;
}

std::string solve_json(const std::string& text) {
  const auto c = parse_config(text);
  if (c.exhaustion) throw ConfigError("config has an exhaustion section; use exhaust()");
  validate(c);
  std::optional<RadialSolution> solved;
  {
    py::gil_scoped_release release;
    solved.emplace(run_solve(c));
  }
  const auto& sol = *solved;
  std::optional<RadialProfile> exact;
  if (c.problem.exact) exact = c.problem.exact->build();
  auto j = solution_summary(sol, exact ? &*exact : nullptr);
  j["r"] = sol.grid.nodes();
  j["u"] = sol.u;
  return j.dump();
}

std::string exhaust_json(const std::string& text) {
  const auto c = parse_config(text);
  if (!c.exhaustion) throw ConfigError("config has no exhaustion section");
  validate(c);
  py::gil_scoped_release release;
  return report_json(run_exhaustion(c)).dump();
}

std::vector<std::tuple<std::string, std::string, bool, std::string>> verify(
    const std::string& suite, std::uint64_t seed, const std::string& fault) {
  std::vector<CheckResult> results;
  {
    py::gil_scoped_release release;
    results = run_suite(suite, {seed, fault});
  }
  std::vector<std::tuple<std::string, std::string, bool, std::string>> out;
  for (const auto& r : results) out.emplace_back(r.suite, r.name, r.pass, r.detail);
  return out;
}

}  // namespace

PYBIND11_MODULE(_yamabe, m) {
  m.doc() = "Radial solver for fully nonlinear Yamabe-type equations";

  m.def(
      "mu_plus",
      [](int n, int k, const std::vector<double>& tau) {
        return yamabe::mu_plus(build_cone(cone_config(n, k, tau, true)));
      },
      py::arg("n"), py::arg("k"), py::arg("tau") = std::vector<double>{});
  m.def(
      "contains",
      [](const std::vector<double>& lambda, int k, const std::vector<double>& tau) {
        const int n = static_cast<int>(lambda.size());
        return to_string(yamabe::contains(build_cone(cone_config(n, k, tau, true)), lambda));
      },
      py::arg("lam"), py::arg("k"), py::arg("tau") = std::vector<double>{});
  m.def(
      "f_eval",
      [](const std::vector<double>& lambda, int k, const std::vector<double>& tau,
         bool normalize) {
        const int n = static_cast<int>(lambda.size());
        return yamabe::f_eval(build_functional(cone_config(n, k, tau, normalize)), lambda);
      },
      py::arg("lam"), py::arg("k"), py::arg("tau") = std::vector<double>{},
      py::arg("normalize") = true);
  m.def("validate_config", [](const std::string& text) { validate(parse_config(text)); },
        py::arg("text"));
  m.def("solve_json", &solve_json, py::arg("text"));
  m.def("exhaust_json", &exhaust_json, py::arg("text"));
  m.def("verify", &verify, py::arg("suite") = "paper", py::arg("seed") = 20240601,
        py::arg("inject_fault") = "");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relay_harvest/experiments.hpp"
#include "relay_harvest/kkt.hpp"
#include "relay_harvest/oracle.hpp"
#include "relay_harvest/rates.hpp"
#include "relay_harvest/scenario_io.hpp"
#include "relay_harvest/solver.hpp"

namespace py = pybind11;
using namespace relay_harvest;

namespace {

Scenario scenario_from_arg(const std::string& scenario_json) {
  return scenario_from_json(scenario_json);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "offline-optimal transmission policies for energy-harvesting two-hop relay networks";

  m.def("link_rate", &link_rate, py::arg("alpha"), py::arg("power"),
        "point-to-point rate ln(1 + alpha p), nats/s");
  m.def(
      "epoch_energy",
      [](double l, double c, double alpha) { return epoch_energy(l, c, alpha).value; },
      py::arg("duration"), py::arg("data"), py::arg("alpha"),
      "energy (J) to move `data` nats in `duration` seconds at gain alpha");
  m.def(
      "broadcast_power",
      [](double c1, double c2, double sr1, double sr2) {
        ChannelGains g{sr1, sr2, 1.0, 1.0};
        return broadcast_power(c1, c2, g);
      },
      py::arg("rate_r1"), py::arg("rate_r2"), py::arg("alpha_sr1"), py::arg("alpha_sr2"));
  m.def(
      "broadcast_split",
      [](double c1, double c2, double sr1, double sr2) {
        ChannelGains g{sr1, sr2, 1.0, 1.0};
        return broadcast_split(c1, c2, g);
      },
      py::arg("rate_r1"), py::arg("rate_r2"), py::arg("alpha_sr1"), py::arg("alpha_sr2"));
  m.def(
      "mac_rate_bounds",
      [](double p1, double p2, double r1d, double r2d) {
        ChannelGains g{1.0, 1.0, r1d, r2d};
        const auto b = mac_rate_bounds(p1, p2, g);
        return py::make_tuple(b.r1_max, b.r2_max, b.sum_max);
      },
      py::arg("p1"), py::arg("p2"), py::arg("alpha_r1d"), py::arg("alpha_r2d"));

  m.def(
      "validate_scenario",
      [](const std::string& scenario_json) { return scenario_to_json(scenario_from_arg(scenario_json)); },
      py::arg("scenario_json"), "canonicalize and check a scenario document");

  m.def(
      "solve",
      [](const std::string& scenario_json, const std::string& modes) {
        Scenario s = scenario_from_arg(scenario_json);
        if (!modes.empty() && s.relay_count == 2) {
          s.mode_set = parse_mode_flag(modes);
          s.validated = false;
          s = validate_scenario(s);
        }
        const Solution sol = solve(s);
        return solution_to_json(sol, s);
      },
      py::arg("scenario_json"), py::arg("modes") = "",
      "solve a scenario; returns the result document (JSON)");

  m.def(
      "verify",
      [](const std::string& result_json) {
        const auto ls = solution_from_json(result_json);
        const auto outcome = verify_solution(ls.solution, ls.scenario, Tolerances::from_env());
        return verify_outcome_to_json(outcome);
      },
      py::arg("result_json"), "run the verification pipeline on a solve result");

  m.def(
      "single_arrival_oracle",
      [](const std::string& scenario_json) { return single_arrival_oracle(scenario_from_arg(scenario_json)); },
      py::arg("scenario_json"));
  m.def(
      "grid_search_throughput",
      [](const std::string& scenario_json, int n) {
        return grid_search_throughput(scenario_from_arg(scenario_json), n);
      },
      py::arg("scenario_json"), py::arg("n"));

  m.def("reproduce_figure", &reproduce_figure, py::arg("id"), py::arg("out_dir"),
        py::arg("jobs") = 1, py::arg("lambda_step") = 0.05,
        "emit the data behind study 3/4/5/6 as CSV files; returns paths");

  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<DomainError>(m, "DomainError");
}

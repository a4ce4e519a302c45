#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relay_harvest/experiments.hpp"
#include "relay_harvest/kkt.hpp"
#include "relay_harvest/scenario_io.hpp"
#include "relay_harvest/solver.hpp"

using namespace relay_harvest;

namespace {

int cmd_solve(const std::string& scenario_path, const std::string& modes,
              const std::string& output, bool bits) {
  Scenario s;
  try {
    s = scenario_from_json(read_file(scenario_path));
    if (!modes.empty()) {
      if (s.relay_count != 2) {
        std::fprintf(stderr, "warning: --modes ignored for a single-relay scenario\n");
      } else {
        s.mode_set = parse_mode_flag(modes);
        s.validated = false;
        s = validate_scenario(s);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const Solution sol = solve(s);
  const std::string text = solution_to_json(sol, s);
  if (output.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_file(output, text);
  }
  std::fprintf(stderr, "throughput: %s nats", fmt12(sol.throughput).c_str());
  if (bits) std::fprintf(stderr, " (%s bits)", fmt12(sol.throughput / std::log(2.0)).c_str());
  std::fprintf(stderr, " [%s, %d newton iterations, %.1f ms]\n",
               solve_status_name(sol.status), sol.diagnostics.newton_iterations,
               sol.diagnostics.wall_time_ms);
  return sol.status == SolveStatus::Stalled ? 2 : 0;
}

int cmd_verify(const std::string& result_path, const std::string& output) {
  LoadedSolution ls;
  try {
    ls = solution_from_json(read_file(result_path));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const auto tol = Tolerances::from_env();
  const auto outcome = verify_solution(ls.solution, ls.scenario, tol);
  const std::string text = verify_outcome_to_json(outcome);
  if (output.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_file(output, text);
  }
  if (!outcome.pass()) {
    std::fprintf(stderr, "verification failed\n");
    return 3;
  }
  return 0;
}

SweepSpec sweep_spec_from_json(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  SweepSpec spec;
  if (j.contains("base_path")) {
    spec.base = scenario_from_json(read_file(j["base_path"].get<std::string>()));
  } else if (j.contains("base")) {
    spec.base = scenario_from_json(j["base"].dump());
  } else {
    throw SchemaError("sweep spec requires base or base_path");
  }
  const auto& p = j.at("param");
  if (p.is_string()) {
    const std::string name = p.get<std::string>();
    if (name == "lambda") {
      spec.param = LambdaParam{};
    } else if (name == "bmax") {
      spec.param = BmaxParam{};
    } else {
      throw SchemaError("param must be lambda, bmax, or an arrival object");
    }
  } else {
    const auto& a = p.at("arrival");
    spec.param = ArrivalParam{a.at("node").get<std::string>(), a.at("epoch").get<int>()};
  }
  for (const auto& v : j.at("values")) {
    if (v.is_string() && v.get<std::string>() == "inf") {
      spec.values.push_back(kInf);
    } else {
      spec.values.push_back(v.get<double>());
    }
  }
  for (const auto& ms : j.at("mode_sets")) {
    spec.mode_sets.push_back(mode_set_from_tokens(ms.get<std::vector<std::string>>()));
  }
  if (spec.mode_sets.empty()) spec.mode_sets.push_back(spec.base.mode_set);
  spec.output = j.value("output", "");
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offline-optimal transmission policies for energy-harvesting two-hop networks"};
  app.require_subcommand(1);

  std::string scenario_path, modes, output;
  bool bits = false;
  auto* solve_cmd = app.add_subcommand("solve", "solve a scenario file");
  solve_cmd->add_option("scenario", scenario_path, "scenario JSON path")->required();
  solve_cmd->add_option("--modes", modes, "two-relay mode set: sr, bc+sr, mac+sr, all");
  solve_cmd->add_option("-o,--output", output, "result JSON path (default stdout)");
  solve_cmd->add_flag("--bits", bits, "also report throughput in bits");

  std::string result_path, report_path;
  auto* verify_cmd = app.add_subcommand("verify", "verify a solve result");
  verify_cmd->add_option("result", result_path, "result JSON path")->required();
  verify_cmd->add_option("-o,--output", report_path, "report JSON path (default stdout)");

  std::string spec_path;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("spec", spec_path, "sweep spec JSON path")->required();
  sweep_cmd->add_option("-j,--jobs", jobs, "parallel rows");

  int fig_id = 0;
  std::string out_dir = ".";
  int fig_jobs = 1;
  double lambda_step = 0.05;
  auto* fig_cmd = app.add_subcommand("figure", "reproduce a study as CSV data");
  fig_cmd->add_option("id", fig_id, "study id: 3, 4, 5, or 6")->required();
  fig_cmd->add_option("-d,--out-dir", out_dir, "output directory");
  fig_cmd->add_option("-j,--jobs", fig_jobs, "parallel rows");
  fig_cmd->add_option("--lambda-step", lambda_step, "energy-split grid step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(scenario_path, modes, output, bits);
    if (*verify_cmd) return cmd_verify(result_path, report_path);
    if (*sweep_cmd) {
      const auto spec = sweep_spec_from_json(read_file(spec_path));
      const auto res = run_sweep(spec, jobs);
      if (spec.output.empty()) std::fputs(res.csv().c_str(), stdout);
      return 0;
    }
    if (*fig_cmd) {
      const auto files = reproduce_figure(fig_id, out_dir, fig_jobs, lambda_step);
      for (const auto& f : files) std::fprintf(stderr, "wrote %s\n", f.c_str());
      return 0;
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", validation_code_name(e.code()), e.what());
    return 1;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "relay_harvest/model.hpp"
#include "relay_harvest/solver.hpp"

namespace relay_harvest {

struct LambdaParam {};          // relay energy split: Er1 = l*Er, Er2 = (1-l)*Er
struct BmaxParam {};
struct ArrivalParam {
  std::string node;  // "s" | "r1" | "r2"
  int epoch = 0;     // zero-based
};
using SweepParam = std::variant<LambdaParam, BmaxParam, ArrivalParam>;

struct SweepSpec {
  Scenario base;
  SweepParam param;
  std::vector<double> values;
  std::vector<ModeSet> mode_sets;
  std::string output;  // CSV path; empty = caller handles the text
};

struct SweepRow {
  double value = 0.0;
  std::string mode_set;
  double throughput_nats = 0.0;
  double residual_s = 0.0;
  double residual_r1 = 0.0;
  double residual_r2 = 0.0;
  std::string status;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv() const;
};

/// One row per (value, mode_set), deterministic order; solver failures are
/// recorded in the status column, never aborting the sweep.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

/// Applies a sweep value to the base scenario (validated result).
Scenario apply_sweep_value(const Scenario& base, const SweepParam& param, double value);

/// Emits the data behind the named study as CSV files under out_dir.
/// Returns the paths written.
std::vector<std::string> reproduce_figure(int id, const std::string& out_dir, int jobs = 1,
                                          double lambda_step = 0.05);

Scenario fig3_scenario(bool battery_run, double lambda);
Scenario fig3_single_relay(bool battery_run, bool r1_only);
Scenario fig5_scenario(double e_r22);
Scenario fig6_scenario(double e_s1);

}  // namespace relay_harvest

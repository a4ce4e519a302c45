#pragma once

namespace relay_harvest {

/// Verification tolerances. The RELAY_HARVEST_TOL environment variable, when
/// set to a positive number, multiplies state/jump/dual uniformly.
struct Tolerances {
  double state = 1e-6;       // scaled battery/buffer emptiness threshold
  double jump = 1e-5;        // scaled power-jump threshold
  double dual = 1e-6;        // multiplier activity threshold
  double feas = 1e-8;        // scaled policy feasibility
  double opt = 1e-6;         // relative optimality comparisons
  double kkt_power_dev = 1e-4;
  double schedule = 1e-7;    // trace verification

  static Tolerances from_env();
};

}  // namespace relay_harvest

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "relay_harvest/model.hpp"
#include "relay_harvest/program.hpp"

namespace relay_harvest {

enum class SolveStatus { Certified, Stalled, Degenerate };

const char* solve_status_name(SolveStatus s);

struct SolverDiagnostics {
  int newton_iterations = 0;
  double kkt_residual = 0.0;   // max of scaled primal/stationarity/complementarity
  double duality_gap_bound = 0.0;
  std::vector<double> barrier_path;
  double wall_time_ms = 0.0;   // not serialized; outputs stay byte-stable
};

using Policy = std::variant<SingleRelayPolicy, TwoRelayPolicy>;

struct Solution {
  Policy policy;
  double throughput = 0.0;  // nats
  DualVariables duals;
  SolverDiagnostics diagnostics;
  SolveStatus status = SolveStatus::Certified;
};

/// Per-epoch transmit powers recovered from a policy; disengaged optional =
/// the mode is inactive in that epoch.
struct PowerProfile {
  std::vector<std::optional<double>> p_s, p_r;                        // single relay
  std::vector<std::optional<double>> p_b, eta, p_sI, p_sII;           // two relay
  std::vector<std::optional<double>> p_r1II, p_r2I, p_r1m, p_r2m;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconsistentPolicy : public SolverError {
 public:
  using SolverError::SolverError;
};

Solution solve_single_relay(const Scenario& s);
Solution solve_two_relay(const Scenario& s);

/// Dispatch on relay_count.
Solution solve(const Scenario& s);

PowerProfile recover_powers(const Solution& sol, const Scenario& s);

/// Objective recomputed from the policy (total data delivered to D, nats).
double policy_throughput(const Policy& p);

/// Max scaled violation of the policy against the scenario's constraint set.
double policy_feasibility_violation(const Policy& p, const Scenario& s);

/// Consumed energy per node over the horizon, from the policy.
struct ConsumedEnergy {
  double s = 0.0, r1 = 0.0, r2 = 0.0;
};
ConsumedEnergy consumed_energy(const Policy& p, const Scenario& s);

namespace detail {
// Assembled program plus the bookkeeping needed to map solutions and duals
// back to policy/epoch space. Exposed for the kkt module and tests.
struct AssembledProgram {
  Program prog;
  Eigen::VectorXd x0;
  std::vector<int> var_of_full;  // full-layout index -> compressed index or -1
  int full_n = 0;
  int epochs = 0;
  bool degenerate = false;  // nothing to optimize (all throughput vars pinned)
};
AssembledProgram assemble_single(const Scenario& s);
AssembledProgram assemble_two(const Scenario& s);
// Full-layout variable slots.
enum SingleVar { SV_LS = 0, SV_LR, SV_CS, SV_CR, SV_COUNT };
enum TwoVar {
  TV_LB = 0, TV_LI, TV_LII, TV_LM,
  TV_CBR1, TV_CBR2, TV_CSI, TV_CSII,
  TV_CR1II, TV_CR2I, TV_CR1M, TV_CR2M,
  TV_ER1M, TV_ER2M, TV_COUNT
};
}  // namespace detail

}  // namespace relay_harvest

#pragma once

#include <string>

#include "relay_harvest/kkt.hpp"
#include "relay_harvest/model.hpp"
#include "relay_harvest/scheduler.hpp"
#include "relay_harvest/solver.hpp"

namespace relay_harvest {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Round to 12 significant digits; all serialized numerics go through this
/// so repeated runs are byte-identical and fixtures stay reviewable.
double round12(double v);
std::string fmt12(double v);

/// Scenario document: {gains:{sr1,sr2,r1d,r2d}, epochs:[{tau,Es,Er1,Er2}],
/// Bmax: number|"inf", relays: 1|2, modes:[...]}. Unknown fields rejected.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

/// Mode tokens: "sr_i", "sr_ii", "bc", "mac". The CLI shorthand accepts
/// "sr", "bc+sr", "mac+sr", "all".
ModeSet mode_set_from_tokens(const std::vector<std::string>& tokens);
std::vector<std::string> mode_set_tokens(ModeSet m);
ModeSet parse_mode_flag(const std::string& flag);
std::string mode_set_label(ModeSet m);  // "sr" | "bc+sr" | "mac+sr" | "all"

std::string solution_to_json(const Solution& sol, const Scenario& s);
struct LoadedSolution {
  Solution solution;
  Scenario scenario;
};
LoadedSolution solution_from_json(const std::string& text);

struct VerifyOutcome {
  bool objective_consistent = false;
  double objective_error = 0.0;
  double feasibility_violation = 0.0;
  PropertyReport properties;
  KktResidualSummary kkt;
  bool schedule_ok = false;
  double delivered_error = 0.0;
  double dummy_nats = 0.0;
  std::string schedule_error;
  bool pass() const;
};

/// Full verification pipeline: state classification, lemma checks, dual
/// power reconstruction, schedule round-trip.
VerifyOutcome verify_solution(const Solution& sol, const Scenario& s, const Tolerances& tol);
std::string verify_outcome_to_json(const VerifyOutcome& v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace relay_harvest

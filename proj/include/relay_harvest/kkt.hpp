#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relay_harvest/model.hpp"
#include "relay_harvest/solver.hpp"
#include "relay_harvest/tolerances.hpp"

namespace relay_harvest {

/// Battery/buffer activity at one epoch boundary t_i, with the underlying
/// slack values. Primal-slack and dual-multiplier readings are both kept;
/// lemma checks accept either.
struct BoundaryState {
  bool battery_empty_s = false;
  bool battery_empty_r1 = false;
  bool battery_empty_r2 = false;
  bool buffer_empty_r1 = false;
  bool buffer_full_r1 = false;
  bool buffer_empty_r2 = false;
  bool buffer_full_r2 = false;
  double slack_battery_s = 0.0;
  double slack_battery_r1 = 0.0;
  double slack_battery_r2 = 0.0;
  double slack_buffer_lo_r1 = 0.0;  // buffer level (empty side)
  double slack_buffer_hi_r1 = 0.0;  // Bmax - level (full side)
  double slack_buffer_lo_r2 = 0.0;
  double slack_buffer_hi_r2 = 0.0;
  // flags where primal-slack and dual readings disagree, by name
  std::vector<std::string> disagreements;
};

struct StateFlags {
  std::vector<BoundaryState> at;  // index i = boundary after epoch i
};

struct LemmaViolation {
  int epoch = 0;              // jump between epoch and epoch+1, or boundary index
  double observed_jump = 0.0;
  std::string missing_flags;
  double slack1 = 0.0, slack2 = 0.0;
  bool degenerate_ambiguous = false;
};

struct LemmaReport {
  std::string lemma;
  bool applicable = false;
  std::vector<LemmaViolation> violations;  // non-degenerate ones
  int degenerate_ambiguous = 0;
  bool pass() const { return violations.empty(); }
};

struct PropertyReport {
  std::vector<LemmaReport> lemmas;
  bool pass() const {
    for (const auto& l : lemmas) {
      if (l.applicable && !l.pass()) return false;
    }
    return true;
  }
};

struct KktResidualSummary {
  double max_relative_deviation = 0.0;  // closed-form vs primal powers
  int compared = 0;
  int excluded = 0;  // zero-duration or unidentifiable-denominator epochs
};

class MissingDuals : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

StateFlags classify_states(const Solution& sol, const Scenario& s, const Tolerances& tol = {});

PropertyReport check_structural_properties(const Solution& sol, const Scenario& s,
                                           const StateFlags& flags, const Tolerances& tol = {});

/// Reconstructs optimal powers from the dual multipliers via the closed-form
/// expressions and reports the worst relative deviation from the primal
/// power recovery.
KktResidualSummary kkt_residuals(const Solution& sol, const Scenario& s,
                                 const Tolerances& tol = {});

}  // namespace relay_harvest

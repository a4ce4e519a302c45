#pragma once

#include <string>
#include <vector>

#include "relay_harvest/model.hpp"
#include "relay_harvest/solver.hpp"

namespace relay_harvest {

enum class SegmentMode { SourceToRelay, RelayToDest, Broadcast, MultiAccess, SuccessiveI, SuccessiveII };

const char* segment_mode_name(SegmentMode m);

/// One constant-power transmission interval. Rates are instantaneous
/// (nats/s); dummy_* is the portion of a drain transmitted as junk because
/// the buffer stock was short (the epsilon bootstrap device). Dummy nats are
/// delivered to D but never dequeued from a buffer.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  SegmentMode mode{};
  double p_source = 0.0;   // S power (S->R, BC, SR phases)
  double p_relay1 = 0.0;   // R/R1 power when transmitting
  double p_relay2 = 0.0;
  double rate_in1 = 0.0;   // into B_r1 (or the single relay buffer)
  double rate_in2 = 0.0;
  double rate_out1 = 0.0;  // out of B_r1 toward D
  double rate_out2 = 0.0;
  double eta = 0.0;        // BC power split toward R1
  double dummy_r1 = 0.0;   // junk nats on the R1->D stream in this segment
  double dummy_r2 = 0.0;
};

struct Schedule {
  std::vector<Segment> segments;
  double dummy_total = 0.0;  // realized epsilon, nats
};

class Unschedulable : public std::runtime_error {
 public:
  Unschedulable(const std::string& what, double when)
      : std::runtime_error(what), instant(when) {}
  double instant;
};

struct Traces {
  std::vector<double> time;
  std::vector<double> battery_s, battery_r1, battery_r2;
  std::vector<double> buffer_r1, buffer_r2;
  std::vector<double> delivered;
};

struct TraceViolation {
  double time = 0.0;
  std::string what;
  double amount = 0.0;
};

struct FeasibilityReport {
  std::vector<TraceViolation> violations;
  double delivered = 0.0;
  double max_buffer_r1 = 0.0;
  double max_buffer_r2 = 0.0;
  bool pass() const { return violations.empty(); }
};

Schedule build_schedule(const Policy& policy, const Scenario& s);

Traces simulate_schedule(const Schedule& sch, const Scenario& s, double dt);

/// Checks energy causality, buffer bounds, and (when expected_delivered is
/// provided) total delivered data against the policy objective.
FeasibilityReport verify_traces(const Traces& tr, const Scenario& s, double tol,
                                double expected_delivered = -1.0);

std::string traces_to_csv(const Traces& tr);

}  // namespace relay_harvest

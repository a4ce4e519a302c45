#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace relay_harvest {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Mode : uint8_t { Broadcast = 0, MultiAccess = 1, SuccessiveI = 2, SuccessiveII = 3 };

/// Set of two-relay transmission modes, stored as a 4-bit mask.
class ModeSet {
 public:
  ModeSet() = default;
  static ModeSet sr() { return ModeSet{}.with(Mode::SuccessiveI).with(Mode::SuccessiveII); }
  static ModeSet all() { return sr().with(Mode::Broadcast).with(Mode::MultiAccess); }
  ModeSet with(Mode m) const {
    ModeSet s = *this;
    s.bits_ |= uint8_t(1u << unsigned(m));
    return s;
  }
  bool contains(Mode m) const { return bits_ & (1u << unsigned(m)); }
  bool operator==(const ModeSet&) const = default;
  uint8_t bits() const { return bits_; }

 private:
  uint8_t bits_ = 0;
};

/// Linear-scale power gains. Two-relay instances are canonicalized so that
/// sr1 >= sr2; the single-relay view reads the sr1/r1d slots.
struct ChannelGains {
  double sr1 = 1.0;
  double sr2 = 1.0;
  double r1d = 1.0;
  double r2d = 1.0;

  double sr() const { return sr1; }
  double rd() const { return r1d; }
};

/// Merged energy-arrival timeline: K epochs, arrivals at epoch starts.
/// Nodes with no arrival at an instant carry a zero entry.
struct EnergyProfile {
  std::vector<double> epoch_durations;  // tau_i, seconds
  std::vector<double> arrivals_s;       // Joules
  std::vector<double> arrivals_r1;
  std::vector<double> arrivals_r2;

  int epoch_count() const { return int(epoch_durations.size()); }
  double deadline() const {
    double t = 0;
    for (double tau : epoch_durations) t += tau;
    return t;
  }
};

struct Scenario {
  ChannelGains gains;
  EnergyProfile profile;
  double buffer_capacity = kInf;  // B_max, nats; +inf disables capacity rows
  int relay_count = 1;
  ModeSet mode_set = ModeSet::all();  // ignored when relay_count == 1
  bool validated = false;
  bool relays_relabeled = false;  // set when canonicalization swapped labels
};

enum class ValidationCode {
  NonPositiveDuration,
  NegativeEnergy,
  GainNotPositive,
  LengthMismatch,
  EmptyModeSet,
  BadRelayCount,
  NegativeBuffer,
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ValidationCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ValidationCode code() const { return code_; }

 private:
  ValidationCode code_;
};

const char* validation_code_name(ValidationCode c);

/// Canonicalizes and checks a scenario: relays relabeled so sr1 >= sr2,
/// arrival lists zero-padded to K entries, invariants enforced.
/// Idempotent; throws ValidationError on rejection.
Scenario validate_scenario(Scenario raw);

struct SingleRelayPolicy {
  std::vector<double> l_s, l_r;  // seconds
  std::vector<double> c_s, c_r;  // nats
  int epoch_count() const { return int(l_s.size()); }
};

struct TwoRelayPolicy {
  std::vector<double> l_b, l_I, l_II, l_m;                      // seconds
  std::vector<double> c_br1, c_br2, c_sI, c_sII;                // nats
  std::vector<double> c_r1II, c_r2I, c_r1m, c_r2m;              // nats
  std::vector<double> e_r1m, e_r2m;                             // Joules
  int epoch_count() const { return int(l_I.size()); }
};

/// Multipliers grouped by constraint family; empty vector = family absent
/// from the solved program. Indexed by epoch.
struct DualVariables {
  std::vector<double> energy_s;   // prefix energy causality at S
  std::vector<double> energy_r1;  // at R1 (the relay, for single-relay)
  std::vector<double> energy_r2;
  std::vector<double> data_r1;    // data causality per buffer
  std::vector<double> data_r2;
  std::vector<double> buffer_r1;  // capacity per buffer
  std::vector<double> buffer_r2;
  std::vector<double> half_duplex;
  std::vector<double> mac_r1, mac_r2, mac_sum;  // per-epoch MAC region rows
};

}  // namespace relay_harvest

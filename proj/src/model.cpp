#include "relay_harvest/model.hpp"

#include <algorithm>
#include <utility>

namespace relay_harvest {

const char* validation_code_name(ValidationCode c) {
  switch (c) {
    case ValidationCode::NonPositiveDuration: return "NonPositiveDuration";
    case ValidationCode::NegativeEnergy: return "NegativeEnergy";
    case ValidationCode::GainNotPositive: return "GainNotPositive";
    case ValidationCode::LengthMismatch: return "LengthMismatch";
    case ValidationCode::EmptyModeSet: return "EmptyModeSet";
    case ValidationCode::BadRelayCount: return "BadRelayCount";
    case ValidationCode::NegativeBuffer: return "NegativeBuffer";
  }
  return "?";
}

namespace {

void check_gain(double g, const char* name) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw ValidationError(ValidationCode::GainNotPositive,
                          std::string("gain ") + name + " must be positive and finite");
  }
}

void pad_or_reject(std::vector<double>& v, size_t k, const char* name) {
  if (v.size() > k) {
    throw ValidationError(ValidationCode::LengthMismatch,
                          std::string(name) + " has more entries than epochs");
  }
  v.resize(k, 0.0);
}

void check_energies(const std::vector<double>& v, const char* name) {
  for (double e : v) {
    if (e < 0.0 || !std::isfinite(e)) {
      throw ValidationError(ValidationCode::NegativeEnergy,
                            std::string(name) + " contains a negative or non-finite energy");
    }
  }
}

}  // namespace

Scenario validate_scenario(Scenario s) {
  if (s.relay_count != 1 && s.relay_count != 2) {
    throw ValidationError(ValidationCode::BadRelayCount, "relay_count must be 1 or 2");
  }
  const size_t k = s.profile.epoch_durations.size();
  if (k == 0) {
    throw ValidationError(ValidationCode::NonPositiveDuration, "at least one epoch required");
  }
  for (double tau : s.profile.epoch_durations) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw ValidationError(ValidationCode::NonPositiveDuration,
                            "epoch durations must be positive and finite");
    }
  }
  pad_or_reject(s.profile.arrivals_s, k, "arrivals_s");
  pad_or_reject(s.profile.arrivals_r1, k, "arrivals_r1");
  pad_or_reject(s.profile.arrivals_r2, k, "arrivals_r2");
  check_energies(s.profile.arrivals_s, "arrivals_s");
  check_energies(s.profile.arrivals_r1, "arrivals_r1");
  check_energies(s.profile.arrivals_r2, "arrivals_r2");
  if (std::isnan(s.buffer_capacity) || s.buffer_capacity < 0.0) {
    throw ValidationError(ValidationCode::NegativeBuffer, "Bmax must be >= 0 or inf");
  }
  check_gain(s.gains.sr1, "sr1");
  check_gain(s.gains.r1d, "r1d");
  if (s.relay_count == 2) {
    check_gain(s.gains.sr2, "sr2");
    check_gain(s.gains.r2d, "r2d");
    if (!s.mode_set.contains(Mode::SuccessiveI) || !s.mode_set.contains(Mode::SuccessiveII)) {
      throw ValidationError(
          ValidationCode::EmptyModeSet,
          "two-relay mode set must contain both successive relaying phases");
    }
    if (s.gains.sr1 < s.gains.sr2) {
      std::swap(s.gains.sr1, s.gains.sr2);
      std::swap(s.gains.r1d, s.gains.r2d);
      std::swap(s.profile.arrivals_r1, s.profile.arrivals_r2);
      s.relays_relabeled = !s.relays_relabeled;
    }
  }
  s.validated = true;
  return s;
}

}  // namespace relay_harvest

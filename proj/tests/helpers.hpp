#pragma once

#include <random>

#include "relay_harvest/model.hpp"

namespace relay_harvest::testing {

inline double log_uniform(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline Scenario random_single(std::mt19937& rng, int max_k = 6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scenario s;
  s.relay_count = 1;
  const int k = 1 + int(u(rng) * max_k) % max_k;
  for (int i = 0; i < k; ++i) {
    s.profile.epoch_durations.push_back(0.3 + 1.7 * u(rng));
    s.profile.arrivals_s.push_back(log_uniform(rng, 0.01, 10.0));
    s.profile.arrivals_r1.push_back(log_uniform(rng, 0.01, 10.0));
  }
  s.gains.sr1 = log_uniform(rng, 0.25, 8.0);
  s.gains.r1d = log_uniform(rng, 0.25, 8.0);
  const double choices[3] = {0.25, 1.0, kInf};
  s.buffer_capacity = choices[int(u(rng) * 3) % 3];
  return validate_scenario(s);
}

inline Scenario random_two(std::mt19937& rng, int max_k = 6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scenario s;
  s.relay_count = 2;
  const int k = 1 + int(u(rng) * max_k) % max_k;
  for (int i = 0; i < k; ++i) {
    s.profile.epoch_durations.push_back(0.3 + 1.7 * u(rng));
    s.profile.arrivals_s.push_back(log_uniform(rng, 0.01, 10.0));
    s.profile.arrivals_r1.push_back(log_uniform(rng, 0.01, 10.0));
    s.profile.arrivals_r2.push_back(log_uniform(rng, 0.01, 10.0));
  }
  s.gains.sr1 = log_uniform(rng, 0.25, 8.0);
  s.gains.sr2 = log_uniform(rng, 0.25, 8.0);
  s.gains.r1d = log_uniform(rng, 0.25, 8.0);
  s.gains.r2d = log_uniform(rng, 0.25, 8.0);
  const double choices[3] = {0.25, 1.0, kInf};
  s.buffer_capacity = choices[int(u(rng) * 3) % 3];
  const int pick = int(u(rng) * 4) % 4;
  s.mode_set = pick == 0   ? ModeSet::sr()
               : pick == 1 ? ModeSet::sr().with(Mode::Broadcast)
               : pick == 2 ? ModeSet::sr().with(Mode::MultiAccess)
                           : ModeSet::all();
  return validate_scenario(s);
}

}  // namespace relay_harvest::testing

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "relay_harvest/oracle.hpp"
#include "relay_harvest/solver.hpp"

using namespace relay_harvest;

namespace {

Scenario single_k1(double T, double es, double er, double a_sr, double a_rd,
                   double bmax = kInf) {
  Scenario s;
  s.relay_count = 1;
  s.gains = {a_sr, 1.0, a_rd, 1.0};
  s.profile.epoch_durations = {T};
  s.profile.arrivals_s = {es};
  s.profile.arrivals_r1 = {er};
  s.buffer_capacity = bmax;
  return validate_scenario(s);
}

}  // namespace

TEST_CASE("single arrival oracle") {
  CHECK(single_arrival_oracle(single_k1(2, 1, 1, 1, 1)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(single_arrival_oracle(single_k1(2, 0, 1, 1, 1)) == 0.0);
  CHECK(single_arrival_oracle(single_k1(10, 10, 11.9, 4, 1)) ==
        doctest::Approx(7.120992104962).epsilon(1e-9));
  CHECK_THROWS_AS(single_arrival_oracle(single_k1(2, 1, 1, 1, 1, 1.0)), PreconditionViolated);
  Scenario two;
  two.relay_count = 2;
  two.gains = {2, 1, 1, 1};
  two.profile.epoch_durations = {1.0};
  two.profile.arrivals_s = {1.0};
  two = validate_scenario(two);
  CHECK_THROWS_AS(single_arrival_oracle(two), PreconditionViolated);
}

TEST_CASE("grid search brackets the symmetric optimum") {
  auto s = single_k1(2, 1, 1, 1, 1);
  const double v = grid_search_throughput(s, 200);
  CHECK(v >= 0.6930);
  CHECK(v <= std::log(2.0) + 1e-12);
}

TEST_CASE("grid search on zero energy gives zero") {
  auto s = single_k1(2, 0, 0, 1, 1);
  CHECK(grid_search_throughput(s, 50) == 0.0);
}

TEST_CASE("oracle convergence: doubling n never decreases the bound") {
  std::mt19937 rng(77);
  for (int t = 0; t < 5; ++t) {
    auto s = testing::random_single(rng, 2);
    for (int n : {50, 100, 200}) {
      const double a = grid_search_throughput(s, n);
      const double b = grid_search_throughput(s, 2 * n);
      CHECK(b >= a - 1e-9);
    }
  }
}

TEST_CASE("oracle dominance and K=2 equivalence vs the solver") {
  std::mt19937 rng(123);
  for (int t = 0; t < 8; ++t) {
    auto s = testing::random_single(rng, 2);
    const auto sol = solve_single_relay(s);
    const double g = grid_search_throughput(s, 400);
    // never lose to brute force (at the solver's certified tolerance)
    CHECK(sol.throughput >= g - 1e-6 * (1.0 + sol.throughput));
    CHECK(std::abs(sol.throughput - g) <= 1e-3 * std::max(1.0, sol.throughput));
  }
}

TEST_CASE("two-relay SR-only K=1 grid matches the solver") {
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int t = 0; t < 5; ++t) {
    Scenario s;
    s.relay_count = 2;
    s.gains = {2.0 + u(rng), 1.0, u(rng), u(rng)};
    s.profile.epoch_durations = {1.0 + u(rng)};
    s.profile.arrivals_s = {u(rng)};
    s.profile.arrivals_r1 = {u(rng)};
    s.profile.arrivals_r2 = {u(rng)};
    s.mode_set = ModeSet::sr();
    s = validate_scenario(s);
    const auto sol = solve_two_relay(s);
    const double g = grid_search_throughput(s, 400);
    CHECK(sol.throughput >= g - 1e-6 * (1.0 + sol.throughput));
    CHECK(std::abs(sol.throughput - g) <= 1e-3 * std::max(1.0, sol.throughput));
  }
}

TEST_CASE("budget limits are enforced") {
  Scenario s;
  s.relay_count = 1;
  s.gains = {1, 1, 1, 1};
  s.profile.epoch_durations = {1, 1, 1};
  s.profile.arrivals_s = {1, 1, 1};
  s.profile.arrivals_r1 = {1, 1, 1};
  s = validate_scenario(s);
  CHECK_THROWS_AS(grid_search_throughput(s, 400), BudgetExceeded);
  auto two = validate_scenario([] {
    Scenario t;
    t.relay_count = 2;
    t.gains = {2, 1, 1, 1};
    t.profile.epoch_durations = {1};
    t.profile.arrivals_s = {1};
    t.profile.arrivals_r1 = {1};
    t.profile.arrivals_r2 = {1};
    t.mode_set = ModeSet::all();
    return t;
  }());
  CHECK_THROWS_AS(grid_search_throughput(two, 100), BudgetExceeded);
}

#pragma once

#include <stdexcept>

#include "relay_harvest/model.hpp"

namespace relay_harvest {

class PreconditionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-relay, K = 1, single arrival, infinite buffer: bisection on the
/// crossing of the two monotone hop curves. Absolute tolerance 1e-9.
double single_arrival_oracle(const Scenario& s);

/// Brute-force lower bound: grids duration splits and consumed-energy
/// fractions (n points per free dimension), evaluates only feasible points.
/// Supports single-relay K <= 2 and two-relay SR-only K = 1 within the
/// default evaluation budget.
double grid_search_throughput(const Scenario& s, int n, long long budget = 100000000LL);

}  // namespace relay_harvest

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "relay_harvest/oracle.hpp"
#include "relay_harvest/program.hpp"
#include "relay_harvest/solver.hpp"

using namespace relay_harvest;

namespace {

Scenario symmetric_single() {
  Scenario s;
  s.relay_count = 1;
  s.gains = {1.0, 1.0, 1.0, 1.0};
  s.profile.epoch_durations = {2.0};
  s.profile.arrivals_s = {1.0};
  s.profile.arrivals_r1 = {1.0};
  return validate_scenario(s);
}

Scenario fig5_instance(double e22, ModeSet modes) {
  Scenario s;
  s.relay_count = 2;
  s.gains = {2.0, 1.0, 1.0, 3.0};
  s.profile.epoch_durations = {1.0, 1.0};
  s.profile.arrivals_s = {2.5, 2.0};
  s.profile.arrivals_r1 = {0.5, 1.5};
  s.profile.arrivals_r2 = {1.0, e22};
  s.mode_set = modes;
  return validate_scenario(s);
}

}  // namespace

TEST_CASE("symmetric single relay: equal split, unit powers") {
  auto s = symmetric_single();
  auto sol = solve_single_relay(s);
  CHECK(sol.status == SolveStatus::Certified);
  CHECK(sol.throughput == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  const auto& p = std::get<SingleRelayPolicy>(sol.policy);
  CHECK(p.l_s[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(p.l_r[0] == doctest::Approx(1.0).epsilon(1e-4));
  const auto pp = recover_powers(sol, s);
  CHECK(pp.p_s[0].value() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(pp.p_r[0].value() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sol.diagnostics.kkt_residual <= 1e-7);
  CHECK(sol.diagnostics.duality_gap_bound <= 1e-6 * (1.0 + sol.throughput));
}

TEST_CASE("zero source energy is degenerate with zero throughput") {
  auto s = symmetric_single();
  s.profile.arrivals_s = {0.0};
  s.validated = false;
  s = validate_scenario(s);
  auto sol = solve_single_relay(s);
  CHECK(sol.status == SolveStatus::Degenerate);
  CHECK(sol.throughput == 0.0);
}

TEST_CASE("regression: energy-harvesting ten-epoch instance (R1-only reduction)") {
  // Cross-validated against an independent exponential-cone solver and the
  // duality-gap certificate during development.
  Scenario s;
  s.relay_count = 1;
  s.gains = {4.0, 1.0, 1.0, 4.0};
  s.profile.epoch_durations = {1, 0.6, 1.4, 1.2, 0.8, 1, 1.2, 1.6, 0.5, 0.7};
  s.profile.arrivals_s.assign(10, 1.0);
  s.profile.arrivals_r1 = {0.1, 0.3, 0.3, 0.6, 0.6, 0, 0, 1, 4, 5};
  s = validate_scenario(s);
  auto sol = solve_single_relay(s);
  CHECK(sol.status == SolveStatus::Certified);
  CHECK(sol.throughput == doctest::Approx(4.969856623).epsilon(2e-6));
}

TEST_CASE("battery-run endpoint matches the bisection oracle") {
  Scenario s;
  s.relay_count = 1;
  s.gains = {4.0, 1.0, 1.0, 4.0};
  s.profile.epoch_durations = {10.0};
  s.profile.arrivals_s = {10.0};
  s.profile.arrivals_r1 = {11.9};
  s = validate_scenario(s);
  auto sol = solve_single_relay(s);
  CHECK(sol.throughput == doctest::Approx(single_arrival_oracle(s)).epsilon(1e-6));
  CHECK(single_arrival_oracle(s) == doctest::Approx(7.120992104962).epsilon(1e-9));
}

TEST_CASE("solve_barrier toy problems") {
  // max c subject to l*(e^{c/l} - 1) <= 1 and l <= 1: optimum c = ln 2
  Program p(2);
  p.w[1] = 1.0;
  p.lb[0] = 1e-9;
  {
    ConstraintRow r;
    r.constant = -1.0;
    r.pexp.push_back({0, 1, -1, 1.0});
    p.rows.push_back(r);
  }
  {
    ConstraintRow r;
    r.constant = -1.0;
    r.lin.push_back({0, 1.0});
    p.rows.push_back(r);
  }
  {
    ConstraintRow r;  // inactive: c <= 10
    r.constant = -10.0;
    r.lin.push_back({1, 1.0});
    p.rows.push_back(r);
  }
  Eigen::VectorXd x0(2);
  x0 << 0.5, 0.2;
  auto res = solve_barrier(p, x0);
  CHECK(res.converged);
  CHECK(res.x[1] == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.lam_polished[2] <= 1e-7);  // complementary slackness on the inactive row
}

TEST_CASE("assembled K=1 program matches solve_single_relay bit for bit") {
  auto s = symmetric_single();
  auto ap = detail::assemble_single(s);
  auto br = solve_barrier(ap.prog, ap.x0);
  auto sol = solve_single_relay(s);
  const auto& p = std::get<SingleRelayPolicy>(sol.policy);
  CHECK(br.x[ap.var_of_full[detail::SV_CR]] == p.c_r[0]);
  CHECK(br.x[ap.var_of_full[detail::SV_LS]] == p.l_s[0]);
}

TEST_CASE("two-relay with dead R2 collapses to the single-relay reduction") {
  Scenario t;
  t.relay_count = 2;
  t.gains = {2.0, 1.0, 1.0, 3.0};
  t.profile.epoch_durations = {1.0, 1.0};
  t.profile.arrivals_s = {2.5, 2.0};
  t.profile.arrivals_r1 = {0.5, 1.5};
  t.profile.arrivals_r2 = {0.0, 0.0};
  t.mode_set = ModeSet::all();
  t = validate_scenario(t);
  auto two = solve_two_relay(t);

  Scenario r;
  r.relay_count = 1;
  r.gains = {2.0, 1.0, 1.0, 1.0};
  r.profile.epoch_durations = {1.0, 1.0};
  r.profile.arrivals_s = {2.5, 2.0};
  r.profile.arrivals_r1 = {0.5, 1.5};
  r = validate_scenario(r);
  auto one = solve_single_relay(r);
  CHECK(two.throughput == doctest::Approx(one.throughput).epsilon(1e-5));
}

TEST_CASE("fig5 instance: broadcast strictly helps once R2 is energy-rich") {
  auto sr = solve_two_relay(fig5_instance(2.0, ModeSet::sr()));
  auto bc = solve_two_relay(fig5_instance(2.0, ModeSet::sr().with(Mode::Broadcast)));
  CHECK(sr.status == SolveStatus::Certified);
  CHECK(bc.status == SolveStatus::Certified);
  CHECK(bc.throughput > sr.throughput + 1e-3);
  // S and R1 deplete on the SR-only solve
  const auto used = consumed_energy(sr.policy, fig5_instance(2.0, ModeSet::sr()));
  CHECK(4.5 - used.s <= 1e-6);
  CHECK(2.0 - used.r1 <= 1e-6);
}

TEST_CASE("mode-set monotonicity and resource monotonicity") {
  std::mt19937 rng(2024);
  int done = 0;
  for (int t = 0; t < 40 && done < 8; ++t) {
    auto s = testing::random_two(rng, 4);
    s.mode_set = ModeSet::sr();
    s.validated = false;
    s = validate_scenario(s);
    auto v_sr = solve_two_relay(s);
    if (v_sr.status != SolveStatus::Certified) continue;
    s.mode_set = ModeSet::sr().with(Mode::Broadcast);
    s.validated = false;
    auto v_bc = solve_two_relay(validate_scenario(s));
    s.mode_set = ModeSet::all();
    s.validated = false;
    auto v_all = solve_two_relay(validate_scenario(s));
    s.mode_set = ModeSet::sr().with(Mode::MultiAccess);
    s.validated = false;
    auto v_mac = solve_two_relay(validate_scenario(s));
    const double tol = 1e-6 * (1.0 + v_all.throughput);
    CHECK(v_sr.throughput <= v_bc.throughput + tol);
    CHECK(v_sr.throughput <= v_mac.throughput + tol);
    CHECK(v_bc.throughput <= v_all.throughput + tol);
    CHECK(v_mac.throughput <= v_all.throughput + tol);

    Scenario more = s;
    more.mode_set = ModeSet::all();
    for (auto* arr :
         {&more.profile.arrivals_s, &more.profile.arrivals_r1, &more.profile.arrivals_r2}) {
      for (double& e : *arr) e *= 1.3;
    }
    more.validated = false;
    auto v_more = solve_two_relay(validate_scenario(more));
    CHECK(v_all.throughput <= v_more.throughput + tol);
    ++done;
  }
  CHECK(done >= 5);
}

TEST_CASE("scale consistency: energies x f, gains / f") {
  std::mt19937 rng(11);
  for (int t = 0; t < 6; ++t) {
    auto s = testing::random_single(rng, 4);
    auto v1 = solve_single_relay(s);
    Scenario scaled = s;
    const double f = 3.7;
    for (double& e : scaled.profile.arrivals_s) e *= f;
    for (double& e : scaled.profile.arrivals_r1) e *= f;
    scaled.gains.sr1 /= f;
    scaled.gains.r1d /= f;
    scaled.validated = false;
    auto v2 = solve_single_relay(validate_scenario(scaled));
    CHECK(v1.throughput == doctest::Approx(v2.throughput).epsilon(1e-6));
  }
}

TEST_CASE("determinism: repeated solves produce identical policies") {
  std::mt19937 rng(5);
  auto s = testing::random_two(rng, 5);
  auto a = solve_two_relay(s);
  auto b = solve_two_relay(s);
  CHECK(a.throughput == b.throughput);
  const auto& pa = std::get<TwoRelayPolicy>(a.policy);
  const auto& pb = std::get<TwoRelayPolicy>(b.policy);
  CHECK(pa.c_r1II == pb.c_r1II);
  CHECK(pa.l_I == pb.l_I);
  CHECK(pa.e_r1m == pb.e_r1m);
}

TEST_CASE("Bmax = 0 single relay still solves via balance rows") {
  auto s = symmetric_single();
  s.buffer_capacity = 0.0;
  s.validated = false;
  s = validate_scenario(s);
  auto sol = solve_single_relay(s);
  // K = 1: boundary constraints make Bmax irrelevant to the optimum value
  CHECK(sol.throughput == doctest::Approx(std::log(2.0)).epsilon(1e-5));
  const auto& p = std::get<SingleRelayPolicy>(sol.policy);
  CHECK(p.c_s[0] == doctest::Approx(p.c_r[0]).epsilon(1e-9));
}

TEST_CASE("policy feasibility violation detects tampering") {
  auto s = symmetric_single();
  auto sol = solve_single_relay(s);
  CHECK(policy_feasibility_violation(sol.policy, s) <= 1e-8);
  auto& p = std::get<SingleRelayPolicy>(sol.policy);
  p.c_r[0] *= 2.0;  // breaks data causality and relay energy
  CHECK(policy_feasibility_violation(sol.policy, s) > 1e-3);
}

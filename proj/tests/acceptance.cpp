// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "relay_harvest/experiments.hpp"
#include "relay_harvest/kkt.hpp"
#include "relay_harvest/oracle.hpp"
#include "relay_harvest/rates.hpp"
#include "relay_harvest/scenario_io.hpp"
#include "relay_harvest/scheduler.hpp"
#include "relay_harvest/solver.hpp"

using namespace relay_harvest;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s]: %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double log_uniform(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// ---- criteria 1 & 2: fig-5 sweep -----------------------------------------

void criterion_1_2() {
  const double t0 = now_s();
  std::vector<double> values;
  for (int k = 0;; ++k) {
    const double v = 0.5 + 0.02 * k;
    if (v > 2.5 + 1e-9) break;
    values.push_back(v);
  }
  std::vector<double> v_sr(values.size()), v_bc(values.size());
  std::vector<double> res_s(values.size()), res_r1(values.size()), res_r2(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    auto s = fig5_scenario(values[i]);
    auto sol = solve_two_relay(s);
    v_sr[i] = sol.throughput;
    const auto used = consumed_energy(sol.policy, s);
    res_s[i] = 4.5 - used.s;
    res_r1[i] = 2.0 - used.r1;
    res_r2[i] = 1.0 + values[i] - used.r2;
    auto sb = s;
    sb.mode_set = ModeSet::sr().with(Mode::Broadcast);
    sb.validated = false;
    v_bc[i] = solve_two_relay(validate_scenario(sb)).throughput;
  }
  double crossover = -1.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (v_bc[i] > v_sr[i] + 1e-6) {
      crossover = values[i];
      break;
    }
  }
  const double elapsed = now_s() - t0;
  const bool in_window = crossover >= 0.66 && crossover <= 0.78;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "measured crossover %.2f J, window [0.66, 0.78], %.0f s",
                crossover, elapsed);
  report(1, "fig5 crossover", in_window && elapsed < 120.0, buf);

  // criterion 2: SR-only residuals
  double worst_sr1 = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    worst_sr1 = std::max(worst_sr1, std::max(res_s[i], res_r1[i]));
  }
  bool r2_zero_below = true;
  for (size_t i = 0; i < values.size() && values[i] < 0.66; ++i) {
    if (res_r2[i] > 1e-6) r2_zero_below = false;
  }
  bool r2_increasing_beyond = true;
  double prev = -1.0;
  bool any_beyond_positive = false;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.78) continue;
    if (res_r2[i] > 1e-6) any_beyond_positive = true;
    if (prev >= 0.0 && res_r2[i] < prev - 1e-9) r2_increasing_beyond = false;
    prev = res_r2[i];
  }
  char buf2[320];
  std::snprintf(buf2, sizeof(buf2),
                "max S/R1 residual %.2e J; R2 residual below crossover %s zero; beyond: "
                "max %.2e J, strictly-increasing-and-positive %s",
                worst_sr1, r2_zero_below ? "is" : "is NOT",
                *std::max_element(res_r2.begin(), res_r2.end()),
                (any_beyond_positive && r2_increasing_beyond) ? "yes" : "no");
  report(2, "fig5 residual energy", worst_sr1 <= 1e-6 && r2_zero_below && any_beyond_positive &&
                                        r2_increasing_beyond,
         buf2);
}

// ---- criterion 3: fig-3 orderings -----------------------------------------

void criterion_3() {
  const double t0 = now_s();
  bool ok = true;
  std::string detail;
  std::vector<double> eh_all, eh_sr, br_all, br_sr;
  for (int k = 0; k <= 20; ++k) {
    const double lam = 0.05 * k;
    for (bool br : {true, false}) {
      auto s = fig3_scenario(br, lam);
      auto v_all = solve_two_relay(s).throughput;
      auto ssr = s;
      ssr.mode_set = ModeSet::sr();
      ssr.validated = false;
      auto v_sr = solve_two_relay(validate_scenario(ssr)).throughput;
      (br ? br_all : eh_all).push_back(v_all);
      (br ? br_sr : eh_sr).push_back(v_sr);
    }
  }
  for (int k = 0; k <= 20; ++k) {
    if (br_all[k] < eh_all[k] - 1e-6) {
      ok = false;
      detail += "BR<EH@" + fmt12(0.05 * k) + " ";
    }
    if (eh_all[k] < eh_sr[k] - 1e-6 || br_all[k] < br_sr[k] - 1e-6) {
      ok = false;
      detail += "all<sr@" + fmt12(0.05 * k) + " ";
    }
  }
  if (std::abs(eh_all[20] - eh_sr[20]) > 1e-3 || std::abs(br_all[20] - br_sr[20]) > 1e-3) {
    ok = false;
    detail += "no all==sr at lambda=1 ";
  }
  const double eh_r1 = solve_single_relay(fig3_single_relay(false, true)).throughput;
  const double eh_r2 = solve_single_relay(fig3_single_relay(false, false)).throughput;
  const double br_r1 = solve_single_relay(fig3_single_relay(true, true)).throughput;
  const double br_r2 = solve_single_relay(fig3_single_relay(true, false)).throughput;
  if (!(eh_r2 > eh_r1)) {
    ok = false;
    detail += "EH R2-only !> R1-only ";
  }
  if (!(br_r1 > br_r2)) {
    ok = false;
    detail += "BR lam=1 !> lam=0 ";
  }
  const double elapsed = now_s() - t0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "EH singles (R1 %.4f, R2 %.4f), BR singles (R1 %.4f, R2 %.4f), %.0f s %s",
                eh_r1, eh_r2, br_r1, br_r2, elapsed, detail.c_str());
  report(3, "fig3 orderings", ok && elapsed < 300.0, buf);
}

// ---- criterion 4: fig-4 buffer-size properties -----------------------------

void criterion_4() {
  std::vector<double> bgrid;
  for (int k = 0; k < 16; ++k) bgrid.push_back(0.05 * std::pow(8.0 / 0.05, k / 15.0));
  std::vector<double> two, one_r1, one_r2;
  for (double b : bgrid) {
    double best = 0.0;
    for (int k = 0; k <= 20; ++k) {
      auto s = fig3_scenario(false, 0.05 * k);
      s.buffer_capacity = b;
      s.validated = false;
      best = std::max(best, solve_two_relay(validate_scenario(s)).throughput);
    }
    two.push_back(best);
    for (bool r1 : {true, false}) {
      auto s = fig3_single_relay(false, r1);
      s.buffer_capacity = b;
      s.validated = false;
      (r1 ? one_r1 : one_r2).push_back(solve_single_relay(validate_scenario(s)).throughput);
    }
  }
  double inf_best = 0.0;
  for (int k = 0; k <= 20; ++k) {
    inf_best = std::max(inf_best, solve_two_relay(fig3_scenario(false, 0.05 * k)).throughput);
  }
  bool nondecreasing = true;
  for (size_t i = 1; i < bgrid.size(); ++i) {
    if (two[i] < two[i - 1] - 1e-7 || one_r1[i] < one_r1[i - 1] - 1e-7 ||
        one_r2[i] < one_r2[i - 1] - 1e-7) {
      nondecreasing = false;
    }
  }
  int b_star = -1;
  for (size_t i = 0; i < bgrid.size(); ++i) {
    if (two[i] >= 0.999 * inf_best) {
      b_star = int(i);
      break;
    }
  }
  bool flat_beyond = b_star >= 0;
  for (size_t i = b_star < 0 ? bgrid.size() : size_t(b_star); i < bgrid.size(); ++i) {
    if (two[i] < 0.999 * inf_best) flat_beyond = false;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf), "saturation at Bmax=%.3f nats (inf value %.4f)",
                b_star >= 0 ? bgrid[b_star] : -1.0, inf_best);
  report(4, "fig4 buffer sweep", nondecreasing && b_star >= 0 && flat_beyond, buf);
}

// ---- criterion 5: fig-6 ordering -------------------------------------------

void criterion_5() {
  bool ok = true;
  std::string detail;
  double strict_at_10 = 0.0;
  for (int k = 0;; ++k) {
    const double es1 = 4.0 + 0.25 * k;
    if (es1 > 10.0 + 1e-9) break;
    auto s = fig6_scenario(es1);
    auto v_sr = solve_two_relay(s);
    auto sm = s;
    sm.mode_set = ModeSet::sr().with(Mode::MultiAccess);
    sm.validated = false;
    sm = validate_scenario(sm);
    auto v_mac = solve_two_relay(sm);
    if (v_mac.throughput < v_sr.throughput - 1e-9) {
      ok = false;
      detail += "mac<sr@" + fmt12(es1) + " ";
    }
    for (const auto* pr : {&v_sr, &v_mac}) {
      const auto used = consumed_energy(pr->policy, s);
      const double rs = es1 - used.s, r1 = 2.01 - used.r1, r2 = 7.1 - used.r2;
      if (rs > 1e-6 || r1 > 1e-6 || r2 > 1e-6) {
        ok = false;
        detail += "residual@" + fmt12(es1) + " ";
      }
    }
    if (es1 == 10.0) strict_at_10 = v_mac.throughput - v_sr.throughput;
  }
  if (!(strict_at_10 > 1e-6)) {
    ok = false;
    detail += "not strict at Es1=10 ";
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf), "mac-sr gap at Es1=10: %.3e nats %s", strict_at_10,
                detail.c_str());
  report(5, "fig6 ordering", ok, buf);
}

// ---- criterion 6: oracle equivalence ----------------------------------------

void criterion_6() {
  const double t0 = now_s();
  std::mt19937 rng(20240801);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  std::string detail;
  double worst_grid = 0.0, worst_oracle = 0.0;
  for (int t = 0; t < 50; ++t) {
    Scenario s;
    s.relay_count = 1;
    const int K = 1 + (t % 2);
    for (int i = 0; i < K; ++i) {
      s.profile.epoch_durations.push_back(0.4 + 1.6 * u(rng));
      s.profile.arrivals_s.push_back(log_uniform(rng, 0.01, 10.0));
      s.profile.arrivals_r1.push_back(log_uniform(rng, 0.01, 10.0));
    }
    s.gains.sr1 = log_uniform(rng, 0.25, 8.0);
    s.gains.r1d = log_uniform(rng, 0.25, 8.0);
    const double bs[3] = {0.25, 1.0, kInf};
    s.buffer_capacity = bs[t % 3];
    s = validate_scenario(s);
    const auto sol = solve_single_relay(s);
    const double g = grid_search_throughput(s, 400);
    const double rel = std::abs(sol.throughput - g) / std::max(1.0, sol.throughput);
    worst_grid = std::max(worst_grid, rel);
    if (rel > 1e-3 || sol.throughput < g - 1e-6 * (1.0 + sol.throughput)) {
      ok = false;
      detail += "grid#" + std::to_string(t) + " ";
    }
    if (K == 1 && !std::isfinite(s.buffer_capacity)) {
      const double o = single_arrival_oracle(s);
      worst_oracle = std::max(worst_oracle, std::abs(sol.throughput - o));
      if (std::abs(sol.throughput - o) > 1e-6) {
        ok = false;
        detail += "oracle#" + std::to_string(t) + " ";
      }
    }
  }
  // two-relay SR-only K = 1 family
  for (int t = 0; t < 10; ++t) {
    Scenario s;
    s.relay_count = 2;
    s.gains = {log_uniform(rng, 1.0, 8.0), log_uniform(rng, 0.25, 1.0),
               log_uniform(rng, 0.25, 8.0), log_uniform(rng, 0.25, 8.0)};
    s.profile.epoch_durations = {0.5 + 2.0 * u(rng)};
    s.profile.arrivals_s = {log_uniform(rng, 0.1, 10.0)};
    s.profile.arrivals_r1 = {log_uniform(rng, 0.1, 10.0)};
    s.profile.arrivals_r2 = {log_uniform(rng, 0.1, 10.0)};
    s.mode_set = ModeSet::sr();
    s = validate_scenario(s);
    const auto sol = solve_two_relay(s);
    const double g = grid_search_throughput(s, 400);
    const double rel = std::abs(sol.throughput - g) / std::max(1.0, sol.throughput);
    worst_grid = std::max(worst_grid, rel);
    if (rel > 1e-3 || sol.throughput < g - 1e-6 * (1.0 + sol.throughput)) {
      ok = false;
      detail += "two#" + std::to_string(t) + " ";
    }
  }
  const double elapsed = now_s() - t0;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "worst grid rel err %.2e, worst oracle abs err %.2e, %.0f s %s",
                worst_grid, worst_oracle, elapsed, detail.c_str());
  report(6, "oracle equivalence", ok && elapsed < 600.0, buf);
}

// ---- criterion 7: structural property suite ---------------------------------

void criterion_7() {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Tolerances tol;
  int certified = 0, attempts = 0, lemma_failures = 0, lemma3_failures = 0;
  std::string detail;
  while (certified < 200 && attempts < 600) {
    ++attempts;
    Scenario s;
    const bool two = attempts % 2 == 0;
    s.relay_count = two ? 2 : 1;
    const int K = 1 + int(u(rng) * 6) % 6;
    for (int i = 0; i < K; ++i) {
      s.profile.epoch_durations.push_back(0.3 + 1.7 * u(rng));
      s.profile.arrivals_s.push_back(log_uniform(rng, 0.01, 10.0));
      s.profile.arrivals_r1.push_back(log_uniform(rng, 0.01, 10.0));
      if (two) s.profile.arrivals_r2.push_back(log_uniform(rng, 0.01, 10.0));
    }
    s.gains.sr1 = log_uniform(rng, 0.25, 8.0);
    s.gains.r1d = log_uniform(rng, 0.25, 8.0);
    if (two) {
      s.gains.sr2 = log_uniform(rng, 0.25, 8.0);
      s.gains.r2d = log_uniform(rng, 0.25, 8.0);
      const int pick = attempts % 4;
      s.mode_set = pick == 0   ? ModeSet::sr()
                   : pick == 1 ? ModeSet::sr().with(Mode::Broadcast)
                   : pick == 2 ? ModeSet::sr().with(Mode::MultiAccess)
                               : ModeSet::all();
    }
    const double bs[3] = {0.25, 1.0, kInf};
    s.buffer_capacity = bs[attempts % 3];
    s = validate_scenario(s);
    Solution sol = solve(s);
    if (sol.status != SolveStatus::Certified) continue;
    ++certified;
    const auto flags = classify_states(sol, s, tol);
    const auto rep = check_structural_properties(sol, s, flags, tol);
    for (const auto& l : rep.lemmas) {
      if (l.applicable && !l.pass()) {
        ++lemma_failures;
        if (detail.size() < 160) {
          detail += l.lemma + "#" + std::to_string(attempts) + " ";
        }
        if (l.lemma == "lemma3") ++lemma3_failures;
      }
    }
  }
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "%d certified in %d attempts; %d non-degenerate lemma violations (%d on lemma 3) %s",
                certified, attempts, lemma_failures, lemma3_failures, detail.c_str());
  report(7, "structural property suite", certified >= 200 && lemma_failures == 0, buf);
}

// ---- criterion 8: numerical hygiene -----------------------------------------

void criterion_8() {
  bool ok = true;
  std::string detail;
  // gradient finite differences
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  double worst_fd = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double l = u(rng), c = u(rng), alpha = u(rng);
    const auto vg = epoch_energy(l, c, alpha);
    const double h = 1e-6;
    const double dl =
        (epoch_energy(l + h, c, alpha).value - epoch_energy(l - h, c, alpha).value) / (2 * h);
    const double dc =
        (epoch_energy(l, c + h, alpha).value - epoch_energy(l, c - h, alpha).value) / (2 * h);
    worst_fd = std::max(worst_fd, std::abs(vg.partial("l") - dl) / std::max(1.0, std::abs(dl)));
    worst_fd = std::max(worst_fd, std::abs(vg.partial("c") - dc) / std::max(1.0, std::abs(dc)));
  }
  if (worst_fd > 1e-5) {
    ok = false;
    detail += "fd ";
  }
  // duality gap + schedule round trip + determinism on a small pool
  std::mt19937 rng2(88);
  std::uniform_real_distribution<double> u2(0.0, 1.0);
  double worst_gap = 0.0, worst_round = 0.0;
  int checked = 0;
  for (int t = 0; t < 30 && checked < 12; ++t) {
    Scenario s;
    s.relay_count = 1 + (t % 2);
    const int K = 1 + int(u2(rng2) * 4);
    for (int i = 0; i < K; ++i) {
      s.profile.epoch_durations.push_back(0.4 + 1.2 * u2(rng2));
      s.profile.arrivals_s.push_back(log_uniform(rng2, 0.05, 5.0));
      s.profile.arrivals_r1.push_back(log_uniform(rng2, 0.05, 5.0));
      if (s.relay_count == 2) s.profile.arrivals_r2.push_back(log_uniform(rng2, 0.05, 5.0));
    }
    s.gains.sr1 = 2.0;
    s.gains.sr2 = 1.0;
    s.gains.r1d = 1.0;
    s.gains.r2d = 3.0;
    s = validate_scenario(s);
    Solution sol = solve(s);
    if (sol.status != SolveStatus::Certified) continue;
    ++checked;
    worst_gap = std::max(worst_gap,
                         sol.diagnostics.duality_gap_bound / (1.0 + std::abs(sol.throughput)));
    const auto sch = build_schedule(sol.policy, s);
    const auto tr = simulate_schedule(sch, s, s.profile.deadline() / 64.0);
    const auto rep = verify_traces(tr, s, 1e-7, sol.throughput);
    worst_round = std::max(worst_round, std::abs(rep.delivered - sol.throughput) /
                                            std::max(1.0, sol.throughput));
    if (!rep.pass()) {
      ok = false;
      detail += "trace#" + std::to_string(t) + " ";
    }
    Solution again = solve(s);
    if (solution_to_json(again, s) != solution_to_json(sol, s)) {
      ok = false;
      detail += "determinism ";
    }
  }
  if (worst_gap > 1e-6) {
    ok = false;
    detail += "gap ";
  }
  if (worst_round > 1e-7) {
    ok = false;
    detail += "roundtrip ";
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf), "fd %.1e, gap %.1e, roundtrip %.1e over %d instances %s",
                worst_fd, worst_gap, worst_round, checked, detail.c_str());
  report(8, "numerical hygiene", ok && checked >= 10, buf);
}

}  // namespace

int main() {
  criterion_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("acceptance: %d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

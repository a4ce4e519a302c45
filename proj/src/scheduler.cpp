#include "relay_harvest/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "relay_harvest/rates.hpp"

namespace relay_harvest {

const char* segment_mode_name(SegmentMode m) {
  switch (m) {
    case SegmentMode::SourceToRelay: return "S->R";
    case SegmentMode::RelayToDest: return "R->D";
    case SegmentMode::Broadcast: return "BC";
    case SegmentMode::MultiAccess: return "MAC";
    case SegmentMode::SuccessiveI: return "SR-I";
    case SegmentMode::SuccessiveII: return "SR-II";
  }
  return "?";
}

namespace {

constexpr double kTiny = 1e-15;

double safe_rate(double c, double l) { return l > 0.0 ? c / l : 0.0; }

double invert_power(double c, double l, double alpha) {
  return l > 0.0 && c > 0.0 ? std::expm1(c / l) / alpha : 0.0;
}

struct EpochScheduler {
  // per-mode remaining time and constant rates; index by SegmentMode subset
  struct ModeRates {
    SegmentMode mode{};
    double remaining = 0.0;
    double fill1 = 0.0, fill2 = 0.0;    // buffer inflow rates
    double drain1 = 0.0, drain2 = 0.0;  // buffer outflow rates
    Segment proto;                      // powers/rates template
  };
  std::vector<ModeRates> modes;
  double b1 = 0.0, b2 = 0.0;  // carried buffer stocks
  double bmax = kInf;
  double t = 0.0;
  std::vector<Segment>* out = nullptr;
  double dummy_total = 0.0;

  double runnable_time(const ModeRates& m) const {
    if (m.remaining <= kTiny) return 0.0;
    double dt = m.remaining;
    if (std::isfinite(bmax)) {
      const double net1 = m.fill1 - m.drain1;
      if (net1 > kTiny) dt = std::min(dt, (bmax - b1) / net1);
      const double net2 = m.fill2 - m.drain2;
      if (net2 > kTiny) dt = std::min(dt, (bmax - b2) / net2);
    }
    {
      const double net1 = m.drain1 - m.fill1;
      if (net1 > kTiny) dt = std::min(dt, b1 / net1);
      const double net2 = m.drain2 - m.fill2;
      if (net2 > kTiny) dt = std::min(dt, b2 / net2);
    }
    return std::max(dt, 0.0);
  }

  void emit(ModeRates& m, double dt, double dummy1, double dummy2) {
    if (dt <= 0.0) return;
    Segment seg = m.proto;
    seg.start = t;
    seg.end = t + dt;
    seg.dummy_r1 = dummy1;
    seg.dummy_r2 = dummy2;
    out->push_back(seg);
    const double covered1 = m.drain1 * dt - dummy1;
    const double covered2 = m.drain2 * dt - dummy2;
    b1 += m.fill1 * dt - covered1;
    b2 += m.fill2 * dt - covered2;
    b1 = std::max(b1, 0.0);
    b2 = std::max(b2, 0.0);
    m.remaining -= dt;
    if (m.remaining < kTiny) m.remaining = 0.0;
    t += dt;
    dummy_total += dummy1 + dummy2;
  }

  // Run one mode for up to its runnable time; returns progress made.
  double step(ModeRates& m) {
    const double dt = runnable_time(m);
    if (dt <= kTiny * std::max(1.0, m.remaining)) return 0.0;
    emit(m, dt, 0.0, 0.0);
    return dt;
  }

  // Bootstrap: run a drain-blocked mode for a slice, transmitting the
  // uncovered part as dummy data (the paper's epsilon device).
  bool bootstrap(double slice) {
    for (auto& m : modes) {
      if (m.remaining <= kTiny) continue;
      const bool empty_blocked1 = m.drain1 > kTiny && b1 / m.drain1 < kTiny;
      const bool empty_blocked2 = m.drain2 > kTiny && b2 / m.drain2 < kTiny;
      if (!empty_blocked1 && !empty_blocked2) continue;
      // fills must not be capacity-blocked for the slice to run
      double dt = std::min(slice, m.remaining);
      if (std::isfinite(bmax)) {
        const double net1 = m.fill1 - m.drain1;
        if (net1 > kTiny) dt = std::min(dt, (bmax - b1) / net1);
        const double net2 = m.fill2 - m.drain2;
        if (net2 > kTiny) dt = std::min(dt, (bmax - b2) / net2);
      }
      if (dt <= kTiny) continue;
      const double want1 = m.drain1 * dt, want2 = m.drain2 * dt;
      const double dummy1 = std::max(want1 - b1 - m.fill1 * dt, 0.0);
      const double dummy2 = std::max(want2 - b2 - m.fill2 * dt, 0.0);
      emit(m, dt, std::min(dummy1, want1), std::min(dummy2, want2));
      return true;
    }
    return false;
  }

  bool done() const {
    for (const auto& m : modes) {
      if (m.remaining > kTiny) return false;
    }
    return true;
  }

  double total_remaining() const {
    double r = 0.0;
    for (const auto& m : modes) r += m.remaining;
    return r;
  }

  // Cyclic order with dummy bootstrap on stalls. Returns false on a stall
  // that even the bootstrap cannot break.
  bool run(int max_cycles) {
    double primer = total_remaining() * 1e-9;
    int cycles = 0;
    while (!done()) {
      double progress = 0.0;
      for (auto& m : modes) progress += step(m);
      if (progress <= kTiny) {
        if (!bootstrap(std::max(primer, kTiny))) return false;
        primer *= 2.0;  // escalate so tight circulations stay bounded
      }
      if (++cycles > max_cycles) return false;
    }
    return true;
  }
};

void schedule_single_epoch(const SingleRelayPolicy& p, const Scenario& s, int i, double t0,
                           double& buffer, std::vector<Segment>& out) {
  EpochScheduler es;
  es.bmax = s.buffer_capacity;
  es.b1 = buffer;
  es.t = t0;
  es.out = &out;
  EpochScheduler::ModeRates src;
  src.mode = SegmentMode::SourceToRelay;
  src.remaining = p.l_s[i];
  src.fill1 = safe_rate(p.c_s[i], p.l_s[i]);
  src.proto.mode = SegmentMode::SourceToRelay;
  src.proto.p_source = invert_power(p.c_s[i], p.l_s[i], s.gains.sr());
  src.proto.rate_in1 = src.fill1;
  EpochScheduler::ModeRates rel;
  rel.mode = SegmentMode::RelayToDest;
  rel.remaining = p.l_r[i];
  rel.drain1 = safe_rate(p.c_r[i], p.l_r[i]);
  rel.proto.mode = SegmentMode::RelayToDest;
  rel.proto.p_relay1 = invert_power(p.c_r[i], p.l_r[i], s.gains.rd());
  rel.proto.rate_out1 = rel.drain1;
  es.modes = {src, rel};  // source first: fill, then drain
  if (!es.run(1 << 16)) {
    throw Unschedulable("single-relay alternation stalled", es.t);
  }
  if (es.dummy_total > 0.0) {
    // a boundary-feasible single-relay policy never needs dummy data
    throw Unschedulable("single-relay epoch required uncovered relay data", es.t);
  }
  buffer = es.b1;
}

void schedule_two_epoch(const TwoRelayPolicy& p, const Scenario& s, int i, double t0, double& b1,
                        double& b2, std::vector<Segment>& out, double& dummy_total) {
  EpochScheduler es;
  es.bmax = s.buffer_capacity;
  es.b1 = b1;
  es.b2 = b2;
  es.t = t0;
  es.out = &out;
  auto mk = [&](SegmentMode mode, double dur) {
    EpochScheduler::ModeRates m;
    m.mode = mode;
    m.remaining = dur;
    m.proto.mode = mode;
    return m;
  };
  // spec'd cyclic order: SR-II, SR-I, BC, MAC
  auto srII = mk(SegmentMode::SuccessiveII, p.l_II[i]);
  srII.fill2 = safe_rate(p.c_sII[i], p.l_II[i]);
  srII.drain1 = safe_rate(p.c_r1II[i], p.l_II[i]);
  srII.proto.p_source = invert_power(p.c_sII[i], p.l_II[i], s.gains.sr2);
  srII.proto.p_relay1 = invert_power(p.c_r1II[i], p.l_II[i], s.gains.r1d);
  srII.proto.rate_in2 = srII.fill2;
  srII.proto.rate_out1 = srII.drain1;

  auto srI = mk(SegmentMode::SuccessiveI, p.l_I[i]);
  srI.fill1 = safe_rate(p.c_sI[i], p.l_I[i]);
  srI.drain2 = safe_rate(p.c_r2I[i], p.l_I[i]);
  srI.proto.p_source = invert_power(p.c_sI[i], p.l_I[i], s.gains.sr1);
  srI.proto.p_relay2 = invert_power(p.c_r2I[i], p.l_I[i], s.gains.r2d);
  srI.proto.rate_in1 = srI.fill1;
  srI.proto.rate_out2 = srI.drain2;

  auto bc = mk(SegmentMode::Broadcast, p.l_b[i]);
  bc.fill1 = safe_rate(p.c_br1[i], p.l_b[i]);
  bc.fill2 = safe_rate(p.c_br2[i], p.l_b[i]);
  if (p.l_b[i] > 0.0) {
    bc.proto.p_source = broadcast_power(bc.fill1, bc.fill2, s.gains);
    bc.proto.eta = bc.proto.p_source > 0.0 ? broadcast_split(bc.fill1, bc.fill2, s.gains) : 0.0;
  }
  bc.proto.rate_in1 = bc.fill1;
  bc.proto.rate_in2 = bc.fill2;

  auto mac = mk(SegmentMode::MultiAccess, p.l_m[i]);
  mac.drain1 = safe_rate(p.c_r1m[i], p.l_m[i]);
  mac.drain2 = safe_rate(p.c_r2m[i], p.l_m[i]);
  mac.proto.p_relay1 = p.l_m[i] > 0.0 ? p.e_r1m[i] / p.l_m[i] : 0.0;
  mac.proto.p_relay2 = p.l_m[i] > 0.0 ? p.e_r2m[i] / p.l_m[i] : 0.0;
  mac.proto.rate_out1 = mac.drain1;
  mac.proto.rate_out2 = mac.drain2;

  es.modes = {srII, srI, bc, mac};
  if (!es.run(1 << 16)) {
    throw Unschedulable("two-relay alternation stalled (buffer deadlock)", es.t);
  }
  b1 = es.b1;
  b2 = es.b2;
  dummy_total += es.dummy_total;
}

}  // namespace

Schedule build_schedule(const Policy& policy, const Scenario& s) {
  Schedule sch;
  const int K = s.profile.epoch_count();
  double t0 = 0.0;
  if (const auto* sp = std::get_if<SingleRelayPolicy>(&policy)) {
    if (s.buffer_capacity == 0.0 && policy_throughput(policy) > 0.0) {
      throw Unschedulable("Bmax = 0 with positive data needs infinite alternation", 0.0);
    }
    double buffer = 0.0;
    for (int i = 0; i < K; ++i) {
      schedule_single_epoch(*sp, s, i, t0, buffer, sch.segments);
      t0 += s.profile.epoch_durations[i];
    }
  } else {
    const auto& tp = std::get<TwoRelayPolicy>(policy);
    if (s.buffer_capacity == 0.0 && policy_throughput(policy) > 0.0) {
      throw Unschedulable("Bmax = 0 with positive data needs infinite alternation", 0.0);
    }
    double b1 = 0.0, b2 = 0.0;
    for (int i = 0; i < K; ++i) {
      schedule_two_epoch(tp, s, i, t0, b1, b2, sch.segments, sch.dummy_total);
      t0 += s.profile.epoch_durations[i];
    }
  }
  return sch;
}

Traces simulate_schedule(const Schedule& sch, const Scenario& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_schedule: dt must be positive");
  const int K = s.profile.epoch_count();
  Traces tr;
  // event times: epoch starts and segment endpoints, densified to step <= dt
  std::vector<double> events;
  events.push_back(0.0);
  double t = 0.0;
  for (int i = 0; i < K; ++i) {
    events.push_back(t);
    t += s.profile.epoch_durations[i];
  }
  events.push_back(t);
  for (const auto& seg : sch.segments) {
    events.push_back(seg.start);
    events.push_back(seg.end);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               events.end());
  std::vector<double> grid;
  for (size_t i = 0; i + 1 < events.size(); ++i) {
    grid.push_back(events[i]);
    const double span = events[i + 1] - events[i];
    const int steps = int(std::ceil(span / dt));
    for (int k = 1; k < steps; ++k) grid.push_back(events[i] + span * k / steps);
  }
  grid.push_back(events.back());

  const double T = s.profile.deadline();
  auto arrivals_until = [&](const std::vector<double>& arr, double when) {
    double acc = 0.0, tt = 0.0;
    for (int i = 0; i < K; ++i) {
      if (tt <= when + 1e-12) acc += arr[i];
      tt += s.profile.epoch_durations[i];
    }
    return acc;
  };
  size_t si = 0;
  double used_s = 0.0, used_r1 = 0.0, used_r2 = 0.0;
  double buf1 = 0.0, buf2 = 0.0, delivered = 0.0;
  double prev = 0.0;
  for (double now : grid) {
    // integrate across segments overlapping (prev, now)
    double cur = prev;
    while (cur < now - 1e-15) {
      while (si < sch.segments.size() && sch.segments[si].end <= cur + 1e-15) ++si;
      double upto = now;
      const Segment* seg = nullptr;
      if (si < sch.segments.size()) {
        const auto& g = sch.segments[si];
        if (g.start > cur + 1e-15) {
          upto = std::min(now, g.start);
        } else {
          seg = &g;
          upto = std::min(now, g.end);
        }
      }
      const double span = upto - cur;
      if (seg && span > 0.0) {
        used_s += seg->p_source * span;
        used_r1 += seg->p_relay1 * span;
        used_r2 += seg->p_relay2 * span;
        const double frac = span / (seg->end - seg->start);
        const double d1 = seg->dummy_r1 * frac, d2 = seg->dummy_r2 * frac;
        buf1 += seg->rate_in1 * span - (seg->rate_out1 * span - d1);
        buf2 += seg->rate_in2 * span - (seg->rate_out2 * span - d2);
        delivered += (seg->rate_out1 + seg->rate_out2) * span;
      }
      cur = upto;
      if (span <= 0.0) break;
    }
    prev = now;
    tr.time.push_back(now);
    tr.battery_s.push_back(arrivals_until(s.profile.arrivals_s, std::min(now, T - 1e-12)) - used_s);
    tr.battery_r1.push_back(arrivals_until(s.profile.arrivals_r1, std::min(now, T - 1e-12)) -
                            used_r1);
    tr.battery_r2.push_back(arrivals_until(s.profile.arrivals_r2, std::min(now, T - 1e-12)) -
                            used_r2);
    tr.buffer_r1.push_back(buf1);
    tr.buffer_r2.push_back(buf2);
    tr.delivered.push_back(delivered);
  }
  return tr;
}

FeasibilityReport verify_traces(const Traces& tr, const Scenario& s, double tol,
                                double expected_delivered) {
  FeasibilityReport rep;
  const double scale_s = std::max(
      std::accumulate(s.profile.arrivals_s.begin(), s.profile.arrivals_s.end(), 0.0), 1e-9);
  const double scale_r1 = std::max(
      std::accumulate(s.profile.arrivals_r1.begin(), s.profile.arrivals_r1.end(), 0.0), 1e-9);
  const double scale_r2 = std::max(
      std::accumulate(s.profile.arrivals_r2.begin(), s.profile.arrivals_r2.end(), 0.0), 1e-9);
  const double data_scale = std::max(tr.delivered.empty() ? 0.0 : tr.delivered.back(), 1.0);
  const double Bmax = s.buffer_capacity;
  for (size_t i = 0; i < tr.time.size(); ++i) {
    auto flag = [&](double v, double lim, const char* what) {
      if (v < lim) rep.violations.push_back({tr.time[i], what, v});
    };
    flag(tr.battery_s[i], -tol * scale_s, "battery_S");
    flag(tr.battery_r1[i], -tol * scale_r1, "battery_R1");
    flag(tr.battery_r2[i], -tol * scale_r2, "battery_R2");
    flag(tr.buffer_r1[i], -tol * data_scale, "buffer_R1_underflow");
    flag(tr.buffer_r2[i], -tol * data_scale, "buffer_R2_underflow");
    if (std::isfinite(Bmax)) {
      if (tr.buffer_r1[i] > Bmax + tol * data_scale) {
        rep.violations.push_back({tr.time[i], "buffer_R1_overflow", tr.buffer_r1[i] - Bmax});
      }
      if (tr.buffer_r2[i] > Bmax + tol * data_scale) {
        rep.violations.push_back({tr.time[i], "buffer_R2_overflow", tr.buffer_r2[i] - Bmax});
      }
    }
    rep.max_buffer_r1 = std::max(rep.max_buffer_r1, tr.buffer_r1[i]);
    rep.max_buffer_r2 = std::max(rep.max_buffer_r2, tr.buffer_r2[i]);
  }
  rep.delivered = tr.delivered.empty() ? 0.0 : tr.delivered.back();
  if (expected_delivered >= 0.0) {
    const double err = std::abs(rep.delivered - expected_delivered);
    if (err > tol * std::max(1.0, expected_delivered)) {
      rep.violations.push_back({tr.time.empty() ? 0.0 : tr.time.back(), "delivered_mismatch", err});
    }
  }
  return rep;
}

std::string traces_to_csv(const Traces& tr) {
  std::string out = "time,E_s,E_r1,E_r2,B_r1,B_r2,delivered\n";
  char buf[256];
  for (size_t i = 0; i < tr.time.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", tr.time[i],
                  tr.battery_s[i], tr.battery_r1[i], tr.battery_r2[i], tr.buffer_r1[i],
                  tr.buffer_r2[i], tr.delivered[i]);
    out += buf;
  }
  return out;
}

}  // namespace relay_harvest

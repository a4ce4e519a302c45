#include "relay_harvest/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "relay_harvest/rates.hpp"

namespace relay_harvest {

namespace {

constexpr double kLFloor = 1e-9;   // duration lower bound during iterations
constexpr double kLSnap = 1e-7;    // durations below this snap to zero

std::vector<double> cumsum(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::partial_sum(v.begin(), v.end(), out.begin());
  return out;
}

int first_positive(const std::vector<double>& cum) {
  for (size_t i = 0; i < cum.size(); ++i) {
    if (cum[i] > 0.0) return int(i);
  }
  return int(cum.size());
}

double persp_energy(double l, double c, double alpha) {
  if (l <= 0.0) return c > 0.0 ? kInf : 0.0;
  return l / alpha * std::expm1(c / l);
}

double bc_energy(double l, double c1, double c2, const ChannelGains& g) {
  if (l <= 0.0) return (c1 > 0.0 || c2 > 0.0) ? kInf : 0.0;
  const double A = 1.0 / g.sr2 - 1.0 / g.sr1;
  return A * l * std::expm1(c2 / l) + l / g.sr1 * std::expm1((c1 + c2) / l);
}

}  // namespace

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Certified: return "certified";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::Degenerate: return "degenerate";
  }
  return "?";
}

namespace detail {

// ---------------------------------------------------------------------------
// single relay
// ---------------------------------------------------------------------------

AssembledProgram assemble_single(const Scenario& s) {
  const int K = s.profile.epoch_count();
  const auto& tau = s.profile.epoch_durations;
  const double a_sr = s.gains.sr(), a_rd = s.gains.rd();
  const double Bmax = s.buffer_capacity;
  const auto cumS = cumsum(s.profile.arrivals_s);
  const auto cumR = cumsum(s.profile.arrivals_r1);
  const int i0s = first_positive(cumS);
  const int i0r = first_positive(cumR);

  AssembledProgram ap;
  ap.epochs = K;
  ap.full_n = SV_COUNT * K;
  ap.var_of_full.assign(ap.full_n, -1);
  auto fi = [&](int i, int k) { return SV_COUNT * i + k; };

  std::vector<bool> pinned(ap.full_n, false);
  for (int i = 0; i < K; ++i) {
    if (i < i0s) pinned[fi(i, SV_CS)] = true;
    if (i < std::max(i0s, i0r)) pinned[fi(i, SV_CR)] = true;
    if (Bmax == 0.0) {
      // prefix equality collapses the pair; a pinned side pins the other
      if (pinned[fi(i, SV_CS)] || pinned[fi(i, SV_CR)]) {
        pinned[fi(i, SV_CS)] = pinned[fi(i, SV_CR)] = true;
      }
    }
  }
  int n = 0;
  for (int j = 0; j < ap.full_n; ++j) {
    if (!pinned[j]) ap.var_of_full[j] = n++;
  }
  ap.degenerate = true;
  for (int i = 0; i < K; ++i) {
    if (!pinned[fi(i, SV_CR)]) ap.degenerate = false;
  }
  Program& p = ap.prog;
  p.resize(n);
  if (ap.degenerate) return ap;

  auto var = [&](int i, int k) { return ap.var_of_full[fi(i, k)]; };
  auto live = [&](int i, int k) { return ap.var_of_full[fi(i, k)] >= 0; };

  const double T = s.profile.deadline();
  const double rbar_s = std::log1p(a_sr * cumS.back() / T);
  const double rbar_r = std::log1p(a_rd * cumR.back() / T);
  for (int i = 0; i < K; ++i) {
    p.lb[var(i, SV_LS)] = kLFloor;
    p.lb[var(i, SV_LR)] = kLFloor;
    p.xscale[var(i, SV_LS)] = tau[i];
    p.xscale[var(i, SV_LR)] = tau[i];
    if (live(i, SV_CS)) p.xscale[var(i, SV_CS)] = std::max(0.1, tau[i] * rbar_s);
    if (live(i, SV_CR)) {
      p.xscale[var(i, SV_CR)] = std::max(0.1, tau[i] * rbar_r);
      p.w[var(i, SV_CR)] = 1.0;
    }
  }

  const double data_scale = std::max(0.1, rbar_s * T);
  for (int i = 0; i < K; ++i) {
    if (i >= i0s) {
      ConstraintRow r;
      r.family = RowFamily::EnergyS;
      r.epoch = i;
      r.constant = -cumS[i];
      r.scale = std::max(cumS[i], 1e-6);
      for (int j = 0; j <= i; ++j) {
        if (live(j, SV_CS)) r.pexp.push_back({var(j, SV_LS), var(j, SV_CS), -1, 1.0 / a_sr});
      }
      p.rows.push_back(std::move(r));
    }
    if (i >= std::max(i0s, i0r)) {
      ConstraintRow r;
      r.family = RowFamily::EnergyR1;
      r.epoch = i;
      r.constant = -cumR[i];
      r.scale = std::max(cumR[i], 1e-6);
      for (int j = 0; j <= i; ++j) {
        if (live(j, SV_CR)) r.pexp.push_back({var(j, SV_LR), var(j, SV_CR), -1, 1.0 / a_rd});
      }
      p.rows.push_back(std::move(r));
      if (Bmax > 0.0) {
        ConstraintRow d;
        d.family = RowFamily::DataR1;
        d.epoch = i;
        d.scale = data_scale;
        for (int j = 0; j <= i; ++j) {
          if (live(j, SV_CR)) d.lin.push_back({var(j, SV_CR), 1.0});
          if (live(j, SV_CS)) d.lin.push_back({var(j, SV_CS), -1.0});
        }
        p.rows.push_back(std::move(d));
      }
    }
    if (std::isfinite(Bmax) && Bmax > 0.0 && i >= i0s) {
      ConstraintRow b;
      b.family = RowFamily::BufferR1;
      b.epoch = i;
      b.constant = -Bmax;
      b.scale = std::max(Bmax, 0.1);
      for (int j = 0; j <= i; ++j) {
        if (live(j, SV_CS)) b.lin.push_back({var(j, SV_CS), 1.0});
        if (live(j, SV_CR)) b.lin.push_back({var(j, SV_CR), -1.0});
      }
      p.rows.push_back(std::move(b));
    }
    ConstraintRow h;
    h.family = RowFamily::HalfDuplex;
    h.epoch = i;
    h.constant = -tau[i];
    h.scale = tau[i];
    h.lin.push_back({var(i, SV_LS), 1.0});
    h.lin.push_back({var(i, SV_LR), 1.0});
    p.rows.push_back(std::move(h));
    if (Bmax == 0.0 && live(i, SV_CS)) {
      EqualityRow eq;
      eq.lin.push_back({var(i, SV_CS), 1.0});
      eq.lin.push_back({var(i, SV_CR), -1.0});
      p.eq_rows.push_back(std::move(eq));
    }
  }

  // strictly interior start
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < K; ++i) {
    x0[var(i, SV_LS)] = 0.45 * tau[i];
    x0[var(i, SV_LR)] = 0.45 * tau[i];
  }
  auto src_used = [&](int upto) {
    double u = 0.0;
    for (int j = 0; j <= upto; ++j) {
      if (live(j, SV_CS)) u += persp_energy(x0[var(j, SV_LS)], x0[var(j, SV_CS)], a_sr);
    }
    return u;
  };
  double th = 0.5;
  for (int round = 0; round < 60; ++round) {
    for (int i = 0; i < K; ++i) {
      if (live(i, SV_CS)) x0[var(i, SV_CS)] = th * x0[var(i, SV_LS)] * std::max(rbar_s, 0.05);
    }
    bool ok = true;
    for (int i = i0s; i < K; ++i) {
      if (src_used(i) > 0.6 * cumS[i]) ok = false;
    }
    if (ok) break;
    th *= 0.5;
  }
  th = 0.5;
  for (int round = 0; round < 60; ++round) {
    double ins = 0.0, outs = 0.0;
    for (int i = 0; i < K; ++i) {
      if (live(i, SV_CS)) ins += x0[var(i, SV_CS)];
      if (!live(i, SV_CR)) continue;
      double cap = th * 0.45 * std::max(ins - outs, 0.0);
      if (Bmax == 0.0) cap = live(i, SV_CS) ? x0[var(i, SV_CS)] : 0.0;  // equality rows
      cap = std::min(cap, th * x0[var(i, SV_LR)] * std::max(rbar_r, 0.05));
      if (Bmax == 0.0 && live(i, SV_CS)) {
        x0[var(i, SV_CS)] = cap;  // keep the pair balanced
      }
      x0[var(i, SV_CR)] = cap;
      outs += cap;
    }
    bool ok = true;
    for (int i = std::max(i0s, i0r); i < K; ++i) {
      double u = 0.0;
      for (int j = 0; j <= i; ++j) {
        if (live(j, SV_CR)) u += persp_energy(x0[var(j, SV_LR)], x0[var(j, SV_CR)], a_rd);
      }
      if (u > 0.6 * cumR[i]) ok = false;
    }
    if (Bmax == 0.0) {
      for (int i = i0s; i < K; ++i) {
        if (src_used(i) > 0.6 * cumS[i]) ok = false;
      }
    }
    if (ok) break;
    th *= 0.5;
  }
  if (std::isfinite(Bmax) && Bmax > 0.0) {
    for (int round = 0; round < 80; ++round) {
      double fill = 0.0, worst = 0.0;
      for (int i = 0; i < K; ++i) {
        if (live(i, SV_CS)) fill += x0[var(i, SV_CS)];
        if (live(i, SV_CR)) fill -= x0[var(i, SV_CR)];
        worst = std::max(worst, fill);
      }
      if (worst < 0.9 * Bmax) break;
      for (int i = 0; i < K; ++i) {
        if (live(i, SV_CS)) x0[var(i, SV_CS)] *= 0.5;
        if (live(i, SV_CR)) x0[var(i, SV_CR)] *= 0.5;
      }
    }
  }
  ap.x0 = x0;
  return ap;
}

// ---------------------------------------------------------------------------
// two relays
// ---------------------------------------------------------------------------

AssembledProgram assemble_two(const Scenario& s) {
  const int K = s.profile.epoch_count();
  const auto& tau = s.profile.epoch_durations;
  const double a1 = s.gains.sr1, a2 = s.gains.sr2, b1 = s.gains.r1d, b2 = s.gains.r2d;
  const double Bmax = s.buffer_capacity;
  const bool use_bc = s.mode_set.contains(Mode::Broadcast);
  const bool use_mac = s.mode_set.contains(Mode::MultiAccess);
  const auto cumS = cumsum(s.profile.arrivals_s);
  const auto cum1 = cumsum(s.profile.arrivals_r1);
  const auto cum2 = cumsum(s.profile.arrivals_r2);
  const int i0s = first_positive(cumS);
  const int i01 = first_positive(cum1);
  const int i02 = first_positive(cum2);

  AssembledProgram ap;
  ap.epochs = K;
  ap.full_n = TV_COUNT * K;
  ap.var_of_full.assign(ap.full_n, -1);
  auto fi = [&](int i, int k) { return TV_COUNT * i + k; };

  std::vector<bool> pinned(ap.full_n, false);
  for (int i = 0; i < K; ++i) {
    if (!use_bc) {
      for (int k : {TV_LB, TV_CBR1, TV_CBR2}) pinned[fi(i, k)] = true;
    }
    if (!use_mac) {
      for (int k : {TV_LM, TV_CR1M, TV_CR2M, TV_ER1M, TV_ER2M}) pinned[fi(i, k)] = true;
    }
    if (i < i0s) {
      for (int k : {TV_CBR1, TV_CBR2, TV_CSI, TV_CSII}) pinned[fi(i, k)] = true;
    }
    if (i < std::max(i0s, i01)) {
      for (int k : {TV_CR1II, TV_CR1M, TV_ER1M}) pinned[fi(i, k)] = true;
    }
    if (i < std::max(i0s, i02)) {
      for (int k : {TV_CR2I, TV_CR2M, TV_ER2M}) pinned[fi(i, k)] = true;
    }
  }
  if (Bmax == 0.0) {
    // per-epoch balance: a fully pinned side pins the other
    for (int i = 0; i < K; ++i) {
      auto allpin = [&](std::initializer_list<int> ks) {
        for (int k : ks) {
          if (!pinned[fi(i, k)]) return false;
        }
        return true;
      };
      if (allpin({TV_CR1II, TV_CR1M})) pinned[fi(i, TV_CBR1)] = pinned[fi(i, TV_CSI)] = true;
      if (allpin({TV_CBR1, TV_CSI})) pinned[fi(i, TV_CR1II)] = pinned[fi(i, TV_CR1M)] = true;
      if (allpin({TV_CR2I, TV_CR2M})) pinned[fi(i, TV_CBR2)] = pinned[fi(i, TV_CSII)] = true;
      if (allpin({TV_CBR2, TV_CSII})) pinned[fi(i, TV_CR2I)] = pinned[fi(i, TV_CR2M)] = true;
      if (pinned[fi(i, TV_CR1M)] && pinned[fi(i, TV_CR2M)]) {
        pinned[fi(i, TV_ER1M)] = pinned[fi(i, TV_ER2M)] = true;
      }
    }
  }
  int n = 0;
  for (int j = 0; j < ap.full_n; ++j) {
    if (!pinned[j]) ap.var_of_full[j] = n++;
  }
  ap.degenerate = true;
  for (int i = 0; i < K; ++i) {
    for (int k : {TV_CR1II, TV_CR2I, TV_CR1M, TV_CR2M}) {
      if (!pinned[fi(i, k)]) ap.degenerate = false;
    }
  }
  Program& p = ap.prog;
  p.resize(n);
  if (ap.degenerate) return ap;

  auto var = [&](int i, int k) { return ap.var_of_full[fi(i, k)]; };
  auto live = [&](int i, int k) { return ap.var_of_full[fi(i, k)] >= 0; };

  const double T = s.profile.deadline();
  const double rs1 = std::log1p(a1 * cumS.back() / T);
  const double rs2 = std::log1p(a2 * cumS.back() / T);
  const double rr1 = std::log1p(b1 * cum1.back() / T);
  const double rr2 = std::log1p(b2 * cum2.back() / T);
  for (int i = 0; i < K; ++i) {
    for (int k : {TV_LB, TV_LI, TV_LII, TV_LM}) {
      if (!live(i, k)) continue;
      p.lb[var(i, k)] = kLFloor;
      p.xscale[var(i, k)] = tau[i];
    }
    auto setc = [&](int k, double r) {
      if (live(i, k)) p.xscale[var(i, k)] = std::max(0.1, tau[i] * r);
    };
    setc(TV_CSI, rs1);
    setc(TV_CBR1, rs1);
    setc(TV_CSII, rs2);
    setc(TV_CBR2, rs2);
    setc(TV_CR1II, rr1);
    setc(TV_CR1M, rr1);
    setc(TV_CR2I, rr2);
    setc(TV_CR2M, rr2);
    if (live(i, TV_ER1M)) p.xscale[var(i, TV_ER1M)] = std::max(cum1.back(), 1e-3);
    if (live(i, TV_ER2M)) p.xscale[var(i, TV_ER2M)] = std::max(cum2.back(), 1e-3);
    for (int k : {TV_CR1II, TV_CR2I, TV_CR1M, TV_CR2M}) {
      if (live(i, k)) p.w[var(i, k)] = 1.0;
    }
  }

  const double data_scale = std::max(0.1, std::max(rs1, rs2) * T);
  for (int i = 0; i < K; ++i) {
    if (live(i, TV_ER1M)) {
      ConstraintRow r;
      r.family = RowFamily::MacR1;
      r.epoch = i;
      r.lin.push_back({var(i, TV_CR1M), 1.0});
      r.plog.push_back({var(i, TV_LM), var(i, TV_ER1M), b1, -1, 0.0});
      p.rows.push_back(std::move(r));
    }
    if (live(i, TV_ER2M)) {
      ConstraintRow r;
      r.family = RowFamily::MacR2;
      r.epoch = i;
      r.lin.push_back({var(i, TV_CR2M), 1.0});
      r.plog.push_back({var(i, TV_LM), var(i, TV_ER2M), b2, -1, 0.0});
      p.rows.push_back(std::move(r));
    }
    if (live(i, TV_ER1M) || live(i, TV_ER2M)) {
      ConstraintRow r;
      r.family = RowFamily::MacSum;
      r.epoch = i;
      PerspLogTerm t{var(i, TV_LM), -1, 0.0, -1, 0.0};
      if (live(i, TV_ER1M)) {
        r.lin.push_back({var(i, TV_CR1M), 1.0});
        t.e1 = var(i, TV_ER1M);
        t.a1 = b1;
      }
      if (live(i, TV_ER2M)) {
        r.lin.push_back({var(i, TV_CR2M), 1.0});
        if (t.e1 < 0) {
          t.e1 = var(i, TV_ER2M);
          t.a1 = b2;
        } else {
          t.e2 = var(i, TV_ER2M);
          t.a2 = b2;
        }
      }
      r.plog.push_back(t);
      p.rows.push_back(std::move(r));
    }
    if (i >= i0s) {
      ConstraintRow r;
      r.family = RowFamily::EnergyS;
      r.epoch = i;
      r.constant = -cumS[i];
      r.scale = std::max(cumS[i], 1e-6);
      for (int j = 0; j <= i; ++j) {
        if (live(j, TV_CSI)) r.pexp.push_back({var(j, TV_LI), var(j, TV_CSI), -1, 1.0 / a1});
        if (live(j, TV_CSII)) r.pexp.push_back({var(j, TV_LII), var(j, TV_CSII), -1, 1.0 / a2});
        if (live(j, TV_CBR1)) {
          r.pexp.push_back({var(j, TV_LB), var(j, TV_CBR2), -1, 1.0 / a2 - 1.0 / a1});
          r.pexp.push_back({var(j, TV_LB), var(j, TV_CBR1), var(j, TV_CBR2), 1.0 / a1});
        }
      }
      p.rows.push_back(std::move(r));
    }
    {
      ConstraintRow r;
      r.family = RowFamily::EnergyR1;
      r.epoch = i;
      r.constant = -cum1[i];
      r.scale = std::max(cum1[i], 1e-6);
      for (int j = 0; j <= i; ++j) {
        if (live(j, TV_CR1II)) r.pexp.push_back({var(j, TV_LII), var(j, TV_CR1II), -1, 1.0 / b1});
        if (live(j, TV_ER1M)) r.lin.push_back({var(j, TV_ER1M), 1.0});
      }
      if (!r.pexp.empty() || !r.lin.empty()) p.rows.push_back(std::move(r));
    }
    {
      ConstraintRow r;
      r.family = RowFamily::EnergyR2;
      r.epoch = i;
      r.constant = -cum2[i];
      r.scale = std::max(cum2[i], 1e-6);
      for (int j = 0; j <= i; ++j) {
        if (live(j, TV_CR2I)) r.pexp.push_back({var(j, TV_LI), var(j, TV_CR2I), -1, 1.0 / b2});
        if (live(j, TV_ER2M)) r.lin.push_back({var(j, TV_ER2M), 1.0});
      }
      if (!r.pexp.empty() || !r.lin.empty()) p.rows.push_back(std::move(r));
    }
    auto data_row = [&](RowFamily fam, std::initializer_list<int> outs,
                        std::initializer_list<int> ins) {
      ConstraintRow r;
      r.family = fam;
      r.epoch = i;
      r.scale = data_scale;
      bool any_out = false;
      for (int j = 0; j <= i; ++j) {
        for (int k : outs) {
          if (live(j, k)) {
            r.lin.push_back({var(j, k), 1.0});
            any_out = true;
          }
        }
        for (int k : ins) {
          if (live(j, k)) r.lin.push_back({var(j, k), -1.0});
        }
      }
      if (any_out) p.rows.push_back(std::move(r));
    };
    auto buffer_row = [&](RowFamily fam, std::initializer_list<int> ins,
                          std::initializer_list<int> outs) {
      ConstraintRow r;
      r.family = fam;
      r.epoch = i;
      r.constant = -Bmax;
      r.scale = std::max(Bmax, 0.1);
      bool any_in = false;
      for (int j = 0; j <= i; ++j) {
        for (int k : ins) {
          if (live(j, k)) {
            r.lin.push_back({var(j, k), 1.0});
            any_in = true;
          }
        }
        for (int k : outs) {
          if (live(j, k)) r.lin.push_back({var(j, k), -1.0});
        }
      }
      if (any_in) p.rows.push_back(std::move(r));
    };
    if (Bmax > 0.0) {
      data_row(RowFamily::DataR1, {TV_CR1II, TV_CR1M}, {TV_CBR1, TV_CSI});
      data_row(RowFamily::DataR2, {TV_CR2I, TV_CR2M}, {TV_CBR2, TV_CSII});
      if (std::isfinite(Bmax)) {
        buffer_row(RowFamily::BufferR1, {TV_CBR1, TV_CSI}, {TV_CR1II, TV_CR1M});
        buffer_row(RowFamily::BufferR2, {TV_CBR2, TV_CSII}, {TV_CR2I, TV_CR2M});
      }
    } else {
      auto balance = [&](std::initializer_list<int> ins, std::initializer_list<int> outs) {
        EqualityRow eq;
        for (int k : ins) {
          if (live(i, k)) eq.lin.push_back({var(i, k), 1.0});
        }
        for (int k : outs) {
          if (live(i, k)) eq.lin.push_back({var(i, k), -1.0});
        }
        if (!eq.lin.empty()) p.eq_rows.push_back(std::move(eq));
      };
      balance({TV_CBR1, TV_CSI}, {TV_CR1II, TV_CR1M});
      balance({TV_CBR2, TV_CSII}, {TV_CR2I, TV_CR2M});
    }
    ConstraintRow h;
    h.family = RowFamily::HalfDuplex;
    h.epoch = i;
    h.constant = -tau[i];
    h.scale = tau[i];
    for (int k : {TV_LB, TV_LI, TV_LII, TV_LM}) {
      if (live(i, k)) h.lin.push_back({var(i, k), 1.0});
    }
    p.rows.push_back(std::move(h));
  }

  // strictly interior start
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < K; ++i) {
    int nact = 0;
    for (int k : {TV_LB, TV_LI, TV_LII, TV_LM}) {
      if (live(i, k)) ++nact;
    }
    for (int k : {TV_LB, TV_LI, TV_LII, TV_LM}) {
      if (live(i, k)) x0[var(i, k)] = 0.9 * tau[i] / nact;
    }
    if (live(i, TV_ER1M)) x0[var(i, TV_ER1M)] = 0.05 * cum1.back() * tau[i] / T + 1e-9;
    if (live(i, TV_ER2M)) x0[var(i, TV_ER2M)] = 0.05 * cum2.back() * tau[i] / T + 1e-9;
  }
  auto used_s = [&](int upto) {
    double u = 0.0;
    for (int j = 0; j <= upto; ++j) {
      if (live(j, TV_CSI)) u += persp_energy(x0[var(j, TV_LI)], x0[var(j, TV_CSI)], a1);
      if (live(j, TV_CSII)) u += persp_energy(x0[var(j, TV_LII)], x0[var(j, TV_CSII)], a2);
      if (live(j, TV_CBR1)) {
        u += bc_energy(x0[var(j, TV_LB)], x0[var(j, TV_CBR1)], x0[var(j, TV_CBR2)], s.gains);
      }
    }
    return u;
  };
  auto used_r = [&](int upto, int cvar, int lvar, int evar, double beta) {
    double u = 0.0;
    for (int j = 0; j <= upto; ++j) {
      if (live(j, cvar)) u += persp_energy(x0[var(j, lvar)], x0[var(j, cvar)], beta);
      if (live(j, evar)) u += x0[var(j, evar)];
    }
    return u;
  };
  for (int round = 0; round < 60; ++round) {
    bool ok = true;
    for (int i = 0; i < K; ++i) {
      if (used_r(i, TV_CR1II, TV_LII, TV_ER1M, b1) > 0.35 * std::max(cum1[i], 0.0) && i >= i01)
        ok = false;
      if (used_r(i, TV_CR2I, TV_LI, TV_ER2M, b2) > 0.35 * std::max(cum2[i], 0.0) && i >= i02)
        ok = false;
    }
    if (ok) break;
    for (int i = 0; i < K; ++i) {
      for (int k : {TV_ER1M, TV_ER2M}) {
        if (live(i, k)) x0[var(i, k)] *= 0.5;
      }
    }
  }
  double th = 0.5;
  for (int round = 0; round < 60; ++round) {
    for (int i = 0; i < K; ++i) {
      auto setc = [&](int k, int lvar, double r) {
        if (live(i, k)) x0[var(i, k)] = th * x0[var(i, lvar)] * std::max(r, 0.05);
      };
      setc(TV_CSI, TV_LI, rs1);
      setc(TV_CSII, TV_LII, rs2);
      setc(TV_CBR1, TV_LB, rs1 * 0.5);
      setc(TV_CBR2, TV_LB, rs2 * 0.5);
    }
    bool ok = true;
    for (int i = i0s; i < K; ++i) {
      if (used_s(i) > 0.6 * cumS[i]) ok = false;
    }
    if (ok) break;
    th *= 0.5;
  }
  th = 1.0;
  for (int round = 0; round < 60; ++round) {
    double o1 = 0.0, o2 = 0.0, in1 = 0.0, in2 = 0.0;
    for (int i = 0; i < K; ++i) {
      for (int k : {TV_CBR1, TV_CSI}) {
        if (live(i, k)) in1 += x0[var(i, k)];
      }
      for (int k : {TV_CBR2, TV_CSII}) {
        if (live(i, k)) in2 += x0[var(i, k)];
      }
      auto setout = [&](int k, double cap, double& acc) {
        if (!live(i, k)) return;
        x0[var(i, k)] = std::max(cap, 0.0);
        acc += x0[var(i, k)];
      };
      int n1 = (live(i, TV_CR1II) ? 1 : 0) + (live(i, TV_CR1M) ? 1 : 0);
      if (n1 > 0) {
        const double avail = std::max(in1 - o1, 0.0);
        double cap = th * 0.4 * avail / n1;
        if (live(i, TV_CR1II)) {
          setout(TV_CR1II, std::min(cap, th * x0[var(i, TV_LII)] * std::max(rr1, 0.05)), o1);
        }
        if (live(i, TV_CR1M)) {
          const double lm = x0[var(i, TV_LM)];
          setout(TV_CR1M,
                 std::min(cap, 0.5 * lm * std::log1p(b1 * x0[var(i, TV_ER1M)] / lm)), o1);
        }
      }
      int n2 = (live(i, TV_CR2I) ? 1 : 0) + (live(i, TV_CR2M) ? 1 : 0);
      if (n2 > 0) {
        const double avail = std::max(in2 - o2, 0.0);
        double cap = th * 0.4 * avail / n2;
        if (live(i, TV_CR2I)) {
          setout(TV_CR2I, std::min(cap, th * x0[var(i, TV_LI)] * std::max(rr2, 0.05)), o2);
        }
        if (live(i, TV_CR2M)) {
          const double lm = x0[var(i, TV_LM)];
          setout(TV_CR2M,
                 std::min(cap, 0.5 * lm * std::log1p(b2 * x0[var(i, TV_ER2M)] / lm)), o2);
        }
      }
    }
    bool ok = true;
    for (int i = 0; i < K; ++i) {
      if (i >= i01 && used_r(i, TV_CR1II, TV_LII, TV_ER1M, b1) > 0.7 * cum1[i]) ok = false;
      if (i >= i02 && used_r(i, TV_CR2I, TV_LI, TV_ER2M, b2) > 0.7 * cum2[i]) ok = false;
    }
    if (ok) break;
    th *= 0.5;
  }
  if (Bmax == 0.0) {
    // balance per epoch exactly: scale outflows onto the inflow sum
    for (int i = 0; i < K; ++i) {
      auto pairfix = [&](std::initializer_list<int> ins, std::initializer_list<int> outs) {
        double si = 0.0, so = 0.0;
        for (int k : ins) {
          if (live(i, k)) si += x0[var(i, k)];
        }
        for (int k : outs) {
          if (live(i, k)) so += x0[var(i, k)];
        }
        if (so <= 0.0) return;
        const double target = std::min(si, so);
        for (int k : outs) {
          if (live(i, k)) x0[var(i, k)] *= target / so;
        }
        if (si > 0.0) {
          for (int k : ins) {
            if (live(i, k)) x0[var(i, k)] *= target / si;
          }
        }
      };
      pairfix({TV_CBR1, TV_CSI}, {TV_CR1II, TV_CR1M});
      pairfix({TV_CBR2, TV_CSII}, {TV_CR2I, TV_CR2M});
    }
  } else if (std::isfinite(Bmax)) {
    for (int round = 0; round < 80; ++round) {
      double f1 = 0.0, f2 = 0.0, w1 = 0.0, w2 = 0.0;
      for (int i = 0; i < K; ++i) {
        for (int k : {TV_CBR1, TV_CSI}) {
          if (live(i, k)) f1 += x0[var(i, k)];
        }
        for (int k : {TV_CR1II, TV_CR1M}) {
          if (live(i, k)) f1 -= x0[var(i, k)];
        }
        for (int k : {TV_CBR2, TV_CSII}) {
          if (live(i, k)) f2 += x0[var(i, k)];
        }
        for (int k : {TV_CR2I, TV_CR2M}) {
          if (live(i, k)) f2 -= x0[var(i, k)];
        }
        w1 = std::max(w1, f1);
        w2 = std::max(w2, f2);
      }
      if (w1 < 0.9 * Bmax && w2 < 0.9 * Bmax) break;
      for (int i = 0; i < K; ++i) {
        for (int k : {TV_CBR1, TV_CBR2, TV_CSI, TV_CSII, TV_CR1II, TV_CR2I, TV_CR1M, TV_CR2M}) {
          if (live(i, k)) x0[var(i, k)] *= 0.5;
        }
      }
    }
  }
  ap.x0 = x0;
  return ap;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solution extraction
// ---------------------------------------------------------------------------

namespace {

using detail::AssembledProgram;

double getv(const AssembledProgram& ap, const Eigen::VectorXd& x, int i, int slots, int k) {
  const int ci = ap.var_of_full[slots * i + k];
  return ci >= 0 ? x[ci] : 0.0;
}

void map_duals(const AssembledProgram& ap, const std::vector<double>& lam, DualVariables& d) {
  const int K = ap.epochs;
  auto slot = [&](RowFamily f) -> std::vector<double>* {
    switch (f) {
      case RowFamily::EnergyS: return &d.energy_s;
      case RowFamily::EnergyR1: return &d.energy_r1;
      case RowFamily::EnergyR2: return &d.energy_r2;
      case RowFamily::DataR1: return &d.data_r1;
      case RowFamily::DataR2: return &d.data_r2;
      case RowFamily::BufferR1: return &d.buffer_r1;
      case RowFamily::BufferR2: return &d.buffer_r2;
      case RowFamily::HalfDuplex: return &d.half_duplex;
      case RowFamily::MacR1: return &d.mac_r1;
      case RowFamily::MacR2: return &d.mac_r2;
      case RowFamily::MacSum: return &d.mac_sum;
      default: return nullptr;
    }
  };
  for (size_t i = 0; i < ap.prog.rows.size(); ++i) {
    auto* v = slot(ap.prog.rows[i].family);
    if (!v) continue;
    if (v->empty()) v->assign(K, 0.0);
    (*v)[ap.prog.rows[i].epoch] = lam[i];
  }
}

void snap_mode(std::vector<double>& l, std::initializer_list<std::vector<double>*> tied, int i) {
  if (l[i] < kLSnap) {
    l[i] = 0.0;
    for (auto* v : tied) (*v)[i] = 0.0;
  }
}

// Snapping floor-sitting modes can remove a sliver of buffer inflow that the
// barrier point relied on. Re-clip the buffer chain so causality and capacity
// hold exactly; the adjustments are at the snap scale (~1e-8 nats).
void repair_buffer_chain(std::vector<std::vector<double>*> ins, std::vector<std::vector<double>*> outs,
                         double Bmax) {
  const int K = int(ins[0]->size());
  for (int pass = 0; pass < 3; ++pass) {
    double in_cum = 0.0, out_cum = 0.0;
    for (int i = 0; i < K; ++i) {
      double out_i = 0.0;
      for (auto* v : outs) out_i += (*v)[i];
      if (std::isfinite(Bmax)) {
        double in_i = 0.0;
        for (auto* v : ins) in_i += (*v)[i];
        const double in_allowed = Bmax + out_cum + out_i - in_cum;
        if (in_i > in_allowed && in_i > 0.0) {
          const double f = std::max(in_allowed, 0.0) / in_i;
          for (auto* v : ins) (*v)[i] *= f;
        }
      }
      double in_i = 0.0;
      for (auto* v : ins) in_i += (*v)[i];
      in_cum += in_i;
      const double out_allowed = in_cum - out_cum;
      if (out_i > out_allowed && out_i > 0.0) {
        const double f = std::max(out_allowed, 0.0) / out_i;
        for (auto* v : outs) (*v)[i] *= f;
        out_i *= f;
      }
      out_cum += out_i;
    }
  }
}

Solution finish_single(const Scenario& s, AssembledProgram& ap, BarrierResult br,
                       double wall_ms) {
  const int K = ap.epochs;
  SingleRelayPolicy pol;
  pol.l_s.resize(K);
  pol.l_r.resize(K);
  pol.c_s.resize(K);
  pol.c_r.resize(K);
  for (int i = 0; i < K; ++i) {
    pol.l_s[i] = getv(ap, br.x, i, detail::SV_COUNT, detail::SV_LS);
    pol.l_r[i] = getv(ap, br.x, i, detail::SV_COUNT, detail::SV_LR);
    pol.c_s[i] = getv(ap, br.x, i, detail::SV_COUNT, detail::SV_CS);
    pol.c_r[i] = getv(ap, br.x, i, detail::SV_COUNT, detail::SV_CR);
  }
  for (int i = 0; i < K; ++i) {
    snap_mode(pol.l_s, {&pol.c_s}, i);
    snap_mode(pol.l_r, {&pol.c_r}, i);
  }
  repair_buffer_chain({&pol.c_s}, {&pol.c_r}, s.buffer_capacity);
  Solution sol;
  sol.policy = pol;
  sol.throughput = policy_throughput(sol.policy);
  map_duals(ap, br.lam_polished, sol.duals);
  sol.diagnostics.newton_iterations = br.newton_iterations;
  sol.diagnostics.kkt_residual =
      std::max({br.primal_violation, br.stationarity, br.complementarity});
  sol.diagnostics.duality_gap_bound = br.gap_bound;
  sol.diagnostics.barrier_path = br.barrier_path;
  sol.diagnostics.wall_time_ms = wall_ms;
  const double feas = policy_feasibility_violation(sol.policy, s);
  sol.status = (br.converged && feas <= 1e-8) ? SolveStatus::Certified : SolveStatus::Stalled;
  return sol;
}

Solution finish_two(const Scenario& s, AssembledProgram& ap, BarrierResult br, double wall_ms) {
  const int K = ap.epochs;
  TwoRelayPolicy pol;
  auto fill = [&](std::vector<double>& v, int k) {
    v.resize(K);
    for (int i = 0; i < K; ++i) v[i] = getv(ap, br.x, i, detail::TV_COUNT, k);
  };
  fill(pol.l_b, detail::TV_LB);
  fill(pol.l_I, detail::TV_LI);
  fill(pol.l_II, detail::TV_LII);
  fill(pol.l_m, detail::TV_LM);
  fill(pol.c_br1, detail::TV_CBR1);
  fill(pol.c_br2, detail::TV_CBR2);
  fill(pol.c_sI, detail::TV_CSI);
  fill(pol.c_sII, detail::TV_CSII);
  fill(pol.c_r1II, detail::TV_CR1II);
  fill(pol.c_r2I, detail::TV_CR2I);
  fill(pol.c_r1m, detail::TV_CR1M);
  fill(pol.c_r2m, detail::TV_CR2M);
  fill(pol.e_r1m, detail::TV_ER1M);
  fill(pol.e_r2m, detail::TV_ER2M);
  for (int i = 0; i < K; ++i) {
    snap_mode(pol.l_b, {&pol.c_br1, &pol.c_br2}, i);
    snap_mode(pol.l_I, {&pol.c_sI, &pol.c_r2I}, i);
    snap_mode(pol.l_II, {&pol.c_sII, &pol.c_r1II}, i);
    snap_mode(pol.l_m, {&pol.c_r1m, &pol.c_r2m, &pol.e_r1m, &pol.e_r2m}, i);
  }
  repair_buffer_chain({&pol.c_br1, &pol.c_sI}, {&pol.c_r1II, &pol.c_r1m}, s.buffer_capacity);
  repair_buffer_chain({&pol.c_br2, &pol.c_sII}, {&pol.c_r2I, &pol.c_r2m}, s.buffer_capacity);
  Solution sol;
  sol.policy = pol;
  sol.throughput = policy_throughput(sol.policy);
  map_duals(ap, br.lam_polished, sol.duals);
  sol.diagnostics.newton_iterations = br.newton_iterations;
  sol.diagnostics.kkt_residual =
      std::max({br.primal_violation, br.stationarity, br.complementarity});
  sol.diagnostics.duality_gap_bound = br.gap_bound;
  sol.diagnostics.barrier_path = br.barrier_path;
  sol.diagnostics.wall_time_ms = wall_ms;
  const double feas = policy_feasibility_violation(sol.policy, s);
  sol.status = (br.converged && feas <= 1e-8) ? SolveStatus::Certified : SolveStatus::Stalled;
  return sol;
}

Solution degenerate_solution(const Scenario& s) {
  const int K = s.profile.epoch_count();
  Solution sol;
  if (s.relay_count == 1) {
    SingleRelayPolicy p;
    p.l_s.assign(K, 0.0);
    p.l_r.assign(K, 0.0);
    p.c_s.assign(K, 0.0);
    p.c_r.assign(K, 0.0);
    sol.policy = p;
  } else {
    TwoRelayPolicy p;
    for (auto* v : {&p.l_b, &p.l_I, &p.l_II, &p.l_m, &p.c_br1, &p.c_br2, &p.c_sI, &p.c_sII,
                    &p.c_r1II, &p.c_r2I, &p.c_r1m, &p.c_r2m, &p.e_r1m, &p.e_r2m}) {
      v->assign(K, 0.0);
    }
    sol.policy = p;
  }
  sol.throughput = 0.0;
  sol.status = SolveStatus::Degenerate;
  return sol;
}

}  // namespace

Solution solve_single_relay(const Scenario& s) {
  if (!s.validated) throw SolverError("scenario must be validated first");
  if (s.relay_count != 1) throw SolverError("solve_single_relay: relay_count must be 1");
  const auto t0 = std::chrono::steady_clock::now();
  auto ap = detail::assemble_single(s);
  if (ap.degenerate) return degenerate_solution(s);
  auto br = solve_barrier(ap.prog, ap.x0);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return finish_single(s, ap, std::move(br), ms);
}

Solution solve_two_relay(const Scenario& s) {
  if (!s.validated) throw SolverError("scenario must be validated first");
  if (s.relay_count != 2) throw SolverError("solve_two_relay: relay_count must be 2");
  const auto t0 = std::chrono::steady_clock::now();
  auto ap = detail::assemble_two(s);
  if (ap.degenerate) return degenerate_solution(s);
  auto br = solve_barrier(ap.prog, ap.x0);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return finish_two(s, ap, std::move(br), ms);
}

Solution solve(const Scenario& s) {
  return s.relay_count == 1 ? solve_single_relay(s) : solve_two_relay(s);
}

double policy_throughput(const Policy& p) {
  if (const auto* sp = std::get_if<SingleRelayPolicy>(&p)) {
    double v = 0.0;
    for (double c : sp->c_r) v += c;
    return v;
  }
  const auto& tp = std::get<TwoRelayPolicy>(p);
  double v = 0.0;
  for (int i = 0; i < tp.epoch_count(); ++i) {
    v += tp.c_r1II[i] + tp.c_r2I[i] + tp.c_r1m[i] + tp.c_r2m[i];
  }
  return v;
}

ConsumedEnergy consumed_energy(const Policy& p, const Scenario& s) {
  ConsumedEnergy out;
  if (const auto* sp = std::get_if<SingleRelayPolicy>(&p)) {
    for (int i = 0; i < sp->epoch_count(); ++i) {
      out.s += persp_energy(sp->l_s[i], sp->c_s[i], s.gains.sr());
      out.r1 += persp_energy(sp->l_r[i], sp->c_r[i], s.gains.rd());
    }
    return out;
  }
  const auto& tp = std::get<TwoRelayPolicy>(p);
  for (int i = 0; i < tp.epoch_count(); ++i) {
    out.s += persp_energy(tp.l_I[i], tp.c_sI[i], s.gains.sr1) +
             persp_energy(tp.l_II[i], tp.c_sII[i], s.gains.sr2) +
             bc_energy(tp.l_b[i], tp.c_br1[i], tp.c_br2[i], s.gains);
    out.r1 += persp_energy(tp.l_II[i], tp.c_r1II[i], s.gains.r1d) + tp.e_r1m[i];
    out.r2 += persp_energy(tp.l_I[i], tp.c_r2I[i], s.gains.r2d) + tp.e_r2m[i];
  }
  return out;
}

double policy_feasibility_violation(const Policy& p, const Scenario& s) {
  const int K = s.profile.epoch_count();
  const auto& tau = s.profile.epoch_durations;
  const auto cumS = cumsum(s.profile.arrivals_s);
  const auto cum1 = cumsum(s.profile.arrivals_r1);
  const auto cum2 = cumsum(s.profile.arrivals_r2);
  const double Bmax = s.buffer_capacity;
  double worst = 0.0;
  auto upd = [&](double violation, double scale) {
    worst = std::max(worst, violation / std::max(scale, 1e-12));
  };
  if (const auto* sp = std::get_if<SingleRelayPolicy>(&p)) {
    double es = 0.0, er = 0.0, ds = 0.0, dr = 0.0;
    for (int i = 0; i < K; ++i) {
      upd(-sp->l_s[i], 1.0);
      upd(-sp->l_r[i], 1.0);
      upd(-sp->c_s[i], 1.0);
      upd(-sp->c_r[i], 1.0);
      es += persp_energy(sp->l_s[i], sp->c_s[i], s.gains.sr());
      er += persp_energy(sp->l_r[i], sp->c_r[i], s.gains.rd());
      ds += sp->c_s[i];
      dr += sp->c_r[i];
      upd(es - cumS[i], std::max(cumS[i], 1.0));
      upd(er - cum1[i], std::max(cum1[i], 1.0));
      upd(dr - ds, std::max(ds, 1.0));
      if (std::isfinite(Bmax)) upd(ds - dr - Bmax, std::max(Bmax, 1.0));
      upd(sp->l_s[i] + sp->l_r[i] - tau[i], tau[i]);
      if (sp->l_s[i] == 0.0) upd(sp->c_s[i], 1.0);
      if (sp->l_r[i] == 0.0) upd(sp->c_r[i], 1.0);
    }
    return worst;
  }
  const auto& tp = std::get<TwoRelayPolicy>(p);
  double es = 0.0, e1 = 0.0, e2 = 0.0, in1 = 0.0, in2 = 0.0, o1 = 0.0, o2 = 0.0;
  for (int i = 0; i < K; ++i) {
    for (const auto* v : {&tp.l_b, &tp.l_I, &tp.l_II, &tp.l_m, &tp.c_br1, &tp.c_br2, &tp.c_sI,
                          &tp.c_sII, &tp.c_r1II, &tp.c_r2I, &tp.c_r1m, &tp.c_r2m, &tp.e_r1m,
                          &tp.e_r2m}) {
      upd(-(*v)[i], 1.0);
    }
    es += persp_energy(tp.l_I[i], tp.c_sI[i], s.gains.sr1) +
          persp_energy(tp.l_II[i], tp.c_sII[i], s.gains.sr2) +
          bc_energy(tp.l_b[i], tp.c_br1[i], tp.c_br2[i], s.gains);
    e1 += persp_energy(tp.l_II[i], tp.c_r1II[i], s.gains.r1d) + tp.e_r1m[i];
    e2 += persp_energy(tp.l_I[i], tp.c_r2I[i], s.gains.r2d) + tp.e_r2m[i];
    in1 += tp.c_br1[i] + tp.c_sI[i];
    in2 += tp.c_br2[i] + tp.c_sII[i];
    o1 += tp.c_r1II[i] + tp.c_r1m[i];
    o2 += tp.c_r2I[i] + tp.c_r2m[i];
    upd(es - cumS[i], std::max(cumS[i], 1.0));
    upd(e1 - cum1[i], std::max(cum1[i], 1.0));
    upd(e2 - cum2[i], std::max(cum2[i], 1.0));
    upd(o1 - in1, std::max(in1, 1.0));
    upd(o2 - in2, std::max(in2, 1.0));
    if (std::isfinite(Bmax)) {
      upd(in1 - o1 - Bmax, std::max(Bmax, 1.0));
      upd(in2 - o2 - Bmax, std::max(Bmax, 1.0));
    }
    upd(tp.l_b[i] + tp.l_I[i] + tp.l_II[i] + tp.l_m[i] - tau[i], tau[i]);
    if (tp.l_m[i] > 0.0) {
      const double lm = tp.l_m[i];
      upd(tp.c_r1m[i] - lm * std::log1p(s.gains.r1d * tp.e_r1m[i] / lm), 1.0);
      upd(tp.c_r2m[i] - lm * std::log1p(s.gains.r2d * tp.e_r2m[i] / lm), 1.0);
      upd(tp.c_r1m[i] + tp.c_r2m[i] -
              lm * std::log1p((s.gains.r1d * tp.e_r1m[i] + s.gains.r2d * tp.e_r2m[i]) / lm),
          1.0);
    } else {
      upd(tp.c_r1m[i], 1.0);
      upd(tp.c_r2m[i], 1.0);
      upd(tp.e_r1m[i], 1.0);
      upd(tp.e_r2m[i], 1.0);
    }
    if (tp.l_b[i] == 0.0) {
      upd(tp.c_br1[i], 1.0);
      upd(tp.c_br2[i], 1.0);
    }
    if (tp.l_I[i] == 0.0) {
      upd(tp.c_sI[i], 1.0);
      upd(tp.c_r2I[i], 1.0);
    }
    if (tp.l_II[i] == 0.0) {
      upd(tp.c_sII[i], 1.0);
      upd(tp.c_r1II[i], 1.0);
    }
  }
  return worst;
}

PowerProfile recover_powers(const Solution& sol, const Scenario& s) {
  PowerProfile pp;
  constexpr double kActive = 1e-9;
  auto invert = [](double l, double c, double alpha) -> std::optional<double> {
    if (l <= kActive) {
      if (c > 1e-12) throw InconsistentPolicy("positive data with zero duration");
      return std::nullopt;
    }
    return std::expm1(c / l) / alpha;
  };
  if (const auto* sp = std::get_if<SingleRelayPolicy>(&sol.policy)) {
    const int K = sp->epoch_count();
    pp.p_s.resize(K);
    pp.p_r.resize(K);
    for (int i = 0; i < K; ++i) {
      pp.p_s[i] = invert(sp->l_s[i], sp->c_s[i], s.gains.sr());
      pp.p_r[i] = invert(sp->l_r[i], sp->c_r[i], s.gains.rd());
    }
    return pp;
  }
  const auto& tp = std::get<TwoRelayPolicy>(sol.policy);
  const int K = tp.epoch_count();
  for (auto* v : {&pp.p_b, &pp.eta, &pp.p_sI, &pp.p_sII, &pp.p_r1II, &pp.p_r2I, &pp.p_r1m,
                  &pp.p_r2m}) {
    v->resize(K);
  }
  for (int i = 0; i < K; ++i) {
    pp.p_sI[i] = invert(tp.l_I[i], tp.c_sI[i], s.gains.sr1);
    pp.p_r2I[i] = invert(tp.l_I[i], tp.c_r2I[i], s.gains.r2d);
    pp.p_sII[i] = invert(tp.l_II[i], tp.c_sII[i], s.gains.sr2);
    pp.p_r1II[i] = invert(tp.l_II[i], tp.c_r1II[i], s.gains.r1d);
    if (tp.l_b[i] > kActive) {
      const double r1 = tp.c_br1[i] / tp.l_b[i];
      const double r2 = tp.c_br2[i] / tp.l_b[i];
      const double pb = broadcast_power(r1, r2, s.gains);
      pp.p_b[i] = pb;
      pp.eta[i] = pb > 0.0 ? broadcast_split(r1, r2, s.gains) : std::optional<double>{};
    } else if (tp.c_br1[i] > 1e-12 || tp.c_br2[i] > 1e-12) {
      throw InconsistentPolicy("positive broadcast data with zero duration");
    }
    if (tp.l_m[i] > kActive) {
      pp.p_r1m[i] = tp.e_r1m[i] / tp.l_m[i];
      pp.p_r2m[i] = tp.e_r2m[i] / tp.l_m[i];
    } else if (tp.e_r1m[i] > 1e-12 || tp.e_r2m[i] > 1e-12 || tp.c_r1m[i] > 1e-12 ||
               tp.c_r2m[i] > 1e-12) {
      throw InconsistentPolicy("positive multi-access allocation with zero duration");
    }
  }
  return pp;
}

}  // namespace relay_harvest

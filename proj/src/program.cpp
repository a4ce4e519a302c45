#include "relay_harvest/program.hpp"

#include <cmath>
#include <limits>

namespace relay_harvest {

namespace {
constexpr double kExpGuard = 500.0;
constexpr double kInfty = std::numeric_limits<double>::infinity();
}  // namespace

double ConstraintRow::value(const Eigen::VectorXd& x) const {
  double v = constant;
  for (const auto& t : lin) v += t.coef * x[t.var];
  for (const auto& t : pexp) {
    const double l = x[t.l_var];
    double c = x[t.c1];
    if (t.c2 >= 0) c += x[t.c2];
    if (l <= 0.0) {
      if (c > 0.0) return kInfty;
      continue;
    }
    const double u = c / l;
    if (u > kExpGuard) return kInfty;
    v += t.coef * l * std::expm1(u);
  }
  for (const auto& t : plog) {
    const double l = x[t.l_var];
    if (l <= 0.0) continue;
    double s = t.a1 * x[t.e1];
    if (t.e2 >= 0) s += t.a2 * x[t.e2];
    v -= l * std::log1p(s / l);
  }
  return v;
}

void ConstraintRow::add_gradient(const Eigen::VectorXd& x, double weight,
                                 Eigen::VectorXd& g) const {
  for (const auto& t : lin) g[t.var] += weight * t.coef;
  for (const auto& t : pexp) {
    const double l = x[t.l_var];
    double c = x[t.c1];
    if (t.c2 >= 0) c += x[t.c2];
    const double u = c / l;
    const double eu = std::exp(u);
    const double dc = weight * t.coef * eu;
    g[t.c1] += dc;
    if (t.c2 >= 0) g[t.c2] += dc;
    g[t.l_var] += weight * t.coef * (std::expm1(u) - u * eu);
  }
  for (const auto& t : plog) {
    const double l = x[t.l_var];
    double s = t.a1 * x[t.e1];
    if (t.e2 >= 0) s += t.a2 * x[t.e2];
    const double v = s / l;
    const double inv = 1.0 / (1.0 + v);
    g[t.e1] -= weight * t.a1 * inv;
    if (t.e2 >= 0) g[t.e2] -= weight * t.a2 * inv;
    g[t.l_var] -= weight * (std::log1p(v) - v * inv);
  }
}

void ConstraintRow::add_hessian(const Eigen::VectorXd& x, double weight,
                                Eigen::MatrixXd& H) const {
  // Every nonlinear term has a rank-one Hessian (e^u/l) vv^T or
  // (1/(l(1+v)^2)) ww^T.
  for (const auto& t : pexp) {
    const double l = x[t.l_var];
    double c = x[t.c1];
    if (t.c2 >= 0) c += x[t.c2];
    const double u = c / l;
    const double s = weight * t.coef * std::exp(u) / l;
    int idx[3] = {t.c1, t.c2, t.l_var};
    double vec[3] = {1.0, 1.0, -u};
    for (int a = 0; a < 3; ++a) {
      if (idx[a] < 0) continue;
      for (int b = 0; b < 3; ++b) {
        if (idx[b] < 0) continue;
        H(idx[a], idx[b]) += s * vec[a] * vec[b];
      }
    }
  }
  for (const auto& t : plog) {
    const double l = x[t.l_var];
    double s = t.a1 * x[t.e1];
    if (t.e2 >= 0) s += t.a2 * x[t.e2];
    const double v = s / l;
    const double inv = 1.0 / (1.0 + v);
    const double sc = weight * inv * inv / l;
    int idx[3] = {t.e1, t.e2, t.l_var};
    double vec[3] = {t.a1, t.a2, -v};
    for (int a = 0; a < 3; ++a) {
      if (idx[a] < 0) continue;
      for (int b = 0; b < 3; ++b) {
        if (idx[b] < 0) continue;
        H(idx[a], idx[b]) += sc * vec[a] * vec[b];
      }
    }
  }
}

namespace {

double barrier_value(const Program& p, const Eigen::VectorXd& x, double t) {
  double v = -t * p.w.dot(x);
  for (const auto& row : p.rows) {
    const double s = -row.value(x);
    if (!(s > 0.0)) return kInfty;
    v -= std::log(s);
  }
  for (int j = 0; j < p.n; ++j) {
    const double d = x[j] - p.lb[j];
    if (!(d > 0.0)) return kInfty;
    v -= std::log(d);
  }
  return v;
}

// Box-constrained least squares by active-set pruning/clamping: solve the
// unconstrained fit on the free set, drop the most negative coordinate or
// clamp the worst upper-bound violator, repeat. Candidates come from
// central-path duals, so true actives fit positive and the caps keep
// complementarity (cap_i ~ 100 * mu / slack_i).
Eigen::VectorXd boxed_ls(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& cap, int max_iter) {
  const int m = int(G.cols());
  std::vector<int> state(m, 0);  // 0 free, -1 dropped, +1 clamped at cap
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(m);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> free;
    Eigen::VectorXd y_eff = y;
    for (int j = 0; j < m; ++j) {
      if (state[j] == 0) {
        free.push_back(j);
      } else if (state[j] > 0) {
        y_eff -= cap[j] * G.col(j);
      }
    }
    Eigen::VectorXd z;
    if (!free.empty()) {
      Eigen::MatrixXd Gp(G.rows(), free.size());
      for (size_t c = 0; c < free.size(); ++c) Gp.col(c) = G.col(free[c]);
      Eigen::MatrixXd N = Gp.transpose() * Gp;
      N.diagonal().array() += 1e-12 * (1.0 + N.diagonal().maxCoeff());
      z = N.ldlt().solve(Gp.transpose() * y_eff);
    }
    int worst_neg = -1, worst_hi = -1;
    double neg_v = -1e-10, hi_v = 0.0;
    for (size_t c = 0; c < free.size(); ++c) {
      if (z[c] < neg_v) {
        neg_v = z[c];
        worst_neg = free[c];
      }
      const double over = z[c] - cap[free[c]];
      if (over > hi_v) {
        hi_v = over;
        worst_hi = free[c];
      }
    }
    if (worst_neg < 0 && worst_hi < 0) {
      sol.setZero();
      for (size_t c = 0; c < free.size(); ++c) {
        sol[free[c]] = std::clamp(z[c], 0.0, cap[free[c]]);
      }
      for (int j = 0; j < m; ++j) {
        if (state[j] > 0) sol[j] = cap[j];
      }
      return sol;
    }
    if (worst_neg >= 0) {
      state[worst_neg] = -1;
    } else {
      state[worst_hi] = +1;
    }
  }
  return sol;
}

}  // namespace

BarrierResult solve_barrier(const Program& prog, const Eigen::VectorXd& x0,
                            const BarrierOptions& opts) {
  const int n = prog.n;
  const Eigen::VectorXd& D = prog.xscale;
  BarrierResult res;
  res.x = x0;
  Eigen::VectorXd& x = res.x;

  const int m_eq = int(prog.eq_rows.size());
  Eigen::MatrixXd A(m_eq, n);
  A.setZero();
  for (int r = 0; r < m_eq; ++r) {
    for (const auto& t : prog.eq_rows[r].lin) A(r, t.var) = t.coef;
  }

  Eigen::VectorXd g(n), gr(n);
  Eigen::MatrixXd H(n, n);
  double mu = opts.mu_initial;
  bool last_stage_converged = false;
  while (true) {
    const double t = 1.0 / mu;
    bool stage_converged = false;
    for (int it = 0; it < opts.max_newton_per_stage; ++it) {
      ++res.newton_iterations;
      g = -t * prog.w;
      H.setZero();
      bool interior = true;
      for (const auto& row : prog.rows) {
        const double s = -row.value(x);
        if (!(s > 0.0)) {
          interior = false;
          break;
        }
        gr.setZero();
        row.add_gradient(x, 1.0, gr);
        g += gr / s;
        H.noalias() += (gr / s) * (gr / s).transpose();
        row.add_hessian(x, 1.0 / s, H);
      }
      if (!interior) break;  // should not happen; line search preserves interiority
      for (int j = 0; j < n; ++j) {
        const double d = x[j] - prog.lb[j];
        g[j] -= 1.0 / d;
        H(j, j) += 1.0 / (d * d);
      }
      // Newton step in the D-scaled metric.
      Eigen::MatrixXd Hs = D.asDiagonal() * H * D.asDiagonal();
      Eigen::VectorXd gs = D.asDiagonal() * g;
      Eigen::VectorXd dy;
      double reg = 1e-13;
      Eigen::LLT<Eigen::MatrixXd> llt;
      for (;;) {
        Eigen::MatrixXd Hts = Hs;
        Hts.diagonal().array() += reg;
        llt.compute(Hts);
        if (llt.info() == Eigen::Success) break;
        reg *= 100.0;
        if (reg > 1e6) break;
      }
      if (llt.info() != Eigen::Success) break;
      if (m_eq > 0) {
        Eigen::MatrixXd As = A * D.asDiagonal();
        Eigen::VectorXd hi_g = llt.solve(gs);
        Eigen::MatrixXd hi_at = llt.solve(As.transpose());
        Eigen::MatrixXd S = As * hi_at;
        Eigen::VectorXd nu = S.ldlt().solve(-As * hi_g);
        dy = -(hi_g + hi_at * nu);
      } else {
        dy = -llt.solve(gs);
      }
      Eigen::VectorXd dx = D.asDiagonal() * dy;
      const double dec = -g.dot(dx);
      if (dec * 0.5 < opts.decrement_tol * std::max(1.0, t)) {
        stage_converged = true;
        break;
      }
      double alpha = 1.0;
      for (int j = 0; j < n; ++j) {
        if (dx[j] < 0.0) {
          alpha = std::min(alpha, 0.99 * (x[j] - prog.lb[j]) / -dx[j]);
        }
      }
      const double f0 = barrier_value(prog, x, t);
      bool stepped = false;
      while (alpha > 1e-14) {
        Eigen::VectorXd xn = x + alpha * dx;
        if (barrier_value(prog, xn, t) < f0 - 1e-4 * alpha * dec) {
          x = xn;
          stepped = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!stepped) {
        stage_converged = dec * 0.5 < 1e-6 * std::max(1.0, t);
        break;
      }
    }
    if (opts.collect_path) res.barrier_path.push_back(mu);
    if (mu <= opts.mu_final * (1.0 + 1e-9)) {
      last_stage_converged = stage_converged;
      break;
    }
    mu *= opts.mu_factor;
  }
  res.mu = mu;

  const int m = int(prog.rows.size());
  res.lam.resize(m);
  std::vector<double> slack(m);
  for (int i = 0; i < m; ++i) {
    slack[i] = -prog.rows[i].value(x);
    res.lam[i] = mu / slack[i];
  }
  res.bound_duals = Eigen::VectorXd(n);
  for (int j = 0; j < n; ++j) res.bound_duals[j] = mu / (x[j] - prog.lb[j]);

  // Dual polish: refit multipliers of the near-active rows by nonnegative
  // least squares so the reported stationarity defect is meaningful at
  // double precision. Coordinates of variables sitting at their bounds are
  // excluded from the fit: the true optimum has them exactly on the bound
  // (their multiplier absorbs any residual there), and perspective-term
  // gradients evaluated a barrier-width away from that corner carry e^{c/l}
  // factors that are pure noise. Tries a few activity thresholds, keeps best.
  res.lam_polished = res.lam;
  std::vector<bool> incl(n);
  for (int j = 0; j < n; ++j) {
    incl[j] = x[j] - prog.lb[j] > std::max(1e-7, 1e-9 * D[j]);
  }
  // A floor-sitting mode contaminates every variable coupled to it through a
  // perspective term (the c/l ratio is unbounded there), so exclude the whole
  // mode, mirroring the final snap-to-zero.
  for (const auto& row : prog.rows) {
    for (const auto& t : row.pexp) {
      if (x[t.l_var] < 1e-7) {
        incl[t.l_var] = false;
        incl[t.c1] = false;
        if (t.c2 >= 0) incl[t.c2] = false;
      }
    }
    for (const auto& t : row.plog) {
      if (x[t.l_var] < 1e-7) {
        incl[t.l_var] = false;
        incl[t.e1] = false;
        if (t.e2 >= 0) incl[t.e2] = false;
      }
    }
  }
  int n_incl = 0;
  for (int j = 0; j < n; ++j) {
    if (incl[j]) ++n_incl;
  }
  // Candidate rows are picked by the force they exert on included
  // coordinates, lam * max|grad|: a near-degenerate constraint can matter
  // through a steep gradient even when its multiplier is ~1e-9.
  std::vector<Eigen::VectorXd> row_grads(m);
  std::vector<double> row_force(m, 0.0);
  for (int i = 0; i < m; ++i) {
    row_grads[i].setZero(n);
    prog.rows[i].add_gradient(x, 1.0, row_grads[i]);
    double gmax = 0.0;
    for (int j = 0; j < n; ++j) {
      if (incl[j]) gmax = std::max(gmax, std::abs(row_grads[i][j]) * D[j]);
    }
    row_force[i] = res.lam[i] * gmax;
  }
  double best_stat = kInfty;
  Eigen::VectorXd lam_best;
  std::vector<int> act_rows_best;
  for (double act_tol : {1e-8, 1e-7, 1e-9, 1e-6}) {
    std::vector<int> act_rows;
    for (int i = 0; i < m; ++i) {
      if (row_force[i] > act_tol) act_rows.push_back(i);
    }
    std::vector<int> bnd_cols;
    for (int j = 0; j < n; ++j) {
      if (incl[j]) bnd_cols.push_back(j);
    }
    const int cols = int(act_rows.size()) + m_eq * 2 + int(bnd_cols.size());
    if (cols == 0) continue;
    Eigen::MatrixXd G(n_incl, cols);
    Eigen::VectorXd y(n_incl);
    {
      int rr = 0;
      for (int j = 0; j < n; ++j) {
        if (incl[j]) y[rr++] = prog.w[j];
      }
    }
    int c = 0;
    auto put_col = [&](const Eigen::VectorXd& full, double sign) {
      int rr = 0;
      for (int j = 0; j < n; ++j) {
        if (incl[j]) G(rr++, c) = sign * full[j];
      }
      ++c;
    };
    Eigen::VectorXd cap(cols);
    for (size_t k = 0; k < act_rows.size(); ++k) cap[k] = 50.0 * res.lam[act_rows[k]];
    for (int r = 0; r < 2 * m_eq; ++r) cap[act_rows.size() + r] = kInfty;
    // bound multipliers for every included coordinate, capped so that
    // complementarity stays at the 50*mu level
    for (size_t k = 0; k < bnd_cols.size(); ++k) {
      cap[act_rows.size() + 2 * m_eq + k] = 50.0 * res.bound_duals[bnd_cols[k]];
    }
    for (int i : act_rows) put_col(row_grads[i], 1.0);
    for (int r = 0; r < m_eq; ++r) {  // equality duals are free: +/- columns
      gr.setZero();
      for (const auto& tm : prog.eq_rows[r].lin) gr[tm.var] = tm.coef;
      put_col(gr, 1.0);
      put_col(gr, -1.0);
    }
    for (int j : bnd_cols) {
      gr.setZero();
      gr[j] = -1.0;
      put_col(gr, 1.0);
    }
    Eigen::VectorXd msol = boxed_ls(G, y, cap, 2 * cols + 8);
    Eigen::VectorXd r = G * msol - y;
    // per-coordinate scaling by the largest participating gradient entry:
    // the defect is meaningful relative to the forces acting on a coordinate
    double stat = 0.0;
    {
      Eigen::VectorXd den = Eigen::VectorXd::Ones(n);
      for (int i : act_rows) {
        for (int j = 0; j < n; ++j) {
          den[j] = std::max(den[j], std::abs(row_grads[i][j]) * D[j]);
        }
      }
      int rr = 0;
      for (int j = 0; j < n; ++j) {
        if (incl[j]) {
          stat = std::max(stat, std::abs(r[rr++]) * D[j] / den[j]);
        }
      }
    }
    if (stat < best_stat) {
      best_stat = stat;
      lam_best = msol;
      act_rows_best = act_rows;
    }
  }
  if (lam_best.size() > 0) {
    int c = 0;
    for (int i : act_rows_best) res.lam_polished[i] = lam_best[c++];
    res.eq_duals.assign(m_eq, 0.0);
    for (int r = 0; r < m_eq; ++r) {
      res.eq_duals[r] = lam_best[c] - lam_best[c + 1];
      c += 2;
    }
  }
  res.stationarity = best_stat;
  double comp = 0.0;
  for (int i = 0; i < m; ++i) comp = std::max(comp, res.lam_polished[i] * slack[i]);
  res.complementarity = comp;
  double pv = 0.0;
  for (int i = 0; i < m; ++i) {
    pv = std::max(pv, prog.rows[i].value(x) / prog.rows[i].scale);
  }
  res.primal_violation = std::max(pv, 0.0);
  res.gap_bound = (m + n) * mu;
  res.converged = last_stage_converged && res.primal_violation <= 1e-8 &&
                  res.stationarity <= 1e-7 && res.complementarity <= 1e-7;
  return res;
}

}  // namespace relay_harvest

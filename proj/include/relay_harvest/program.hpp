#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace relay_harvest {

// Internal standard form shared by the two problem builders:
//   maximize w.x   s.t.  g_i(x) <= 0,  x_j >= lb_j,  A_eq x = b_eq,
// where every g_i is a sum of linear terms, perspective-exponential terms
// coef * l * (e^{(c1+c2)/l} - 1), and negated perspective-log terms
// -l * ln(1 + a1 e1/l + a2 e2/l).  All of these have closed-form gradients
// and rank-one Hessians.

enum class RowFamily : uint8_t {
  EnergyS,
  EnergyR1,
  EnergyR2,
  DataR1,
  DataR2,
  BufferR1,
  BufferR2,
  HalfDuplex,
  MacR1,
  MacR2,
  MacSum,
  Generic,
};

struct LinTerm {
  int var;
  double coef;
};

struct PerspExpTerm {
  int l_var;
  int c1;
  int c2 = -1;  // optional second numerator variable (broadcast)
  double coef;  // 1/alpha or the broadcast combination weights
};

struct PerspLogTerm {
  int l_var;
  int e1;
  double a1;
  int e2 = -1;
  double a2 = 0.0;
};

struct ConstraintRow {
  double constant = 0.0;
  double scale = 1.0;  // natural magnitude, residual reporting only
  RowFamily family = RowFamily::Generic;
  int epoch = -1;
  std::vector<LinTerm> lin;
  std::vector<PerspExpTerm> pexp;
  std::vector<PerspLogTerm> plog;

  double value(const Eigen::VectorXd& x) const;
  void add_gradient(const Eigen::VectorXd& x, double weight, Eigen::VectorXd& g) const;
  void add_hessian(const Eigen::VectorXd& x, double weight, Eigen::MatrixXd& H) const;
};

struct EqualityRow {
  std::vector<LinTerm> lin;
  double rhs = 0.0;
};

struct Program {
  int n = 0;
  Eigen::VectorXd w;       // objective: maximize w.x
  Eigen::VectorXd lb;      // variable lower bounds
  Eigen::VectorXd xscale;  // diagonal preconditioner hints
  std::vector<ConstraintRow> rows;
  std::vector<EqualityRow> eq_rows;

  explicit Program(int nvars = 0) { resize(nvars); }
  void resize(int nvars) {
    n = nvars;
    w = Eigen::VectorXd::Zero(n);
    lb = Eigen::VectorXd::Zero(n);
    xscale = Eigen::VectorXd::Ones(n);
  }
};

struct BarrierOptions {
  double mu_initial = 1.0;
  double mu_final = 1e-9;
  double mu_factor = 0.1;
  int max_newton_per_stage = 100;
  double decrement_tol = 1e-12;
  bool collect_path = true;
};

struct BarrierResult {
  Eigen::VectorXd x;
  std::vector<double> lam;           // central-path duals mu / slack
  std::vector<double> lam_polished;  // least-squares refit on the active set
  Eigen::VectorXd bound_duals;
  std::vector<double> eq_duals;
  double mu = 0.0;
  int newton_iterations = 0;
  bool converged = false;
  double stationarity = 0.0;    // with polished duals, scaled variables
  double complementarity = 0.0;
  double primal_violation = 0.0;
  double gap_bound = 0.0;       // (#rows + #bounds) * mu
  std::vector<double> barrier_path;
};

/// Primal log-barrier interior point method; deterministic for identical
/// inputs. x0 must be strictly feasible (and satisfy the equality rows).
BarrierResult solve_barrier(const Program& prog, const Eigen::VectorXd& x0,
                            const BarrierOptions& opts = {});

}  // namespace relay_harvest

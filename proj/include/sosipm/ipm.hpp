#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sosipm/flops.hpp"
#include "sosipm/polyspace.hpp"
#include "sosipm/types.hpp"

namespace sosipm {

// Conic program data for Eq-(SOS) form:
//   primal  min <c,x>  s.t. Ax = b, x in Sigma_{n,2d}
//   dual    max <y,b>  s.t. A'y + s = c, s in Sigma*_{n,2d}.
struct SosProgram {
  InterpolantBasis basis;
  Matrix A;  // m x U, full row rank, m <= U
  Vector b;  // m
  Vector c;  // U
};

// Throws unless dimensions are consistent, entries are finite, m <= U and A
// has full row rank.
void validate_program(const SosProgram& program);

struct IpmParams {
  // Accuracy parameter in (0,1); drives the eta schedule and the certified
  // output bounds.
  double delta = 1e-3;
  // Newton tolerance. Values above 0.01 print a warning (the slowly-moving
  // bound needs 2*eps_N <= 0.02); values above 0.05 are rejected.
  double eps_N = 0.01;
  // Slack approximation tolerance, must stay below 0.01.
  double eps_S = 0.009;
  // l1 bound on primal feasible solutions. Non-positive selects 10*U.
  double R = 0.0;
  // Disable inverse maintenance: recompute T and N densely from the exact
  // slack every iteration. The lazy tracker still runs for trace parity.
  bool naive_mode = false;
  // Stop early once the certified gap (nu/eta)(1+2 eps_N) reaches delta^2
  // instead of exhausting the fixed budget. Off by default; extension over
  // the fixed schedule.
  bool early_exit = false;
  // Per-iteration dense-oracle diagnostics written into the trace. Slow.
  bool collect_invariants = false;
  // Echoed into reports; all decisions are deterministic regardless.
  std::uint64_t seed = 0;

  double alpha(Index nu) const {
    return eps_N / (20.0 * std::sqrt(double(nu)));
  }
  // t = ceil(40 eps_N^{-1} sqrt(nu) log(nu/delta)).
  Index iteration_budget(Index nu) const;

  void validate() const;
};

struct IterationRecord {
  Index iter = 0;
  double eta = 0.0;
  Index rank_charged = 0;
  bool refresh = false;
  bool rejected_update = false;  // Woodbury rejected, fell back to refresh
  flops::Count flops_maintained = 0;  // maintenance work actually done
  flops::Count flops_naive = 0;       // dense-recompute estimate
  flops::Count flops_common = 0;      // work shared by both paths
  double newton_norm_proxy = 0.0;     // sqrt(g' N g)

  // Filled only when collect_invariants is set; NaN otherwise.
  double centrality = 0.0;      // ||g_eta(y)||_{H(y)^{-1}} entering the step
  double newton_norm = 0.0;     // ||delta_y||_{H(y)}
  double slow_move_lhs = 0.0;   // ||S^{-1/2} S_new S^{-1/2} - I||_F
  double step2_residual = 0.0;
  double n_residual = 0.0;      // maintained N vs dense oracle, relative
  bool sandwich_ok = true;      // N^{-1} approx_{2 eps_S} H(y_new)
  bool slack_approx_ok = true;  // S_tilde approx_{eps_S} S_new, every block
};

struct IpmTrace {
  Index nu = 0;
  double alpha = 0.0;
  Index budget = 0;
  double eta_final = 1.0;
  flops::Count flops_maintained_total = 0;
  flops::Count flops_naive_total = 0;
  flops::Count flops_common_total = 0;
  std::vector<IterationRecord> iterations;

  // Maxima over the run; meaningful only when invariants were collected.
  double max_centrality = 0.0;
  double max_newton_norm = 0.0;
  double max_slow_move_residual = 0.0;
  double max_step2_residual = 0.0;
  double max_n_residual = 0.0;
  bool all_sandwich_ok = true;
  bool all_slack_approx_ok = true;
};

struct Solution {
  Vector y;  // original coordinates
  Vector s;  // c - A'y, exactly
  Vector x;  // primal point mapped back to original coordinates
  double objective = 0.0;             // <c, x>
  double gap_bound = 0.0;             // certified: <c,x> <= OPT + gap_bound
  double feasibility_residual = 0.0;  // ||Ax - b||_1, measured
  double aux_duality_gap = 0.0;       // <c_bar,x_bar> - <b_bar,y_bar>
};

class SolverDivergedError : public SosError {
 public:
  SolverDivergedError(const std::string& what, IpmTrace trace)
      : SosError(what), trace_(std::move(trace)) {}
  const IpmTrace& trace() const { return trace_; }

 private:
  IpmTrace trace_;
};

// g_eta(y) = -eta b + A diag(P (P' diag(s) P)^{-1} P') with s = c - A'y.
// Throws ConeExitError when Lambda(s) is not positive definite.
Vector barrier_gradient(const SosProgram& program, const Vector& y,
                        double eta);

// H(y) = A (P (P' diag(s) P)^{-1} P')^{o2} A'. Dense evaluation; this is the
// refresh-path formula, independent of the incremental updates.
Matrix barrier_hessian_dense(const SosProgram& program, const Vector& y);

// F_eta(y) = -eta <b,y> - log det Lambda(c - A'y).
double barrier_value(const SosProgram& program, const Vector& y, double eta);

// Barrier method with lazy Hessian-inverse maintenance. Builds the auxiliary
// initialization system, follows the central path for the fixed budget, and
// maps the primal point back to the original coordinates.
std::pair<Solution, IpmTrace> solve(const SosProgram& program,
                                    const IpmParams& params);

}  // namespace sosipm

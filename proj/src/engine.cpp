#include "sosipm/engine.hpp"

#include <cmath>
#include <limits>

#include "sosipm/hessian_tracker.hpp"
#include "sosipm/matops.hpp"
#include "sosipm/oracle.hpp"
#include "sosipm/slack_tracker.hpp"

namespace sosipm::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Analytic cost of one dense T/N recompute; must mirror the accounting done
// inside full_refresh so the naive estimate and the executed refresh agree.
flops::Count refresh_cost(const Cone& cone, Index m) {
  const Index U = cone.ambient();
  flops::Count total = 0;
  for (const auto& block : cone.blocks) {
    const Index L = block.P.cols();
    total += flops::spd_inverse(L) + flops::gemm(U, L, L) +
             flops::gemm(U, L, U) + flops::scale(U, U);
    if (!block.unit_weight) total += 2 * flops::scale(U, U);
  }
  total += flops::gemm(m, U, U) + flops::gemm(m, U, m) + flops::spd_inverse(m);
  return total;
}

// Work both modes share each iteration: the Newton step, the new slack
// matrices and the exact-slack gradient.
flops::Count common_cost(const Cone& cone, Index m) {
  const Index U = cone.ambient();
  flops::Count total = flops::gemm(m, m, 1) + flops::gemm(U, m, 1);  // step, s
  for (const auto& block : cone.blocks) {
    const Index L = block.P.cols();
    total += flops::scale(U, L) + flops::gemm(L, U, L);    // Lambda_i(s)
    total += flops::cholesky(L) + flops::cholesky_solve(L, U) +
             flops::scale(U, L);                           // gradient diag
    if (!block.unit_weight) total += flops::scale(U, 1);
  }
  total += flops::gemm(m, U, 1);  // A * gradient map
  return total;
}

double local_norm(const Matrix& H, const Vector& v) {
  return std::sqrt(std::max(0.0, v.dot(H * v)));
}

double inverse_local_norm(const Matrix& H, const Vector& v) {
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw NumericError("engine: dense Hessian is not positive definite");
  }
  return std::sqrt(std::max(0.0, v.dot(llt.solve(v))));
}

}  // namespace

EngineResult run_barrier(const EngineProblem& problem, const IpmParams& params) {
  params.validate();
  const Cone& cone = problem.cone;
  const Matrix& A = problem.A;
  const Vector& b = problem.b;
  const Vector& c = problem.c;
  const Index U = cone.ambient();
  const Index m = A.rows();
  const Index nu = cone.nu();

  const double alpha = params.alpha(nu);
  const Index budget = params.iteration_budget(nu);
  const bool instrument = params.collect_invariants;

  IpmTrace trace;
  trace.nu = nu;
  trace.alpha = alpha;
  trace.budget = budget;
  trace.iterations.reserve(size_t(budget));

  double eta = 1.0;
  Vector y = problem.y0;
  Vector s = c - A.transpose() * y;

  std::vector<Matrix> S_exact = cone_slack(cone, s);
  BlockSlackState tracker;
  tracker.S_tilde = S_exact;
  tracker.eps_S = params.eps_S;
  tracker.ambient_U = U;
  tracker.pool_L = cone.max_block_dim();

  HessianInvState hstate = full_refresh(cone, A, S_exact);
  trace.flops_common_total += hstate.flops;  // both modes pay initialization

  Vector g = -eta * b + A * cone_gradient_map(cone, s);

  const flops::Count naive_per_iter = refresh_cost(cone, m);
  const flops::Count common_per_iter = common_cost(cone, m);

  for (Index iter = 1; iter <= budget; ++iter) {
    IterationRecord rec;
    rec.iter = iter;
    rec.centrality = rec.newton_norm = rec.slow_move_lhs = kNaN;
    rec.step2_residual = rec.n_residual = kNaN;
    try {
      Vector delta_y = -(hstate.N * g);
      rec.newton_norm_proxy = std::sqrt(std::max(0.0, g.dot(hstate.N * g)));

      Matrix H_old;
      std::vector<Matrix> S_old;
      if (instrument) {
        H_old = oracle::dense_hessian(cone, A, s);
        rec.centrality = inverse_local_norm(H_old, g);
        rec.newton_norm = local_norm(H_old, delta_y);
        S_old = S_exact;
      }

      y += delta_y;
      s = c - A.transpose() * y;
      eta *= (1.0 + alpha);
      rec.eta = eta;

      S_exact = cone_slack(cone, s);

      const flops::Count hflops_before = hstate.flops;
      BlockUpdateOutcome outcome = low_rank_update_blocks(S_exact, tracker);
      rec.rank_charged = outcome.rank_charged;
      rec.refresh = outcome.kind == UpdateKind::FullRefresh;

      UpdateDiagnostics diag;
      if (params.naive_mode) {
        // Dense recompute from the exact slack; the lazy tracker above ran
        // only so decision traces match the maintained run.
        hstate = full_refresh(cone, A, S_exact);
        rec.flops_maintained = naive_per_iter;
      } else {
        switch (outcome.kind) {
          case UpdateKind::NoChange:
            rec.flops_maintained = outcome.flops;
            break;
          case UpdateKind::FullRefresh:
            hstate = full_refresh(cone, A, tracker.S_tilde);
            rec.flops_maintained = outcome.flops + refresh_cost(cone, m);
            break;
          case UpdateKind::LowRank: {
            std::vector<BlockUpdate> updates;
            updates.reserve(outcome.factors.size());
            for (auto& fac : outcome.factors) {
              updates.push_back(
                  BlockUpdate{std::move(fac.first), std::move(fac.second)});
            }
            try {
              update_hessian_inv_wsos(hstate, cone, A, updates,
                                      instrument ? &diag : nullptr);
              rec.flops_maintained =
                  outcome.flops + (hstate.flops - hflops_before);
              rec.step2_residual = instrument ? diag.step2_residual : kNaN;
            } catch (const UpdateRejectedError&) {
              // Keep the (still valid) approximate slack, rebuild T and N.
              hstate = full_refresh(cone, A, tracker.S_tilde);
              rec.rejected_update = true;
              rec.refresh = true;
              rec.flops_maintained = outcome.flops + refresh_cost(cone, m);
            }
            break;
          }
        }
      }

      g = -eta * b + A * cone_gradient_map(cone, s);

      rec.flops_naive = naive_per_iter;
      rec.flops_common = common_per_iter;
      trace.flops_maintained_total += rec.flops_maintained;
      trace.flops_naive_total += rec.flops_naive;
      trace.flops_common_total += rec.flops_common;

      if (instrument) {
        // Slowly-moving identity against the pre-step exact slack.
        double acc = 0.0;
        for (size_t i = 0; i < S_old.size(); ++i) {
          Matrix R = psd_sqrt(S_old[i]);
          Eigen::LLT<Matrix> llt(R);
          if (llt.info() != Eigen::Success) {
            throw NumericError("engine: exact slack lost definiteness");
          }
          Matrix W = llt.solve(llt.solve(S_exact[i]).transpose());
          W.diagonal().array() -= 1.0;
          acc += W.squaredNorm();
        }
        rec.slow_move_lhs = std::sqrt(acc);
        trace.max_slow_move_residual =
            std::max(trace.max_slow_move_residual,
                     std::abs(rec.slow_move_lhs - rec.newton_norm) /
                         (1.0 + rec.newton_norm));
        trace.max_centrality = std::max(trace.max_centrality, rec.centrality);
        trace.max_newton_norm =
            std::max(trace.max_newton_norm, rec.newton_norm);
        if (!std::isnan(rec.step2_residual)) {
          trace.max_step2_residual =
              std::max(trace.max_step2_residual, rec.step2_residual);
        }

        rec.slack_approx_ok = true;
        for (size_t i = 0; i < S_exact.size(); ++i) {
          rec.slack_approx_ok =
              rec.slack_approx_ok &&
              check_spectral_approx(S_exact[i], tracker.S_tilde[i],
                                    params.eps_S);
        }
        trace.all_slack_approx_ok =
            trace.all_slack_approx_ok && rec.slack_approx_ok;

        Matrix H_new = oracle::dense_hessian(cone, A, s);
        Eigen::LLT<Matrix> nllt(hstate.N);
        if (nllt.info() != Eigen::Success) {
          throw NumericError("engine: maintained N lost definiteness");
        }
        Matrix N_inv = nllt.solve(Matrix::Identity(m, m));
        rec.sandwich_ok = check_spectral_approx(
            H_new, 0.5 * (N_inv + N_inv.transpose()), 2.0 * params.eps_S);
        trace.all_sandwich_ok = trace.all_sandwich_ok && rec.sandwich_ok;

        const std::vector<Matrix>& ref_blocks =
            params.naive_mode ? S_exact : tracker.S_tilde;
        Matrix N_oracle = oracle::dense_hessian_inverse(cone, A, ref_blocks);
        rec.n_residual = (hstate.N - N_oracle).norm() /
                         std::max(N_oracle.norm(), 1e-300);
        trace.max_n_residual = std::max(trace.max_n_residual, rec.n_residual);
      }

    } catch (const ConeExitError& err) {
      // Record the iteration that left the cone, then surface the failure
      // with the partial trace attached.
      rec.eta = eta;
      trace.iterations.push_back(rec);
      trace.eta_final = eta;
      throw SolverDivergedError(std::string("solver diverged: ") + err.what(),
                                std::move(trace));
    }

    trace.iterations.push_back(rec);

    if (params.early_exit &&
        (double(nu) / eta) * (1.0 + 2.0 * params.eps_N) <=
            params.delta * params.delta) {
      break;
    }
  }

  trace.eta_final = eta;
  EngineResult result;
  result.y = std::move(y);
  result.s = std::move(s);
  result.eta_final = eta;
  result.trace = std::move(trace);
  return result;
}

}  // namespace sosipm::detail

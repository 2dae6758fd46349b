#pragma once

#include <utility>
#include <vector>

#include "sosipm/flops.hpp"
#include "sosipm/types.hpp"

namespace sosipm {

enum class UpdateKind { NoChange, LowRank, FullRefresh };

// Result of one lazy-approximation step. For LowRank, V1 V2' is the
// symmetric correction that was added to S_tilde; rank_charged is the
// column count of V1 (and ceil(U/L) on a full refresh, 0 on no change).
struct UpdateOutcome {
  UpdateKind kind = UpdateKind::NoChange;
  Matrix V1;
  Matrix V2;
  Index rank_charged = 0;
  flops::Count flops = 0;
};

// Lazy spectral approximation of one slack matrix.
//
// S_tilde stays an eps_S-spectral approximation of the most recent exact
// slack passed to low_rank_update: every call re-establishes
// check_spectral_approx(S_new, S_tilde, eps_S).
struct SlackState {
  Matrix S_tilde;
  double eps_S = 0.009;
  Index ambient_U = 0;  // U of the program; U/L is the refresh cutoff
  Index basis_L = 0;

  double cutoff() const { return double(ambient_U) / double(basis_L); }
};

// One step of the lazy update:
//   1. eigendecompose Z = (S_new)^{-1/2} S_tilde (S_new)^{-1/2} - I,
//   2. if all |lambda| are below the tolerance, keep S_tilde (NoChange);
//   3. otherwise grow r by doubling while the sorted |lambda| stay above the
//      tolerance or decay slower than (1 - 1/log L);
//   4. if r reaches U/L, replace S_tilde by S_new (FullRefresh); otherwise
//      zero the top-r eigenvalues and apply the rank-r correction
//      V1 = ((S_new)^{1/2} X diag(lambda_new - lambda))_Omega,
//      V2 = ((S_new)^{1/2} X)_Omega to S_tilde (LowRank).
//
// The eigenvalue comparisons use 1 - exp(-eps_S) instead of eps_S itself, so
// that kept generalized eigenvalues 1 + lambda certifiably stay inside
// [e^{-eps_S}, e^{eps_S}].
//
// The state is updated in place in all three cases. Throws ConeExitError
// when S_new is not positive definite.
UpdateOutcome low_rank_update(const Matrix& S_new, SlackState& state);

// Block-diagonal variant used for WSOS: runs the same procedure on
// diag(S_1, ..., S_k) without materializing it. Eigenvalues are pooled
// across blocks for the global sort and doubling; the cutoff and the decay
// factor use pool_L (the largest block dimension).
struct BlockSlackState {
  std::vector<Matrix> S_tilde;
  double eps_S = 0.009;
  Index ambient_U = 0;
  Index pool_L = 0;
};

struct BlockUpdateOutcome {
  UpdateKind kind = UpdateKind::NoChange;
  std::vector<std::pair<Matrix, Matrix>> factors;  // per-block (V1, V2)
  std::vector<Index> block_ranks;
  Index rank_charged = 0;
  flops::Count flops = 0;
};

BlockUpdateOutcome low_rank_update_blocks(const std::vector<Matrix>& S_new,
                                          BlockSlackState& state);

}  // namespace sosipm

#pragma once

#include <optional>
#include <vector>

#include "sosipm/cone.hpp"
#include "sosipm/flops.hpp"
#include "sosipm/types.hpp"

namespace sosipm {

// Maintained inverses of the barrier linear algebra:
//   T_i = S_tilde_i^{-1}
//   N   = ( A ( sum_i (f_i f_i') o (P_i T_i P_i')^{o2} ) A' )^{-1}.
// Plain SOS is the single-block case. flops accumulates analytic
// multiply-accumulate counts of all work done on this state.
struct HessianInvState {
  std::vector<Matrix> T;
  Matrix N;
  flops::Count flops = 0;
};

// Per-block low-rank slack correction; r may be zero.
struct BlockUpdate {
  Matrix V1;
  Matrix V2;
};

// Optional diagnostics filled by the update routines when requested: the
// relative residual of the Hadamard translation identity
//   (P T_new P')^{o2} - (P T P')^{o2} = Y Z'.
struct UpdateDiagnostics {
  double step2_residual = 0.0;
};

// Dense recompute of T and N from the given approximate slack blocks.
HessianInvState full_refresh(const Cone& cone, const Matrix& A,
                             const std::vector<Matrix>& S_tilde);

// Rank-r slack update S_tilde <- S_tilde + V1 V2' translated to the
// Hessian inverse:
//   step 1  T_new = T + V1b V2b'           (Woodbury on the L x L inverse)
//   step 2  Y, Z with (P T_new P')^{o2} = (P T P')^{o2} + Y Z'
//           where Y' = [2PT, P V1b], Z' = [P, P V2b] and Y, Z stack the
//           columns scaled by diag of P V1b resp. P V2b columns
//   step 3  N_new from Woodbury against (AY)(AZ)'.
// Requires L r <= U. Throws UpdateRejectedError on a singular inner system;
// the caller is expected to full_refresh.
void update_hessian_inv(HessianInvState& state, const Matrix& P,
                        const Matrix& A, const Matrix& V1, const Matrix& V2,
                        UpdateDiagnostics* diag = nullptr);

// WSOS variant: per-block step 1 and weighted factor stacking
// Y_i' = diag(f_i) [2 P_i T_i, P_i V1b_i], then one Woodbury step on N
// against the stacked [Y_1, ..., Y_k], [Z_1, ..., Z_k].
void update_hessian_inv_wsos(HessianInvState& state, const Cone& cone,
                             const Matrix& A,
                             const std::vector<BlockUpdate>& updates,
                             UpdateDiagnostics* diag = nullptr);

}  // namespace sosipm

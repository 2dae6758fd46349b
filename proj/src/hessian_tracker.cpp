#include "sosipm/hessian_tracker.hpp"

#include <cmath>

namespace sosipm {

namespace {

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

}  // namespace

HessianInvState full_refresh(const Cone& cone, const Matrix& A,
                             const std::vector<Matrix>& S_tilde) {
  if (S_tilde.size() != cone.blocks.size()) {
    throw DimensionError("full_refresh: block count mismatch");
  }
  const Index U = cone.ambient();
  const Index m = A.rows();
  if (A.cols() != U) throw DimensionError("full_refresh: A has wrong width");

  HessianInvState state;
  Matrix inner = Matrix::Zero(U, U);
  for (size_t i = 0; i < cone.blocks.size(); ++i) {
    const auto& block = cone.blocks[i];
    const Index Li = block.P.cols();
    Eigen::LLT<Matrix> llt(S_tilde[i]);
    if (llt.info() != Eigen::Success) {
      throw NumericError("full_refresh: approximate slack is not PD");
    }
    Matrix T = llt.solve(Matrix::Identity(Li, Li));
    T = symmetrized(T);
    Matrix M = block.P * T * block.P.transpose();
    Matrix M2 = M.cwiseProduct(M);
    state.flops += flops::spd_inverse(Li) + flops::gemm(U, Li, Li) +
                   flops::gemm(U, Li, U) + flops::scale(U, U);
    if (block.unit_weight) {
      inner += M2;
    } else {
      inner += (block.f * block.f.transpose()).cwiseProduct(M2);
      state.flops += 2 * flops::scale(U, U);
    }
    state.T.push_back(std::move(T));
  }

  Matrix H = A * inner * A.transpose();
  H = symmetrized(H);
  state.flops += flops::gemm(m, U, U) + flops::gemm(m, U, m);
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw NumericError(
        "full_refresh: Hessian is singular; A may not have full row rank");
  }
  state.N = symmetrized(llt.solve(Matrix::Identity(m, m)));
  state.flops += flops::spd_inverse(m);
  return state;
}

void update_hessian_inv_wsos(HessianInvState& state, const Cone& cone,
                             const Matrix& A,
                             const std::vector<BlockUpdate>& updates,
                             UpdateDiagnostics* diag) {
  const size_t k = cone.blocks.size();
  if (updates.size() != k || state.T.size() != k) {
    throw DimensionError("update_hessian_inv: block count mismatch");
  }
  const Index U = cone.ambient();
  const Index m = A.rows();

  Index q_total = 0;
  for (size_t i = 0; i < k; ++i) {
    const Index Li = cone.blocks[i].P.cols();
    const Index r = updates[i].V1.cols();
    if (r != updates[i].V2.cols()) {
      throw DimensionError("update_hessian_inv: V1/V2 rank mismatch");
    }
    if (state.T[i].rows() != Li || state.T[i].cols() != Li ||
        (r > 0 && (updates[i].V1.rows() != Li || updates[i].V2.rows() != Li))) {
      throw DimensionError("update_hessian_inv: block shapes mismatch");
    }
    if (r > 0) q_total += (Li + r) * r;
  }
  if (q_total == 0) return;  // empty update, state unchanged

  std::vector<Matrix> T_old;
  if (diag) T_old = state.T;

  Matrix Y(U, q_total), Z(U, q_total);
  Index col = 0;
  for (size_t i = 0; i < k; ++i) {
    const Index r = updates[i].V1.cols();
    if (r == 0) continue;
    const auto& block = cone.blocks[i];
    const Index Li = block.P.cols();
    Matrix& T = state.T[i];

    // Step 1: Woodbury on the block inverse.
    Matrix TV1 = T * updates[i].V1;
    Matrix TV2 = T * updates[i].V2;
    Matrix inner = Matrix::Identity(r, r) + updates[i].V2.transpose() * TV1;
    Eigen::PartialPivLU<Matrix> lu(inner);
    if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-14) {
      throw UpdateRejectedError(
          "update_hessian_inv: singular step-1 inner system");
    }
    Matrix V1b = -TV1 * lu.inverse();
    const Matrix& V2b = TV2;
    state.flops += 2 * flops::gemm(Li, Li, r) + flops::gemm(r, Li, r) +
                   flops::lu_inverse(r) + flops::gemm(Li, r, r);

    // Step 2: translate the rank-r slack update into a rank-(L+r)r update
    // of the Hadamard square.
    Matrix PT = block.P * T;                 // uses the pre-update T
    Matrix PV1b = block.P * V1b;
    Matrix PV2b = block.P * V2b;
    state.flops += flops::gemm(U, Li, Li) + 2 * flops::gemm(U, Li, r);

    Matrix Yp(U, Li + r), Zp(U, Li + r);
    Yp.leftCols(Li) = 2.0 * PT;
    Yp.rightCols(r) = PV1b;
    Zp.leftCols(Li) = block.P;
    Zp.rightCols(r) = PV2b;
    if (!block.unit_weight) {
      Yp = block.f.asDiagonal() * Yp;
      Zp = block.f.asDiagonal() * Zp;
      state.flops += 2 * flops::scale(U, Li + r);
    }
    for (Index j = 0; j < r; ++j) {
      Y.middleCols(col + j * (Li + r), Li + r) = PV1b.col(j).asDiagonal() * Yp;
      Z.middleCols(col + j * (Li + r), Li + r) = PV2b.col(j).asDiagonal() * Zp;
    }
    state.flops += 2 * flops::scale(U, (Li + r) * r);
    col += (Li + r) * r;

    T += V1b * V2b.transpose();
    state.flops += flops::gemm(Li, r, Li);
  }

  // Step 3: one Woodbury step on N against (AY)(AZ)'.
  Matrix AY = A * Y;
  Matrix AZ = A * Z;
  Matrix NAY = state.N * AY;
  Matrix G = Matrix::Identity(q_total, q_total) + AZ.transpose() * NAY;
  state.flops += 2 * flops::gemm(m, U, q_total) + flops::gemm(m, m, q_total) +
                 flops::gemm(q_total, m, q_total);
  Eigen::PartialPivLU<Matrix> lu(G);
  if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-14) {
    throw UpdateRejectedError(
        "update_hessian_inv: singular step-3 inner system");
  }
  Matrix AZtN = AZ.transpose() * state.N;
  state.N -= NAY * lu.solve(AZtN);
  state.N = symmetrized(state.N);
  state.flops += flops::gemm(q_total, m, m) + flops::lu_factor(q_total) +
                 flops::lu_solve(q_total, m) + flops::gemm(m, q_total, m);

  if (diag) {
    // Residual of (P T_new P')^{o2} - (P T P')^{o2} = Y Z' summed over
    // blocks, relative to the new Hadamard square.
    Matrix lhs = Matrix::Zero(U, U);
    double scale = 0.0;
    for (size_t i = 0; i < k; ++i) {
      const auto& block = cone.blocks[i];
      Matrix M_old = block.P * T_old[i] * block.P.transpose();
      Matrix M_new = block.P * state.T[i] * block.P.transpose();
      Matrix D = M_new.cwiseProduct(M_new) - M_old.cwiseProduct(M_old);
      if (!block.unit_weight) {
        D = (block.f * block.f.transpose()).cwiseProduct(D);
      }
      lhs += D;
      scale += M_new.cwiseProduct(M_new).norm();
    }
    diag->step2_residual =
        (lhs - Y * Z.transpose()).norm() / std::max(scale, 1e-300);
  }
}

void update_hessian_inv(HessianInvState& state, const Matrix& P,
                        const Matrix& A, const Matrix& V1, const Matrix& V2,
                        UpdateDiagnostics* diag) {
  Cone cone = make_sos_cone(P);
  update_hessian_inv_wsos(state, cone, A, {BlockUpdate{V1, V2}}, diag);
}

}  // namespace sosipm

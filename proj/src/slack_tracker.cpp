#include "sosipm/slack_tracker.hpp"

#include <algorithm>
#include <cmath>

#include "sosipm/matops.hpp"

namespace sosipm {

namespace {

struct BlockEig {
  Vector mu;   // eigenvalues of S_new
  Matrix Xs;   // eigenvectors of S_new
  Vector lam;  // eigenvalues of Z_mid
  Matrix Xz;   // eigenvectors of Z_mid
};

struct PooledEntry {
  double abs_lambda;
  size_t block;
  Index idx;
};

}  // namespace

BlockUpdateOutcome low_rank_update_blocks(const std::vector<Matrix>& S_new,
                                          BlockSlackState& state) {
  if (S_new.size() != state.S_tilde.size()) {
    throw DimensionError("low_rank_update: block count mismatch");
  }
  const size_t k = S_new.size();
  const Index U = state.ambient_U;
  const Index L = state.pool_L;
  if (U <= 0 || L <= 0) {
    throw DimensionError("low_rank_update: state thresholds not initialized");
  }

  BlockUpdateOutcome out;
  out.block_ranks.assign(k, 0);
  out.factors.resize(k);

  // Per-block whitening Z_i = (S_i^new)^{-1/2} S_tilde_i (S_i^new)^{-1/2} - I.
  std::vector<BlockEig> eig(k);
  std::vector<PooledEntry> pooled;
  for (size_t i = 0; i < k; ++i) {
    const Matrix& Sn = S_new[i];
    const Index Li = Sn.rows();
    SymEig se = sym_eig(Sn);
    if (se.eigenvalues.minCoeff() <= 0.0) {
      throw ConeExitError("low_rank_update: exact slack is not PD");
    }
    Vector inv_sqrt = se.eigenvalues.cwiseSqrt().cwiseInverse();
    Matrix W_inv_sqrt =
        se.eigenvectors * inv_sqrt.asDiagonal() * se.eigenvectors.transpose();
    Matrix Z = W_inv_sqrt * state.S_tilde[i] * W_inv_sqrt;
    Z.diagonal().array() -= 1.0;
    Z = 0.5 * (Z + Z.transpose());
    SymEig ze = sym_eig(Z);
    out.flops += 2 * flops::sym_eig(Li) + flops::scale(Li, Li) +
                 3 * flops::gemm(Li, Li, Li);
    for (Index j = 0; j < Li; ++j) {
      pooled.push_back({std::abs(ze.eigenvalues[j]), i, j});
    }
    eig[i] = BlockEig{se.eigenvalues, std::move(se.eigenvectors),
                      ze.eigenvalues, std::move(ze.eigenvectors)};
  }

  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const PooledEntry& a, const PooledEntry& b) {
                     if (a.abs_lambda != b.abs_lambda) {
                       return a.abs_lambda > b.abs_lambda;
                     }
                     if (a.block != b.block) return a.block < b.block;
                     return a.idx < b.idx;
                   });

  // Compare against 1 - e^{-eps} so kept generalized eigenvalues 1 + lambda
  // land inside [e^{-eps}, e^{eps}] on both sides.
  const double tol = -std::expm1(-state.eps_S);
  const auto sorted_abs = [&](Index pos) {  // 1-indexed; 0 beyond the end
    return pos <= Index(pooled.size()) ? pooled[size_t(pos - 1)].abs_lambda
                                       : 0.0;
  };

  if (pooled.empty() || sorted_abs(1) <= tol) {
    out.kind = UpdateKind::NoChange;
    return out;
  }

  Index r = 1;
  const bool use_decay = L > 2;
  const double decay = use_decay ? 1.0 - 1.0 / std::log(double(L)) : 0.0;
  while (2 * r * L <= U &&
         (sorted_abs(2 * r) > tol ||
          (use_decay && sorted_abs(2 * r) > decay * sorted_abs(r)))) {
    ++r;
  }
  r *= 2;

  if (r * L >= U) {
    out.kind = UpdateKind::FullRefresh;
    out.rank_charged = (U + L - 1) / L;  // ceil(U/L)
    state.S_tilde = S_new;
    return out;
  }

  // Zero the top-r eigenvalues; Omega is the support of the change.
  std::vector<std::vector<Index>> selected(k);
  Index total_rank = 0;
  for (Index pos = 0; pos < r && pos < Index(pooled.size()); ++pos) {
    const auto& entry = pooled[size_t(pos)];
    if (eig[entry.block].lam[entry.idx] == 0.0) continue;
    selected[entry.block].push_back(entry.idx);
    ++total_rank;
  }

  out.kind = UpdateKind::LowRank;
  out.rank_charged = total_rank;
  for (size_t i = 0; i < k; ++i) {
    const Index ri = Index(selected[i].size());
    out.block_ranks[i] = ri;
    const Index Li = S_new[i].rows();
    Matrix V1(Li, ri), V2(Li, ri);
    if (ri > 0) {
      Matrix B(Li, ri);
      Vector neg_lambda(ri);
      for (Index c = 0; c < ri; ++c) {
        B.col(c) = eig[i].Xz.col(selected[i][size_t(c)]);
        neg_lambda[c] = -eig[i].lam[selected[i][size_t(c)]];
      }
      // (S_new)^{1/2} B through the eigendecomposition of S_new.
      Matrix t = eig[i].Xs.transpose() * B;
      t = eig[i].mu.cwiseSqrt().asDiagonal() * t;
      V2 = eig[i].Xs * t;
      V1 = V2 * neg_lambda.asDiagonal();
      Matrix corr = V1 * V2.transpose();
      state.S_tilde[i] += 0.5 * (corr + corr.transpose());
      out.flops += 2 * flops::gemm(Li, Li, ri) + flops::scale(Li, ri) * 2 +
                   flops::gemm(Li, ri, Li);
    }
    out.factors[i] = {std::move(V1), std::move(V2)};
  }
  return out;
}

UpdateOutcome low_rank_update(const Matrix& S_new, SlackState& state) {
  BlockSlackState block_state;
  block_state.S_tilde.push_back(std::move(state.S_tilde));
  block_state.eps_S = state.eps_S;
  block_state.ambient_U = state.ambient_U;
  block_state.pool_L = state.basis_L;

  BlockUpdateOutcome block_out;
  try {
    block_out = low_rank_update_blocks({S_new}, block_state);
  } catch (...) {
    state.S_tilde = std::move(block_state.S_tilde.front());
    throw;
  }
  state.S_tilde = std::move(block_state.S_tilde.front());
  UpdateOutcome out;
  out.kind = block_out.kind;
  out.rank_charged = block_out.rank_charged;
  out.flops = block_out.flops;
  if (out.kind == UpdateKind::LowRank) {
    out.V1 = std::move(block_out.factors.front().first);
    out.V2 = std::move(block_out.factors.front().second);
  }
  return out;
}

}  // namespace sosipm

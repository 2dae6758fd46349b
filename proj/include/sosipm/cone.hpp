#pragma once

#include <vector>

#include "sosipm/types.hpp"

namespace sosipm {

// One factor of a (weighted) sum-of-squares cone in the interpolant basis:
// the slack matrix of the block is Lambda_i(s) = P_i' diag(f_i o s) P_i.
// Plain SOS is the single block with unit weight.
struct ConeBlock {
  Matrix P;  // ambient x L_i
  Vector f;  // ambient weight values
  bool unit_weight = false;
};

struct Cone {
  std::vector<ConeBlock> blocks;

  Index ambient() const { return blocks.empty() ? 0 : blocks.front().P.rows(); }
  // Barrier parameter: sum of block dimensions.
  Index nu() const;
  // The "L" of the update thresholds: largest block dimension.
  Index max_block_dim() const;
};

Cone make_sos_cone(const Matrix& P);
Cone make_wsos_cone(std::vector<ConeBlock> blocks);

// Lambda_i(s) for one block, symmetrized.
Matrix block_slack(const ConeBlock& block, const Vector& s);

std::vector<Matrix> cone_slack(const Cone& cone, const Vector& s);

// Gradient map of the dual barrier, u -> sum_i f_i[u] * (P_i L_i^{-1} P_i')_uu
// with L_i = Lambda_i(s). Throws ConeExitError when some block is not
// positive definite.
Vector cone_gradient_map(const Cone& cone, const Vector& s);

// -sum_i log det Lambda_i(s); throws ConeExitError outside the cone.
double cone_neg_log_det(const Cone& cone, const Vector& s);

// Dense inner Hessian sum_i (f_i f_i') o (P_i Lambda_i(s)^{-1} P_i')^{o2},
// from explicit block slack matrices (which need not equal Lambda_i(s)).
Matrix cone_hessian_inner(const Cone& cone, const std::vector<Matrix>& slack);

}  // namespace sosipm

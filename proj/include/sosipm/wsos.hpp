#pragma once

#include <utility>
#include <vector>

#include "sosipm/cone.hpp"
#include "sosipm/ipm.hpp"
#include "sosipm/types.hpp"

namespace sosipm {

// One weight of a weighted-SOS cone: the values of the weight polynomial at
// the U interpolation points and the degree-d_i evaluation matrix of its
// multiplier space.
struct WsosWeight {
  Vector f;  // U values f_i(t_1), ..., f_i(t_U)
  Matrix P;  // U x L_i, full column rank
};

// Conic program over Sigma^f = { sum_i f_i s_i : s_i SOS }, dual cone
// { s : P_i' diag(f_i o s) P_i >= 0 for all i }.
struct WsosProgram {
  Index U = 0;
  std::vector<WsosWeight> weights;
  Matrix A;
  Vector b;
  Vector c;
};

void validate_program(const WsosProgram& program);

Cone wsos_cone(const WsosProgram& program);

// Gradient and dense Hessian of F^f_eta(y):
//   g = -eta b + sum_i A (f_i o diag(P_i Lambda_i^{-1} P_i'))
//   H = sum_i A ((f_i f_i') o (P_i Lambda_i^{-1} P_i')^{o2}) A'.
// Throws ConeExitError naming the first block whose slack is not PD.
std::pair<Vector, Matrix> wsos_gradient_hessian(const WsosProgram& program,
                                                const Vector& y, double eta);

// Barrier method over the WSOS cone with per-block lazy slack tracking
// (pooled-eigenvalue block LowRankUpdate) and the stacked Hessian-inverse
// update. The iteration budget uses nu = sum_i L_i.
std::pair<Solution, IpmTrace> wsos_solve(const WsosProgram& program,
                                         const IpmParams& params);

}  // namespace sosipm

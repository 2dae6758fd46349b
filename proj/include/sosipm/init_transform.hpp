#pragma once

#include <utility>

#include "sosipm/cone.hpp"
#include "sosipm/ipm.hpp"
#include "sosipm/types.hpp"

namespace sosipm {

// Auxiliary primal-dual system with a closed-form, exactly centered starting
// triple at eta = 1. Two coordinates are appended to the primal space; the
// cone gains the corresponding product factor R_{>=0}^2, folded into the
// first block (the extended evaluation matrix is blockdiag(P, 1, 1)). The
// barrier parameter grows from nu to nu + 2.
struct AuxSystem {
  Cone cone;  // extended blocks over U+2 ambient coordinates
  Matrix A;   // (m+1) x (U+2)
  Vector b;   // m+1
  Vector c;   // U+2
  Vector y0;  // m+1, exactly centered for eta = 1
  Vector s0;  // U+2
  Vector g0;  // U, gradient map of the original cone at s0[:U]
  double R = 0.0;
  double delta = 0.0;
  Index orig_U = 0;
  Index orig_m = 0;
  Index orig_nu = 0;
};

// Builds the auxiliary system for any cone (SOS or WSOS blocks). Requires
// ||c||_inf > 0, R > 0, delta in (0,1). The construction self-checks the
// feasibility of the starting triple to 1e-10 and that the gradient of
// F_eta at (y0, eta=1) vanishes.
AuxSystem build_aux_system(const Cone& cone, const Matrix& A, const Vector& b,
                           const Vector& c, double R, double delta);

// Spec surface for the plain SOS case.
struct AuxProgram {
  AuxSystem system;
};

std::pair<AuxProgram, std::pair<Vector, Vector>> build_aux(
    const SosProgram& program, double R, double delta);

struct ExtractBounds {
  // <c,x> <= OPT + objective_bound when the auxiliary duality gap reached
  // delta^2.
  double objective_bound = 0.0;
  // ||Ax - b||_1 <= feasibility_bound, same premise.
  double feasibility_bound = 0.0;
};

// Maps an auxiliary primal point back to original coordinates,
// x = R * x_bar[:U], together with the certified objective and feasibility
// bounds that hold once the auxiliary duality gap reaches delta^2.
std::pair<Vector, ExtractBounds> extract(const AuxSystem& aux,
                                         const Vector& x_bar,
                                         const Matrix& A_orig,
                                         const Vector& b_orig,
                                         const Vector& c_orig);

}  // namespace sosipm

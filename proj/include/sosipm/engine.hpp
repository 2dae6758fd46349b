#pragma once

#include "sosipm/cone.hpp"
#include "sosipm/ipm.hpp"

namespace sosipm::detail {

// The system the barrier loop actually iterates on (normally the auxiliary
// system of the initialization transform, already equipped with an exactly
// centered start for eta = 1).
struct EngineProblem {
  Cone cone;
  Matrix A;
  Vector b;
  Vector c;
  Vector y0;
};

struct EngineResult {
  Vector y;
  Vector s;
  double eta_final = 1.0;
  IpmTrace trace;
};

// Shared barrier loop behind sosipm::solve and sosipm::wsos_solve.
// Throws SolverDivergedError (with the partial trace) on cone exit.
EngineResult run_barrier(const EngineProblem& problem, const IpmParams& params);

// Build the auxiliary system for the cone, run the barrier loop, and map the
// central-path primal back to original coordinates.
std::pair<Solution, IpmTrace> solve_via_aux(const Cone& cone, const Matrix& A,
                                            const Vector& b, const Vector& c,
                                            const IpmParams& params);

}  // namespace sosipm::detail

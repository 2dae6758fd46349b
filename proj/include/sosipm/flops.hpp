#pragma once

#include <cstdint>

#include "sosipm/types.hpp"

namespace sosipm::flops {

// Analytic multiply-accumulate (MAC) estimates for the dense kernels used by
// the solver. Counters are incremented from these formulas, never from
// hardware counters, so flop reports are identical across platforms and runs.
//
// Conventions: one MAC = one multiply plus one add. Textbook leading-order
// terms only; a Cholesky factorization is n^3/6 MACs, a symmetric
// eigendecomposition with eigenvectors (tridiagonalization + implicit-shift
// QL with accumulation) is charged 9n^3/2 MACs.

using Count = std::uint64_t;

inline Count gemm(Index a, Index b, Index c) {
  return Count(a) * Count(b) * Count(c);
}

// Entrywise product / diagonal scaling of an a x b array.
inline Count scale(Index a, Index b) { return Count(a) * Count(b); }

inline Count cholesky(Index n) { return Count(n) * n * n / 6; }

// Two triangular solves against k right-hand sides.
inline Count cholesky_solve(Index n, Index k) { return Count(n) * n * k; }

// Factor + explicit inverse of a symmetric positive definite matrix.
inline Count spd_inverse(Index n) { return Count(n) * n * n / 2; }

inline Count lu_factor(Index n) { return Count(n) * n * n / 3; }

inline Count lu_solve(Index n, Index k) { return Count(n) * n * k; }

// Factor + explicit inverse through LU.
inline Count lu_inverse(Index n) { return lu_factor(n) + lu_solve(n, n); }

inline Count sym_eig(Index n) { return 9 * Count(n) * n * n / 2; }

}  // namespace sosipm::flops

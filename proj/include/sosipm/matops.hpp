#pragma once

#include "sosipm/types.hpp"

namespace sosipm {

// Tolerance for the two-sided quadratic-form sandwich
//   e^{-eps} x'Ax <= x'Bx <= e^{eps} x'Ax  for all x.
struct SpectralApprox {
  double eps = 0.0;

  bool admits(const Matrix& A, const Matrix& A_tilde) const;
};

struct SymEig {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns, orthonormal
};

// Eigendecomposition of a symmetric matrix. The input must be symmetric to
// 1e-10 relative; the strict lower triangle is authoritative.
SymEig sym_eig(const Matrix& M);

// Symmetric PSD square root. Eigenvalues below -1e-10 * ||M||_2 raise
// NumericError ("not PSD"); small negative eigenvalues are clamped to zero.
Matrix psd_sqrt(const Matrix& M);

// (A + U V')^{-1} from A^{-1} via the Woodbury identity,
//   (A + UV')^{-1} = A^{-1} - A^{-1} U (I + V' A^{-1} U)^{-1} V' A^{-1}.
// Throws UpdateRejectedError when the inner k x k system is numerically
// singular; callers fall back to a dense recompute.
Matrix woodbury_inverse_update(const Matrix& Ainv, const Matrix& Ucols,
                               const Matrix& Vcols);

// True iff every generalized eigenvalue of (A_tilde, A) lies in
// [e^{-eps} - 1e-9, e^{eps} + 1e-9]. Decided by Cholesky whitening of A;
// throws NumericError when A is not numerically positive definite.
bool check_spectral_approx(const Matrix& A, const Matrix& A_tilde, double eps);

// Entrywise square, the Hadamard product of M with itself.
Matrix hadamard_square(const Matrix& M);

}  // namespace sosipm

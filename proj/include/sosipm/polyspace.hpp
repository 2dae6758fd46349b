#pragma once

#include <cstdint>
#include <vector>

#include "sosipm/types.hpp"

namespace sosipm {

struct PolyDims {
  int n = 0;    // variable count
  int d = 0;    // half-degree
  Index L = 0;  // dim V_{n,d}   = binom(n+d, d)
  Index U = 0;  // dim V_{n,2d}  = binom(n+2d, 2d)
};

// Throws SizeError when a binomial overflows the Index range.
PolyDims make_dims(int n, int d);

enum class BasisKind { product_chebyshev };

// Unisolvent points for V_{n,2d} plus the evaluation matrix of a degree-d
// basis at those points. Immutable after construction; shareable across
// threads.
struct InterpolantBasis {
  PolyDims dims;
  Matrix points;  // U x n, one point per row
  Matrix P;       // U x L, P(u, l) = p_l(points.row(u))
  BasisKind basis_kind = BasisKind::product_chebyshev;
};

// Builds the interpolant basis. Univariate: the U Chebyshev points
// cos(k pi / (U-1)) on [-1, 1]. Multivariate: approximate Fekete selection
// from a tensor Chebyshev grid of side (2d+1) by column-pivoted QR of the
// degree-2d Vandermonde. Columns of P are product-Chebyshev polynomials in
// graded lexicographic order. The seed is reserved for stochastic selection
// strategies; the default deterministic construction does not consume it.
InterpolantBasis build_basis(const PolyDims& dims, std::uint64_t seed = 0);

// Lambda(s) = P' diag(s) P, symmetric L x L.
Matrix lambda_of(const InterpolantBasis& basis, const Vector& s);

// Adjoint of Lambda: lambda_adjoint(V)[u] = row_u(P) V row_u(P)'.
Vector lambda_adjoint(const InterpolantBasis& basis, const Matrix& V);

// The count Chebyshev-Lobatto points on [-1, 1], ascending.
Vector chebyshev_points(Index count);

// Multi-indices of total degree <= d in n variables, graded lexicographic.
std::vector<std::vector<int>> graded_multi_indices(int n, int d);

// Product-Chebyshev Vandermonde of total degree <= degree at the given
// points (one point per row); columns follow graded_multi_indices order.
Matrix chebyshev_vandermonde(const Matrix& points, int degree);

}  // namespace sosipm

#pragma once

#include <functional>
#include <vector>

#include "sosipm/cone.hpp"
#include "sosipm/polyspace.hpp"
#include "sosipm/types.hpp"

// Brute-force references used by tests and the acceptance suite. These
// re-derive every maintained quantity from scratch and intentionally share
// no code with the incremental path beyond the polyspace/matops primitives.
namespace sosipm::oracle {

// ( A (P S_tilde^{-1} P')^{o2} A' )^{-1}, computed densely.
Matrix dense_hessian_inverse(const InterpolantBasis& basis, const Matrix& A,
                             const Matrix& S_tilde);

// Block version: ( A ( sum_i (f_i f_i') o (P_i S_i^{-1} P_i')^{o2} ) A' )^{-1}.
Matrix dense_hessian_inverse(const Cone& cone, const Matrix& A,
                             const std::vector<Matrix>& S_tilde);

// Barrier Hessian at the exact slack s (same formula, S_i = Lambda_i(s)).
Matrix dense_hessian(const Cone& cone, const Matrix& A, const Vector& s);

// True iff min eig Lambda(s) >= -1e-9 * ||Lambda(s)||_2.
bool dual_membership(const InterpolantBasis& basis, const Vector& s);

// Minimum of fn over a uniform grid with `resolution` points per axis.
// Univariate or bivariate domains only.
double grid_min(const std::function<double(const Vector&)>& fn,
                const Vector& lo, const Vector& hi, Index resolution);

// Central finite differences with step h.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& fn,
                            const Vector& y, double h);

// Central-difference Jacobian of a vector map (columns are d/dy_j).
Matrix finite_diff_jacobian(
    const std::function<Vector(const Vector&)>& fn, const Vector& y, double h);

}  // namespace sosipm::oracle

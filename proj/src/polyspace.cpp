#include "sosipm/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sosipm {

namespace {

// binom(n+k, k) with overflow detection.
Index checked_space_dim(int n, int k) {
  long double acc = 1.0L;
  std::uint64_t num = 1, den = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * (n + i) / i;
    if (acc > 1e17L) throw SizeError("make_dims: binomial overflows");
    num *= std::uint64_t(n + i);
    den *= std::uint64_t(i);
    // Keep the running integers reduced so they do not overflow first.
    std::uint64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  return Index(num / den);
}

double chebyshev_t(int k, double x) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  double prev = 1.0, cur = x;
  for (int i = 2; i <= k; ++i) {
    double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void enumerate_rec(int n, int d, int pos, int remaining, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (pos == n) {
    if (remaining == 0) out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    enumerate_rec(n, d, pos + 1, remaining - e, cur, out);
  }
  cur[pos] = 0;
}

std::vector<double> lobatto_axis(int side) {
  // side Chebyshev-Lobatto nodes on [-1, 1], ascending.
  std::vector<double> axis(side);
  if (side == 1) {
    axis[0] = 0.0;
    return axis;
  }
  for (int k = 0; k < side; ++k) {
    axis[k] = -std::cos(double(k) * M_PI / double(side - 1));
  }
  axis.front() = -1.0;
  axis.back() = 1.0;
  if (side % 2 == 1) axis[size_t(side / 2)] = 0.0;
  return axis;
}

}  // namespace

Vector chebyshev_points(Index count) {
  if (count < 1) throw DimensionError("chebyshev_points: count must be >= 1");
  const auto axis = lobatto_axis(int(count));
  Vector out(count);
  for (Index i = 0; i < count; ++i) out[i] = axis[size_t(i)];
  return out;
}

PolyDims make_dims(int n, int d) {
  if (n < 1 || d < 1) throw DimensionError("make_dims: require n >= 1, d >= 1");
  PolyDims dims;
  dims.n = n;
  dims.d = d;
  dims.L = checked_space_dim(n, d);
  dims.U = checked_space_dim(n, 2 * d);
  return dims;
}

std::vector<std::vector<int>> graded_multi_indices(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  for (int grade = 0; grade <= d; ++grade) {
    std::vector<std::vector<int>> level;
    enumerate_rec(n, d, 0, grade, cur, level);
    // enumerate_rec yields first-coordinate-descending order within a grade;
    // that is the graded lexicographic convention used for columns.
    for (auto& idx : level) out.push_back(std::move(idx));
  }
  return out;
}

Matrix chebyshev_vandermonde(const Matrix& points, int degree) {
  const int n = int(points.cols());
  const auto indices = graded_multi_indices(n, degree);
  Matrix V(points.rows(), Index(indices.size()));
  for (Index u = 0; u < points.rows(); ++u) {
    for (Index j = 0; j < Index(indices.size()); ++j) {
      double val = 1.0;
      for (int axis = 0; axis < n; ++axis) {
        val *= chebyshev_t(indices[j][axis], points(u, axis));
      }
      V(u, j) = val;
    }
  }
  return V;
}

InterpolantBasis build_basis(const PolyDims& dims, std::uint64_t /*seed*/) {
  const Index U = dims.U;
  Matrix points;

  if (dims.n == 1) {
    points = chebyshev_points(U);
  } else {
    // Tensor Chebyshev candidate grid of side (2d+1) per axis, then greedy
    // approximate-Fekete extraction: column-pivoted QR of the transposed
    // degree-2d Vandermonde picks U well-conditioned rows.
    const int side = 2 * dims.d + 1;
    Index total = 1;
    for (int axis = 0; axis < dims.n; ++axis) total *= side;
    const auto axis_nodes = lobatto_axis(side);

    Matrix candidates(total, dims.n);
    for (Index idx = 0; idx < total; ++idx) {
      Index rest = idx;
      for (int axis = 0; axis < dims.n; ++axis) {
        candidates(idx, axis) = axis_nodes[size_t(rest % side)];
        rest /= side;
      }
    }

    Matrix W = chebyshev_vandermonde(candidates, 2 * dims.d);  // total x U
    Eigen::ColPivHouseholderQR<Matrix> qr(W.transpose());
    if (qr.rank() < U) {
      throw ConstructionError(
          "build_basis: candidate grid does not span V_{n,2d}");
    }
    const auto& perm = qr.colsPermutation().indices();
    std::vector<Index> selected(static_cast<size_t>(U));
    for (Index i = 0; i < U; ++i) selected[size_t(i)] = perm[i];
    std::sort(selected.begin(), selected.end(), [&](Index a, Index b) {
      for (int axis = 0; axis < dims.n; ++axis) {
        if (candidates(a, axis) != candidates(b, axis)) {
          return candidates(a, axis) < candidates(b, axis);
        }
      }
      return false;
    });

    points.resize(U, dims.n);
    for (Index i = 0; i < U; ++i) points.row(i) = candidates.row(selected[size_t(i)]);
  }

  // Unisolvence: the degree-2d interpolation matrix at the selected points
  // must be comfortably nonsingular.
  Matrix V2d = chebyshev_vandermonde(points, 2 * dims.d);
  Eigen::PartialPivLU<Matrix> lu(V2d);
  const double rcond = lu.rcond();
  if (!std::isfinite(rcond) || rcond < 1e-10) {
    throw ConstructionError(
        "build_basis: unisolvence check failed, rcond estimate " +
        std::to_string(rcond));
  }

  InterpolantBasis basis;
  basis.dims = dims;
  basis.points = std::move(points);
  basis.P = chebyshev_vandermonde(basis.points, dims.d);
  basis.basis_kind = BasisKind::product_chebyshev;

  Eigen::ColPivHouseholderQR<Matrix> rank_check(basis.P);
  if (rank_check.rank() < dims.L) {
    throw ConstructionError("build_basis: P is column rank deficient");
  }
  return basis;
}

Matrix lambda_of(const InterpolantBasis& basis, const Vector& s) {
  if (s.size() != basis.P.rows()) {
    throw DimensionError("lambda_of: slack vector has wrong length");
  }
  Matrix M = basis.P.transpose() * s.asDiagonal() * basis.P;
  return 0.5 * (M + M.transpose());
}

Vector lambda_adjoint(const InterpolantBasis& basis, const Matrix& V) {
  if (V.rows() != basis.dims.L || V.cols() != basis.dims.L) {
    throw DimensionError("lambda_adjoint: V has wrong shape");
  }
  return ((basis.P * V).cwiseProduct(basis.P)).rowwise().sum();
}

}  // namespace sosipm

#include "sosipm/oracle.hpp"

#include <cmath>

namespace sosipm::oracle {

namespace {

// Inner Hadamard-square sum evaluated from explicit slack blocks, written
// out directly so this path stays independent of the solver's kernels.
Matrix inner_sum(const Cone& cone, const std::vector<Matrix>& S_blocks) {
  const Index U = cone.ambient();
  Matrix inner = Matrix::Zero(U, U);
  for (size_t i = 0; i < cone.blocks.size(); ++i) {
    const Matrix& P = cone.blocks[i].P;
    Eigen::LDLT<Matrix> ldlt(S_blocks[i]);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw NumericError("oracle: slack block is not positive definite");
    }
    Matrix M = P * ldlt.solve(P.transpose());
    for (Index a = 0; a < U; ++a) {
      for (Index b = 0; b < U; ++b) {
        double w = cone.blocks[i].f[a] * cone.blocks[i].f[b];
        inner(a, b) += w * M(a, b) * M(a, b);
      }
    }
  }
  return inner;
}

Matrix invert_dense(const Matrix& H) {
  Eigen::FullPivLU<Matrix> lu(H);
  if (!lu.isInvertible()) {
    throw NumericError("oracle: Hessian is singular");
  }
  return lu.inverse();
}

}  // namespace

Matrix dense_hessian_inverse(const Cone& cone, const Matrix& A,
                             const std::vector<Matrix>& S_tilde) {
  Matrix H = A * inner_sum(cone, S_tilde) * A.transpose();
  return invert_dense(0.5 * (H + H.transpose()));
}

Matrix dense_hessian_inverse(const InterpolantBasis& basis, const Matrix& A,
                             const Matrix& S_tilde) {
  Cone cone = make_sos_cone(basis.P);
  return dense_hessian_inverse(cone, A, {S_tilde});
}

Matrix dense_hessian(const Cone& cone, const Matrix& A, const Vector& s) {
  std::vector<Matrix> blocks;
  blocks.reserve(cone.blocks.size());
  for (const auto& block : cone.blocks) {
    Vector w = block.f.cwiseProduct(s);
    Matrix S = block.P.transpose() * w.asDiagonal() * block.P;
    blocks.push_back(0.5 * (S + S.transpose()));
  }
  Matrix H = A * inner_sum(cone, blocks) * A.transpose();
  return 0.5 * (H + H.transpose());
}

bool dual_membership(const InterpolantBasis& basis, const Vector& s) {
  Matrix S = basis.P.transpose() * s.asDiagonal() * basis.P;
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success) {
    throw NumericError("dual_membership: eigensolver did not converge");
  }
  const double top = solver.eigenvalues().cwiseAbs().maxCoeff();
  return solver.eigenvalues().minCoeff() >= -1e-9 * std::max(top, 1e-300);
}

double grid_min(const std::function<double(const Vector&)>& fn,
                const Vector& lo, const Vector& hi, Index resolution) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > 2) {
    throw DimensionError("grid_min: univariate or bivariate domains only");
  }
  if (resolution < 2) throw DimensionError("grid_min: resolution too small");
  double best = std::numeric_limits<double>::infinity();
  if (lo.size() == 1) {
    Vector t(1);
    for (Index i = 0; i < resolution; ++i) {
      t[0] = lo[0] + (hi[0] - lo[0]) * double(i) / double(resolution - 1);
      best = std::min(best, fn(t));
    }
  } else {
    Vector t(2);
    for (Index i = 0; i < resolution; ++i) {
      t[0] = lo[0] + (hi[0] - lo[0]) * double(i) / double(resolution - 1);
      for (Index j = 0; j < resolution; ++j) {
        t[1] = lo[1] + (hi[1] - lo[1]) * double(j) / double(resolution - 1);
        best = std::min(best, fn(t));
      }
    }
  }
  return best;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& fn,
                            const Vector& y, double h) {
  Vector g(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    Vector yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    g[j] = (fn(yp) - fn(ym)) / (2.0 * h);
  }
  return g;
}

Matrix finite_diff_jacobian(
    const std::function<Vector(const Vector&)>& fn, const Vector& y,
    double h) {
  Vector probe = fn(y);
  Matrix J(probe.size(), y.size());
  for (Index j = 0; j < y.size(); ++j) {
    Vector yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    J.col(j) = (fn(yp) - fn(ym)) / (2.0 * h);
  }
  return J;
}

}  // namespace sosipm::oracle

#include "sosipm/matops.hpp"

#include <cmath>

namespace sosipm {

namespace {

void require_square(const Matrix& M, const char* who) {
  if (M.rows() != M.cols()) {
    throw DimensionError(std::string(who) + ": matrix is not square");
  }
}

void require_symmetric(const Matrix& M, const char* who) {
  require_square(M, who);
  const double scale = M.norm();
  const double asym = (M - M.transpose()).norm();
  if (asym > 1e-10 * std::max(scale, 1.0)) {
    throw NumericError(std::string(who) + ": input is not symmetric");
  }
}

}  // namespace

bool SpectralApprox::admits(const Matrix& A, const Matrix& A_tilde) const {
  return check_spectral_approx(A, A_tilde, eps);
}

SymEig sym_eig(const Matrix& M) {
  require_symmetric(M, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig: eigensolver did not converge");
  }
  return SymEig{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix psd_sqrt(const Matrix& M) {
  SymEig eig = sym_eig(M);
  const double top = std::max(eig.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
  Vector roots(eig.eigenvalues.size());
  for (Index i = 0; i < roots.size(); ++i) {
    double lambda = eig.eigenvalues[i];
    if (lambda < -1e-10 * std::max(top, 1e-300)) {
      throw NumericError("psd_sqrt: matrix is not PSD");
    }
    roots[i] = std::sqrt(std::max(lambda, 0.0));
  }
  return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.transpose();
}

Matrix woodbury_inverse_update(const Matrix& Ainv, const Matrix& Ucols,
                               const Matrix& Vcols) {
  require_square(Ainv, "woodbury_inverse_update");
  if (Ucols.rows() != Ainv.rows() || Vcols.rows() != Ainv.rows() ||
      Ucols.cols() != Vcols.cols()) {
    throw DimensionError("woodbury_inverse_update: factor shapes mismatch");
  }
  const Index k = Ucols.cols();
  if (k == 0) return Ainv;

  const Matrix AiU = Ainv * Ucols;
  Matrix inner = Matrix::Identity(k, k) + Vcols.transpose() * AiU;
  Eigen::PartialPivLU<Matrix> lu(inner);
  if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-14) {
    throw UpdateRejectedError(
        "woodbury_inverse_update: inner system is singular");
  }
  return Ainv - AiU * lu.solve(Vcols.transpose() * Ainv);
}

bool check_spectral_approx(const Matrix& A, const Matrix& A_tilde, double eps) {
  require_symmetric(A, "check_spectral_approx");
  require_symmetric(A_tilde, "check_spectral_approx");
  if (A.rows() != A_tilde.rows()) {
    throw DimensionError("check_spectral_approx: size mismatch");
  }
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("check_spectral_approx: A is numerically singular");
  }
  // Generalized eigenvalues of (A_tilde, A) are the eigenvalues of
  // L^{-1} A_tilde L^{-T}.
  const Matrix Linv_At =
      llt.matrixL().solve(A_tilde);  // L^{-1} A_tilde
  Matrix W = llt.matrixL().solve(Linv_At.transpose());
  W = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(W);
  if (solver.info() != Eigen::Success) {
    throw NumericError("check_spectral_approx: eigensolver did not converge");
  }
  constexpr double kSlack = 1e-9;
  const double lo = std::exp(-eps) - kSlack;
  const double hi = std::exp(eps) + kSlack;
  const double mn = solver.eigenvalues().minCoeff();
  const double mx = solver.eigenvalues().maxCoeff();
  return mn >= lo && mx <= hi;
}

Matrix hadamard_square(const Matrix& M) { return M.cwiseProduct(M); }

}  // namespace sosipm

#include <doctest.h>

#include <random>

#include "sosipm/matops.hpp"
#include "test_util.hpp"

using namespace sosipm;
using namespace sosipm::testutil;

TEST_CASE("sym_eig on identity and diagonal") {
  SymEig eig = sym_eig(Matrix::Identity(3, 3));
  CHECK(eig.eigenvalues.isApprox(Vector::Ones(3)));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = -1.0;
  SymEig de = sym_eig(D);
  CHECK(de.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(de.eigenvalues[1] == doctest::Approx(2.0));
  // axis eigenvectors up to sign
  CHECK(std::abs(de.eigenvectors.col(0)[1]) == doctest::Approx(1.0));
  CHECK(std::abs(de.eigenvectors.col(1)[0]) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstruction residual") {
  std::mt19937_64 rng(101);
  Matrix M = random_symmetric(rng, 5);
  SymEig eig = sym_eig(M);
  Matrix rebuilt = eig.eigenvectors * eig.eigenvalues.asDiagonal() *
                   eig.eigenvectors.transpose();
  CHECK((rebuilt - M).norm() <= 1e-8 * M.norm());
  Matrix gram = eig.eigenvectors.transpose() * eig.eigenvectors;
  CHECK((gram - Matrix::Identity(5, 5)).norm() <= 1e-8 * 5);
}

TEST_CASE("sym_eig rejects asymmetric input") {
  Matrix M(2, 2);
  M << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(sym_eig(M), NumericError);
}

TEST_CASE("psd_sqrt basics") {
  CHECK(psd_sqrt(Matrix::Identity(4, 4)).isApprox(Matrix::Identity(4, 4)));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 4.0;
  D(1, 1) = 9.0;
  Matrix R = psd_sqrt(D);
  CHECK(R(0, 0) == doctest::Approx(2.0));
  CHECK(R(1, 1) == doctest::Approx(3.0));

  std::mt19937_64 rng(7);
  Matrix P = random_matrix(rng, 6, 4);
  Matrix M = P.transpose() * P;
  Matrix S = psd_sqrt(M);
  CHECK((S * S - M).norm() <= 1e-8 * M.norm());

  Matrix neg = -Matrix::Identity(3, 3);
  CHECK_THROWS_AS(psd_sqrt(neg), NumericError);
}

TEST_CASE("woodbury_inverse_update") {
  SUBCASE("empty update is the identity map") {
    std::mt19937_64 rng(3);
    Matrix Ainv = random_spd(rng, 4);
    Matrix empty(4, 0);
    CHECK(woodbury_inverse_update(Ainv, empty, empty) == Ainv);
  }

  SUBCASE("rank-one against direct 2x2 inverse") {
    Matrix Ainv = Matrix::Identity(2, 2);
    Matrix e1 = Matrix::Zero(2, 1);
    e1(0, 0) = 1.0;
    Matrix got = woodbury_inverse_update(Ainv, e1, e1);
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 0.5;
    want(1, 1) = 1.0;
    CHECK((got - want).norm() <= 1e-14);
  }

  SUBCASE("random rank-2 against dense inverse") {
    std::mt19937_64 rng(11);
    Matrix A = random_spd(rng, 6, 1.0, 3.0);
    Matrix U = random_matrix(rng, 6, 2);
    Matrix V = 0.05 * random_matrix(rng, 6, 2);
    Matrix got = woodbury_inverse_update(A.inverse(), U, V);
    Matrix want = (A + U * V.transpose()).inverse();
    CHECK(rel_err(got, want) <= 1e-9);
  }

  SUBCASE("singular inner system is rejected") {
    // A = I, U = e1, V = -e1 makes I + V'U = 0.
    Matrix Ainv = Matrix::Identity(2, 2);
    Matrix U = Matrix::Zero(2, 1);
    U(0, 0) = 1.0;
    Matrix V = -U;
    CHECK_THROWS_AS(woodbury_inverse_update(Ainv, U, V), UpdateRejectedError);
  }
}

TEST_CASE("check_spectral_approx") {
  Matrix I = Matrix::Identity(4, 4);
  CHECK(check_spectral_approx(I, I, 0.0));
  CHECK_FALSE(check_spectral_approx(I, std::exp(0.02) * I, 0.01));
  CHECK(check_spectral_approx(I, std::exp(0.005) * I, 0.01));
  CHECK_THROWS_AS(check_spectral_approx(Matrix::Zero(4, 4), I, 0.1),
                  NumericError);
}

TEST_CASE("hadamard_square") {
  CHECK(hadamard_square(Matrix::Identity(3, 3)) == Matrix::Identity(3, 3));
  CHECK(hadamard_square(Matrix::Ones(4, 4)) == Matrix::Ones(4, 4));
  Matrix M(2, 2);
  M << 1, 2, 3, 4;
  Matrix want(2, 2);
  want << 1, 4, 9, 16;
  CHECK(hadamard_square(M) == want);
}

TEST_CASE("Hadamard product facts on random instances") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix A = random_matrix(rng, 5, 5);
    Matrix B = random_matrix(rng, 5, 5);
    Vector x = random_vector(rng, 5);
    Vector y = random_vector(rng, 5);

    // x'(A o B)y = tr[diag(x) A diag(y) B']
    double lhs = x.dot(A.cwiseProduct(B) * y);
    double rhs = (Matrix(x.asDiagonal()) * A * Matrix(y.asDiagonal()) *
                  B.transpose())
                     .trace();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));

    // A o (x y') = diag(x) A diag(y)
    Matrix left = A.cwiseProduct(x * y.transpose());
    Matrix right = Matrix(x.asDiagonal()) * A * Matrix(y.asDiagonal());
    CHECK((left - right).norm() <= 1e-12 * (1.0 + right.norm()));
  }
}

TEST_CASE("spectral approximation facts on random instances") {
  std::mt19937_64 rng(29);
  const double eps = 0.05;
  int done = 0;
  while (done < 50) {
    Matrix A = random_spd(rng, 5, 0.8, 2.0);
    Matrix E = 0.01 * random_symmetric(rng, 5);
    Matrix At = A + E;
    if (!check_spectral_approx(A, At, eps)) continue;
    ++done;

    // inverses stay eps-close
    CHECK(check_spectral_approx(A.inverse(), At.inverse(), eps + 1e-12));
    // traces stay inside the exponential window
    CHECK(At.trace() <= std::exp(eps) * A.trace() + 1e-9);
    CHECK(At.trace() >= std::exp(-eps) * A.trace() - 1e-9);
    // two-sided congruence
    Matrix B = random_matrix(rng, 5, 5);
    Matrix BAB = B.transpose() * A * B;
    Matrix BAtB = B.transpose() * At * B;
    if (Eigen::LLT<Matrix>(BAB).info() == Eigen::Success) {
      CHECK(check_spectral_approx(0.5 * (BAB + BAB.transpose()),
                                  0.5 * (BAtB + BAtB.transpose()), eps));
    }
    // Hadamard squares at doubled tolerance
    CHECK(check_spectral_approx(hadamard_square(A), hadamard_square(At),
                                2.0 * eps));
  }
}

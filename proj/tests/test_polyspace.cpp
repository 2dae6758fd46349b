#include <doctest.h>

#include <random>

#include "sosipm/matops.hpp"
#include "sosipm/polyspace.hpp"
#include "test_util.hpp"

using namespace sosipm;
using namespace sosipm::testutil;

namespace {

// Documented univariate fixture with monomial columns (1, t) at {-1, 0, 1};
// only tests use it.
InterpolantBasis monomial_fixture() {
  InterpolantBasis basis;
  basis.dims = make_dims(1, 1);
  basis.points.resize(3, 1);
  basis.points << -1.0, 0.0, 1.0;
  basis.P.resize(3, 2);
  basis.P << 1.0, -1.0, 1.0, 0.0, 1.0, 1.0;
  return basis;
}

}  // namespace

TEST_CASE("make_dims") {
  PolyDims d11 = make_dims(1, 1);
  CHECK(d11.L == 2);
  CHECK(d11.U == 3);

  PolyDims d22 = make_dims(2, 2);
  CHECK(d22.L == 6);
  CHECK(d22.U == 15);

  PolyDims d32 = make_dims(3, 2);
  CHECK(d32.L == 10);
  CHECK(d32.U == 35);

  CHECK_THROWS_AS(make_dims(0, 1), DimensionError);
  CHECK_THROWS_AS(make_dims(1, 0), DimensionError);
  CHECK_THROWS_AS(make_dims(80, 40), SizeError);
}

TEST_CASE("build_basis univariate") {
  InterpolantBasis b11 = build_basis(make_dims(1, 1));
  REQUIRE(b11.points.rows() == 3);
  CHECK(b11.points(0, 0) == doctest::Approx(-1.0));
  CHECK(b11.points(1, 0) == doctest::Approx(0.0));
  CHECK(b11.points(2, 0) == doctest::Approx(1.0));

  InterpolantBasis b12 = build_basis(make_dims(1, 2));
  CHECK(b12.P.rows() == 5);
  CHECK(b12.P.cols() == 3);
  Eigen::ColPivHouseholderQR<Matrix> qr(b12.P);
  CHECK(qr.rank() == 3);
}

TEST_CASE("build_basis bivariate is unisolvent") {
  InterpolantBasis b21 = build_basis(make_dims(2, 1));
  REQUIRE(b21.points.rows() == 6);
  Matrix V2d = chebyshev_vandermonde(b21.points, 2);
  CHECK(std::abs(Eigen::PartialPivLU<Matrix>(V2d).determinant()) > 1e-8);
}

TEST_CASE("build_basis trivariate dimensions") {
  InterpolantBasis b32 = build_basis(make_dims(3, 2));
  CHECK(b32.P.rows() == 35);
  CHECK(b32.P.cols() == 10);
  Eigen::ColPivHouseholderQR<Matrix> qr(b32.P);
  CHECK(qr.rank() == 10);
}

TEST_CASE("lambda_of") {
  InterpolantBasis fx = monomial_fixture();

  CHECK(lambda_of(fx, Vector::Zero(3)).norm() == 0.0);

  Matrix gram = lambda_of(fx, Vector::Ones(3));
  CHECK((gram - fx.P.transpose() * fx.P).norm() <= 1e-14);

  Vector s(3);
  s << 2.0, 5.0, 11.0;
  Matrix want(2, 2);
  want << 2.0 + 5.0 + 11.0, -2.0 + 11.0, -2.0 + 11.0, 2.0 + 11.0;
  CHECK((lambda_of(fx, s) - want).norm() <= 1e-14);
}

TEST_CASE("lambda_adjoint") {
  InterpolantBasis fx = monomial_fixture();

  CHECK(lambda_adjoint(fx, Matrix::Zero(2, 2)).norm() == 0.0);

  Vector rownorms = lambda_adjoint(fx, Matrix::Identity(2, 2));
  CHECK(rownorms[0] == doctest::Approx(2.0));
  CHECK(rownorms[1] == doctest::Approx(1.0));
  CHECK(rownorms[2] == doctest::Approx(2.0));

  // adjoint identity <Lambda(s), V> = <s, Lambda*(V)>
  std::mt19937_64 rng(5);
  InterpolantBasis b22 = build_basis(make_dims(2, 2));
  for (int trial = 0; trial < 20; ++trial) {
    Vector s = random_vector(rng, b22.dims.U);
    Matrix V = random_symmetric(rng, b22.dims.L);
    double lhs = (lambda_of(b22, s).cwiseProduct(V)).sum();
    double rhs = s.dot(lambda_adjoint(b22, V));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("lambda is linear") {
  std::mt19937_64 rng(17);
  InterpolantBasis basis = build_basis(make_dims(2, 1));
  for (int trial = 0; trial < 20; ++trial) {
    Vector s1 = random_vector(rng, basis.dims.U);
    Vector s2 = random_vector(rng, basis.dims.U);
    double a = 0.7, b = -1.3;
    Matrix lhs = lambda_of(basis, a * s1 + b * s2);
    Matrix rhs = a * lambda_of(basis, s1) + b * lambda_of(basis, s2);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("nonnegative vectors lie in the dual cone") {
  std::mt19937_64 rng(19);
  InterpolantBasis basis = build_basis(make_dims(1, 3));
  for (int trial = 0; trial < 20; ++trial) {
    Vector s = random_vector(rng, basis.dims.U).cwiseAbs();
    SymEig eig = sym_eig(lambda_of(basis, s));
    CHECK(eig.eigenvalues.minCoeff() >= -1e-10);
  }
}

TEST_CASE("primal/dual pairing is nonnegative") {
  std::mt19937_64 rng(31);
  InterpolantBasis basis = build_basis(make_dims(1, 2));
  for (int trial = 0; trial < 30; ++trial) {
    Matrix V = random_matrix(rng, basis.dims.L, basis.dims.L);
    Vector x = lambda_adjoint(basis, Matrix(V * V.transpose()));
    Vector s = random_vector(rng, basis.dims.U).cwiseAbs();  // in Sigma*
    CHECK(x.dot(s) >= -1e-12);
  }
}

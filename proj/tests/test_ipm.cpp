#include <doctest.h>

#include <random>

#include "sosipm/engine.hpp"
#include "sosipm/frontend_io.hpp"
#include "sosipm/init_transform.hpp"
#include "sosipm/ipm.hpp"
#include "sosipm/matops.hpp"
#include "sosipm/oracle.hpp"
#include "test_util.hpp"

using namespace sosipm;
using namespace sosipm::testutil;

namespace {

// Small strictly dual-feasible program: y = 0 keeps s = c inside the cone.
SosProgram feasible_program(std::mt19937_64& rng, int d, Index m) {
  InterpolantBasis basis = build_basis(make_dims(1, d));
  SosProgram program;
  program.basis = basis;
  program.A = random_matrix(rng, m, basis.dims.U);
  program.b = random_vector(rng, m);
  program.c = Vector::Ones(basis.dims.U) +
              0.2 * random_vector(rng, basis.dims.U).cwiseAbs();
  return program;
}

LowerBoundProgram quadratic_lower_bound() {
  InterpolantBasis basis = build_basis(make_dims(1, 1));
  Vector f(3);
  for (Index u = 0; u < 3; ++u) {
    double t = basis.points(u, 0);
    f[u] = t * t + 2.0 * t + 3.0;
  }
  return lower_bound_frontend(f, basis);
}

}  // namespace

TEST_CASE("gradient ignores eta when b = 0") {
  std::mt19937_64 rng(139);
  SosProgram program = feasible_program(rng, 2, 3);
  program.b.setZero();
  Vector y = Vector::Zero(3);
  Vector g1 = barrier_gradient(program, y, 1.0);
  Vector g2 = barrier_gradient(program, y, 123.0);
  CHECK((g1 - g2).norm() == 0.0);
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 rng(149);
  SosProgram program = feasible_program(rng, 2, 3);
  Vector y = Vector::Zero(3);
  const double eta = 2.5;
  Vector got = barrier_gradient(program, y, eta);
  Vector want = oracle::finite_diff_gradient(
      [&](const Vector& z) { return barrier_value(program, z, eta); }, y,
      1e-6);
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + want.norm()));
}

TEST_CASE("gradient vanishes at the initialized point") {
  LowerBoundProgram lb = quadratic_lower_bound();
  auto [aux_program, start] = build_aux(lb.program, 30.0, 1e-3);
  const AuxSystem& aux = aux_program.system;

  // Express the auxiliary system as a plain program over the extended basis
  // and evaluate the generic gradient at (y0, eta = 1).
  SosProgram as_program;
  as_program.basis.P = aux.cone.blocks[0].P;
  as_program.basis.dims.n = 1;
  as_program.basis.dims.d = 1;
  as_program.basis.dims.L = as_program.basis.P.cols();
  as_program.basis.dims.U = as_program.basis.P.rows();
  as_program.A = aux.A;
  as_program.b = aux.b;
  as_program.c = aux.c;
  Vector g = barrier_gradient(as_program, aux.y0, 1.0);
  CHECK(g.norm() <= 1e-8);
}

TEST_CASE("dense Hessian basics") {
  std::mt19937_64 rng(151);
  SosProgram program = feasible_program(rng, 2, 3);
  Vector y = Vector::Zero(3);

  SUBCASE("single selector row gives the squared diagonal entry") {
    SosProgram sel = program;
    sel.A = Matrix::Zero(1, program.basis.dims.U);
    sel.A(0, 2) = 1.0;
    sel.b = Vector::Zero(1);
    Vector y1 = Vector::Zero(1);
    Matrix H = barrier_hessian_dense(sel, y1);
    Matrix S = lambda_of(sel.basis, sel.c);
    Matrix M = sel.basis.P * S.inverse() * sel.basis.P.transpose();
    CHECK(H(0, 0) == doctest::Approx(M(2, 2) * M(2, 2)));
  }

  SUBCASE("symmetric positive semidefinite") {
    Matrix H = barrier_hessian_dense(program, y);
    CHECK((H - H.transpose()).norm() <= 1e-9 * H.norm());
    SymEig eig = sym_eig(H);
    CHECK(eig.eigenvalues.minCoeff() >= -1e-9 * H.norm());
  }

  SUBCASE("matches the finite-difference Jacobian of the gradient") {
    Matrix H = barrier_hessian_dense(program, y);
    Matrix J = oracle::finite_diff_jacobian(
        [&](const Vector& z) { return barrier_gradient(program, z, 1.0); }, y,
        1e-6);
    CHECK(rel_err(0.5 * (J + J.transpose()), H) <= 1e-4);
  }
}

TEST_CASE("solve certifies the quadratic lower bound") {
  LowerBoundProgram lb = quadratic_lower_bound();
  IpmParams params;
  params.delta = 1e-3;
  params.R = 30.0;
  params.collect_invariants = true;

  auto [sol, trace] = solve(lb.program, params);
  const double gamma = lb.decode_gamma(sol.x);
  const double tol = params.delta * params.R * (1.0 / 3.0);
  CHECK(std::abs(gamma - 2.0) <= tol);

  // per-iteration invariants collected along the run
  CHECK(trace.max_newton_norm <= 2.0 * params.eps_N + 1e-8);
  CHECK(trace.max_centrality <= params.eps_N + 1e-8);
  CHECK(trace.max_slow_move_residual <= 1e-8);
  CHECK(trace.all_sandwich_ok);
  CHECK(trace.all_slack_approx_ok);
  CHECK(trace.max_n_residual <= 1e-7);

  // eta schedule
  CHECK(trace.eta_final >=
        2.0 * double(trace.nu) / (params.delta * params.delta));
  for (size_t i = 1; i < trace.iterations.size(); ++i) {
    CHECK(trace.iterations[i].eta ==
          doctest::Approx(trace.iterations[i - 1].eta * (1.0 + trace.alpha))
              .epsilon(1e-14));
  }

  // solution invariants
  CHECK((sol.s - (lb.program.c - lb.program.A.transpose() * sol.y)).norm() ==
        0.0);
  CHECK(oracle::dual_membership(lb.program.basis, sol.s));
  // the primal point lies in the cone: entrywise nonnegative values and a
  // nonnegative pairing against random dual samples
  CHECK(sol.x.minCoeff() >= -1e-10);
  std::mt19937_64 rng(2027);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix V = random_matrix(rng, 2, 2);
    Vector s_dual = lambda_adjoint(lb.program.basis, Matrix(V * V.transpose()));
    CHECK(sol.x.dot(s_dual) >= -1e-10);
  }
  // measured residual stays within the certified feasibility bound
  const double nu = 2.0;
  const double feas_bound =
      8.0 * params.delta * nu *
      (nu * params.R * lb.program.A.cwiseAbs().maxCoeff() +
       lb.program.b.cwiseAbs().sum());
  CHECK(sol.feasibility_residual <= feas_bound);
  CHECK(sol.feasibility_residual <= 0.01);
}

TEST_CASE("quartic bound reaches zero") {
  InterpolantBasis basis = build_basis(make_dims(1, 2));
  Vector f(basis.dims.U);
  for (Index u = 0; u < basis.dims.U; ++u) {
    double t = basis.points(u, 0);
    double w = t * t - 1.0;
    f[u] = w * w;
  }
  LowerBoundProgram lb = lower_bound_frontend(f, basis);
  IpmParams params;
  params.delta = 1e-3;
  params.R = 10.0 * double(basis.dims.U);

  auto [sol, trace] = solve(lb.program, params);
  const double gamma = lb.decode_gamma(sol.x);
  const double tol =
      params.delta * params.R * lb.program.c.cwiseAbs().maxCoeff();
  CHECK(std::abs(gamma - 0.0) <= tol);
}

TEST_CASE("bivariate bound through the approximate-Fekete basis") {
  // f(x, y) = x^2 + y^2 + 1 has SOS-certifiable global minimum 1.
  InterpolantBasis basis = build_basis(make_dims(2, 1));
  Vector f(basis.dims.U);
  for (Index u = 0; u < basis.dims.U; ++u) {
    f[u] = basis.points.row(u).squaredNorm() + 1.0;
  }
  LowerBoundProgram lb = lower_bound_frontend(f, basis);
  IpmParams params;
  params.delta = 1e-2;
  params.R = 10.0 * double(basis.dims.U);

  auto [sol, trace] = solve(lb.program, params);
  const double gamma = lb.decode_gamma(sol.x);
  const double tol =
      params.delta * params.R * lb.program.c.cwiseAbs().maxCoeff();
  CHECK(std::abs(gamma - 1.0) <= tol);
}

TEST_CASE("naive and maintained runs agree") {
  LowerBoundProgram lb = quadratic_lower_bound();
  IpmParams params;
  params.delta = 1e-3;
  params.R = 30.0;

  auto [sol_fast, trace_fast] = solve(lb.program, params);
  params.naive_mode = true;
  auto [sol_naive, trace_naive] = solve(lb.program, params);

  CHECK((sol_fast.y - sol_naive.y).cwiseAbs().maxCoeff() <= 1e-6);
  // gamma inherits the y agreement through the (||c||_inf / delta) lift
  CHECK(std::abs(lb.decode_gamma(sol_fast.x) - lb.decode_gamma(sol_naive.x)) <=
        1e-4);

  // identical eta traces and update decisions
  REQUIRE(trace_fast.iterations.size() == trace_naive.iterations.size());
  for (size_t i = 0; i < trace_fast.iterations.size(); ++i) {
    CHECK(trace_fast.iterations[i].eta == trace_naive.iterations[i].eta);
    CHECK(trace_fast.iterations[i].rank_charged ==
          trace_naive.iterations[i].rank_charged);
    CHECK(trace_fast.iterations[i].refresh ==
          trace_naive.iterations[i].refresh);
  }
}

TEST_CASE("random univariate bounds match the grid oracle") {
  // Univariate nonnegative polynomials are SOS, so the certified bound must
  // recover the global minimum. Random quartics with positive leading
  // coefficient; the minimizer lies inside the Cauchy root bound of f'.
  std::mt19937_64 rng(211);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  InterpolantBasis basis = build_basis(make_dims(1, 2));

  for (int trial = 0; trial < 4; ++trial) {
    Vector coef(5);
    for (Index i = 0; i < 4; ++i) coef[i] = 2.0 * unif(rng);
    coef[4] = 1.0 + std::abs(unif(rng));

    auto eval = [&](double t) {
      double acc = 0.0;
      for (Index i = coef.size() - 1; i >= 0; --i) acc = acc * t + coef[i];
      return acc;
    };
    Vector f(basis.dims.U);
    for (Index u = 0; u < basis.dims.U; ++u) f[u] = eval(basis.points(u, 0));

    LowerBoundProgram lb = lower_bound_frontend(f, basis);
    IpmParams params;
    params.delta = 1e-3;
    params.R = 10.0 * double(basis.dims.U);
    auto [sol, trace] = solve(lb.program, params);
    const double gamma = lb.decode_gamma(sol.x);
    const double tol =
        params.delta * params.R * lb.program.c.cwiseAbs().maxCoeff();

    // box from the Cauchy bound on the roots of f'
    double bound = 1.0;
    for (Index i = 0; i < 4; ++i) {
      bound = std::max(bound, std::abs((i + 1) * coef[i + 1]) /
                                  (4.0 * coef[4]));
    }
    Vector lo(1), hi(1);
    lo << -(1.0 + bound);
    hi << 1.0 + bound;
    const double target = oracle::grid_min(
        [&](const Vector& t) { return eval(t[0]); }, lo, hi, 100001);
    CHECK(std::abs(gamma - target) <= tol + 1e-6);
  }
}

TEST_CASE("early exit stops once the certified gap is reached") {
  LowerBoundProgram lb = quadratic_lower_bound();
  IpmParams params;
  params.delta = 1e-2;
  params.R = 30.0;
  params.early_exit = true;
  auto [sol, trace] = solve(lb.program, params);
  CHECK(Index(trace.iterations.size()) < trace.budget);
  CHECK((double(trace.nu) / trace.eta_final) * (1.0 + 2.0 * params.eps_N) <=
        params.delta * params.delta);
}

TEST_CASE("cone exit surfaces as a diverged-solver error with a trace") {
  // Feed the barrier loop an uncentered start with an enormous objective so
  // the first Newton step leaves the cone.
  InterpolantBasis basis = build_basis(make_dims(1, 1));
  detail::EngineProblem problem;
  problem.cone = make_sos_cone(basis.P);
  problem.A = Matrix::Zero(1, 3);
  problem.A(0, 0) = 1.0;
  problem.b = Vector::Constant(1, 1e6);
  problem.c = Vector::Ones(3);
  problem.y0 = Vector::Zero(1);

  IpmParams params;
  params.delta = 1e-1;
  try {
    detail::run_barrier(problem, params);
    FAIL("expected divergence");
  } catch (const SolverDivergedError& err) {
    CHECK(err.trace().iterations.size() >= 1);
  }
}

TEST_CASE("parameter validation") {
  IpmParams params;
  params.delta = 0.0;
  CHECK_THROWS_AS(params.validate(), DimensionError);
  params.delta = 1e-3;
  params.eps_N = 0.2;
  CHECK_THROWS_AS(params.validate(), DimensionError);
  params.eps_N = 0.01;
  params.eps_S = 0.02;
  CHECK_THROWS_AS(params.validate(), DimensionError);
}

TEST_CASE("program validation rejects rank-deficient A") {
  std::mt19937_64 rng(157);
  SosProgram program = feasible_program(rng, 1, 2);
  program.A.row(1) = program.A.row(0);
  CHECK_THROWS_AS(validate_program(program), DimensionError);
}

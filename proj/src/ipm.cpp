#include "sosipm/ipm.hpp"

#include <cmath>
#include <iostream>

#include "sosipm/engine.hpp"
#include "sosipm/init_transform.hpp"

namespace sosipm {

void validate_program(const SosProgram& program) {
  const Index U = program.basis.dims.U;
  const Index m = program.A.rows();
  if (program.A.cols() != U || program.b.size() != m ||
      program.c.size() != U) {
    throw DimensionError("SosProgram: inconsistent dimensions");
  }
  if (m > U) throw DimensionError("SosProgram: m > U");
  if (!program.A.allFinite() || !program.b.allFinite() ||
      !program.c.allFinite()) {
    throw DimensionError("SosProgram: non-finite entries");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(program.A.transpose());
  if (qr.rank() < m) {
    throw DimensionError("SosProgram: A does not have full row rank");
  }
}

Index IpmParams::iteration_budget(Index nu) const {
  const double t =
      40.0 / eps_N * std::sqrt(double(nu)) * std::log(double(nu) / delta);
  return Index(std::ceil(t));
}

void IpmParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DimensionError("IpmParams: delta must lie in (0,1)");
  }
  if (!(eps_N > 0.0 && eps_N <= 0.05)) {
    throw DimensionError("IpmParams: eps_N must lie in (0, 0.05]");
  }
  if (eps_N > 0.01) {
    std::cerr << "sosipm: warning: eps_N = " << eps_N
              << " exceeds 0.01; the slowly-moving bound 2*eps_N <= 0.02 "
                 "needed by the lazy slack updates no longer holds\n";
  }
  if (!(eps_S > 0.0 && eps_S < 0.01)) {
    throw DimensionError("IpmParams: eps_S must lie in (0, 0.01)");
  }
}

Vector barrier_gradient(const SosProgram& program, const Vector& y,
                        double eta) {
  if (y.size() != program.A.rows()) {
    throw DimensionError("barrier_gradient: y has wrong length");
  }
  Vector s = program.c - program.A.transpose() * y;
  Cone cone = make_sos_cone(program.basis.P);
  return -eta * program.b + program.A * cone_gradient_map(cone, s);
}

Matrix barrier_hessian_dense(const SosProgram& program, const Vector& y) {
  if (y.size() != program.A.rows()) {
    throw DimensionError("barrier_hessian_dense: y has wrong length");
  }
  Vector s = program.c - program.A.transpose() * y;
  Cone cone = make_sos_cone(program.basis.P);
  Matrix inner = cone_hessian_inner(cone, cone_slack(cone, s));
  Matrix H = program.A * inner * program.A.transpose();
  return 0.5 * (H + H.transpose());
}

double barrier_value(const SosProgram& program, const Vector& y, double eta) {
  Vector s = program.c - program.A.transpose() * y;
  Cone cone = make_sos_cone(program.basis.P);
  return -eta * program.b.dot(y) + cone_neg_log_det(cone, s);
}

namespace detail {

// Shared tail of solve() and wsos_solve(): run the barrier loop on the
// auxiliary system and map the central-path primal back.
std::pair<Solution, IpmTrace> solve_via_aux(const Cone& cone, const Matrix& A,
                                            const Vector& b, const Vector& c,
                                            const IpmParams& params_in) {
  IpmParams params = params_in;
  if (params.R <= 0.0) params.R = 10.0 * double(cone.ambient());
  params.validate();

  AuxSystem aux = build_aux_system(cone, A, b, c, params.R, params.delta);

  EngineProblem problem;
  problem.cone = aux.cone;
  problem.A = aux.A;
  problem.b = aux.b;
  problem.c = aux.c;
  problem.y0 = aux.y0;

  EngineResult run = run_barrier(problem, params);

  // Central-path primal of the auxiliary system.
  Vector x_bar =
      cone_gradient_map(aux.cone, run.s) / run.eta_final;
  Vector x = extract(aux, x_bar, A, b, c).first;

  const Index m = A.rows();
  const double c_inf = c.cwiseAbs().maxCoeff();
  const double lift = c_inf / params.delta;

  Solution sol;
  sol.y = lift * run.y.head(m);
  sol.s = c - A.transpose() * sol.y;
  sol.x = std::move(x);
  sol.objective = c.dot(sol.x);
  sol.feasibility_residual = (A * sol.x - b).cwiseAbs().sum();
  sol.aux_duality_gap = aux.c.dot(x_bar) - aux.b.dot(run.y);
  // Certified optimality addend: the initialization transform's objective
  // bound, instantiated with the achieved gap (nu_bar/eta)(1 + 2 eps_N)
  // instead of delta^2.
  const double gap_cert = (double(aux.cone.nu()) / run.eta_final) *
                          (1.0 + 2.0 * params.eps_N);
  sol.gap_bound = (params.R * c_inf / params.delta) * gap_cert;

  return {std::move(sol), std::move(run.trace)};
}

}  // namespace detail

std::pair<Solution, IpmTrace> solve(const SosProgram& program,
                                    const IpmParams& params) {
  validate_program(program);
  Cone cone = make_sos_cone(program.basis.P);
  return detail::solve_via_aux(cone, program.A, program.b, program.c, params);
}

}  // namespace sosipm

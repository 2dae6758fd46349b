#include "sosipm/wsos.hpp"

#include "sosipm/engine.hpp"

namespace sosipm {

void validate_program(const WsosProgram& program) {
  const Index U = program.U;
  const Index m = program.A.rows();
  if (program.weights.empty()) {
    throw DimensionError("WsosProgram: no weights");
  }
  if (program.A.cols() != U || program.b.size() != m ||
      program.c.size() != U) {
    throw DimensionError("WsosProgram: inconsistent dimensions");
  }
  if (m > U) throw DimensionError("WsosProgram: m > U");
  if (!program.A.allFinite() || !program.b.allFinite() ||
      !program.c.allFinite()) {
    throw DimensionError("WsosProgram: non-finite entries");
  }
  for (const auto& weight : program.weights) {
    if (weight.f.size() != U || weight.P.rows() != U) {
      throw DimensionError("WsosProgram: weight block has wrong shape");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(weight.P);
    if (qr.rank() < weight.P.cols()) {
      throw DimensionError("WsosProgram: P_i is column rank deficient");
    }
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(program.A.transpose());
  if (qr.rank() < m) {
    throw DimensionError("WsosProgram: A does not have full row rank");
  }
}

Cone wsos_cone(const WsosProgram& program) {
  std::vector<ConeBlock> blocks;
  blocks.reserve(program.weights.size());
  for (const auto& weight : program.weights) {
    blocks.push_back(ConeBlock{weight.P, weight.f, false});
  }
  return make_wsos_cone(std::move(blocks));
}

std::pair<Vector, Matrix> wsos_gradient_hessian(const WsosProgram& program,
                                                const Vector& y, double eta) {
  if (y.size() != program.A.rows()) {
    throw DimensionError("wsos_gradient_hessian: y has wrong length");
  }
  Vector s = program.c - program.A.transpose() * y;
  Cone cone = wsos_cone(program);
  Vector g = -eta * program.b + program.A * cone_gradient_map(cone, s);
  Matrix inner = cone_hessian_inner(cone, cone_slack(cone, s));
  Matrix H = program.A * inner * program.A.transpose();
  return {std::move(g), 0.5 * (H + H.transpose())};
}

std::pair<Solution, IpmTrace> wsos_solve(const WsosProgram& program,
                                         const IpmParams& params) {
  validate_program(program);
  Cone cone = wsos_cone(program);
  return detail::solve_via_aux(cone, program.A, program.b, program.c, params);
}

}  // namespace sosipm

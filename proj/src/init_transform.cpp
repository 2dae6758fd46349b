#include "sosipm/init_transform.hpp"

#include <cmath>

namespace sosipm {

AuxSystem build_aux_system(const Cone& cone, const Matrix& A, const Vector& b,
                           const Vector& c, double R, double delta) {
  const Index U = cone.ambient();
  const Index m = A.rows();
  if (A.cols() != U || b.size() != m || c.size() != U) {
    throw DimensionError("build_aux_system: inconsistent program dimensions");
  }
  if (!(R > 0.0)) throw DimensionError("build_aux_system: require R > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DimensionError("build_aux_system: require delta in (0,1)");
  }
  const double c_inf = c.cwiseAbs().maxCoeff();
  if (!(c_inf > 0.0)) {
    throw DimensionError(
        "build_aux_system: c = 0; rescale the objective externally");
  }

  AuxSystem aux;
  aux.R = R;
  aux.delta = delta;
  aux.orig_U = U;
  aux.orig_m = m;
  aux.orig_nu = cone.nu();

  Vector s0_head = Vector::Ones(U) + (delta / c_inf) * c;
  aux.g0 = cone_gradient_map(cone, s0_head);

  aux.A.setZero(m + 1, U + 2);
  aux.A.topLeftCorner(m, U) = A;
  aux.A.col(U + 1).head(m) = b / R - A * aux.g0;
  aux.A.row(m).head(U).setOnes();
  aux.A(m, U) = 1.0;

  aux.b.resize(m + 1);
  aux.b.head(m) = b / R;
  aux.b[m] = 1.0 + aux.g0.sum();

  aux.c.setZero(U + 2);
  aux.c.head(U) = (delta / c_inf) * c;
  aux.c[U + 1] = 1.0;

  aux.y0.setZero(m + 1);
  aux.y0[m] = -1.0;

  aux.s0.resize(U + 2);
  aux.s0.head(U) = s0_head;
  aux.s0[U] = 1.0;
  aux.s0[U + 1] = 1.0;

  // Extended cone: the first block absorbs the two appended coordinates,
  // every other block is padded with zero rows.
  for (size_t i = 0; i < cone.blocks.size(); ++i) {
    const auto& block = cone.blocks[i];
    ConeBlock ext;
    if (i == 0) {
      ext.P.setZero(U + 2, block.P.cols() + 2);
      ext.P.topLeftCorner(U, block.P.cols()) = block.P;
      ext.P(U, block.P.cols()) = 1.0;
      ext.P(U + 1, block.P.cols() + 1) = 1.0;
      ext.f.resize(U + 2);
      ext.f.head(U) = block.f;
      ext.f[U] = 1.0;
      ext.f[U + 1] = 1.0;
    } else {
      ext.P.setZero(U + 2, block.P.cols());
      ext.P.topRows(U) = block.P;
      ext.f.setZero(U + 2);
      ext.f.head(U) = block.f;
    }
    ext.unit_weight = (ext.f.array() == 1.0).all();
    aux.cone.blocks.push_back(std::move(ext));
  }

  // Feasibility of the starting triple.
  Vector x0(U + 2);
  x0.head(U) = aux.g0;
  x0[U] = 1.0;
  x0[U + 1] = 1.0;
  const double scale =
      std::max({aux.b.cwiseAbs().maxCoeff(), aux.c.cwiseAbs().maxCoeff(), 1.0});
  if ((aux.A * x0 - aux.b).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericError("build_aux_system: primal start is infeasible");
  }
  if ((aux.A.transpose() * aux.y0 + aux.s0 - aux.c).cwiseAbs().maxCoeff() >
      1e-10 * scale) {
    throw NumericError("build_aux_system: dual start is infeasible");
  }
  return aux;
}

std::pair<AuxProgram, std::pair<Vector, Vector>> build_aux(
    const SosProgram& program, double R, double delta) {
  Cone cone = make_sos_cone(program.basis.P);
  AuxSystem system =
      build_aux_system(cone, program.A, program.b, program.c, R, delta);
  Vector y0 = system.y0;
  Vector s0 = system.s0;
  return {AuxProgram{std::move(system)}, {std::move(y0), std::move(s0)}};
}

std::pair<Vector, ExtractBounds> extract(const AuxSystem& aux,
                                         const Vector& x_bar,
                                         const Matrix& A_orig,
                                         const Vector& b_orig,
                                         const Vector& c_orig) {
  if (x_bar.size() != aux.orig_U + 2) {
    throw DimensionError("extract: x_bar has wrong length");
  }
  Vector x = aux.R * x_bar.head(aux.orig_U);

  const double c_inf = c_orig.cwiseAbs().maxCoeff();
  const double a_inf = A_orig.cwiseAbs().maxCoeff();
  const double nu = double(aux.orig_nu);
  ExtractBounds bounds;
  bounds.objective_bound = aux.delta * aux.R * c_inf;
  bounds.feasibility_bound =
      8.0 * aux.delta * nu *
      (nu * aux.R * a_inf + b_orig.cwiseAbs().sum());
  return {std::move(x), bounds};
}

}  // namespace sosipm

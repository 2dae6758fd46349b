#include "sosipm/cone.hpp"

#include <cmath>

namespace sosipm {

Index Cone::nu() const {
  Index total = 0;
  for (const auto& block : blocks) total += block.P.cols();
  return total;
}

Index Cone::max_block_dim() const {
  Index best = 0;
  for (const auto& block : blocks) best = std::max(best, block.P.cols());
  return best;
}

Cone make_sos_cone(const Matrix& P) {
  ConeBlock block;
  block.P = P;
  block.f = Vector::Ones(P.rows());
  block.unit_weight = true;
  Cone cone;
  cone.blocks.push_back(std::move(block));
  return cone;
}

Cone make_wsos_cone(std::vector<ConeBlock> blocks) {
  if (blocks.empty()) throw DimensionError("make_wsos_cone: no blocks");
  const Index ambient = blocks.front().P.rows();
  for (auto& block : blocks) {
    if (block.P.rows() != ambient || block.f.size() != ambient) {
      throw DimensionError("make_wsos_cone: inconsistent ambient dimension");
    }
    block.unit_weight = (block.f.array() == 1.0).all();
  }
  Cone cone;
  cone.blocks = std::move(blocks);
  return cone;
}

Matrix block_slack(const ConeBlock& block, const Vector& s) {
  if (s.size() != block.P.rows()) {
    throw DimensionError("block_slack: slack vector has wrong length");
  }
  Matrix S;
  if (block.unit_weight) {
    S = block.P.transpose() * s.asDiagonal() * block.P;
  } else {
    Vector w = block.f.cwiseProduct(s);
    S = block.P.transpose() * w.asDiagonal() * block.P;
  }
  return 0.5 * (S + S.transpose());
}

std::vector<Matrix> cone_slack(const Cone& cone, const Vector& s) {
  std::vector<Matrix> out;
  out.reserve(cone.blocks.size());
  for (const auto& block : cone.blocks) out.push_back(block_slack(block, s));
  return out;
}

Vector cone_gradient_map(const Cone& cone, const Vector& s) {
  Vector g = Vector::Zero(cone.ambient());
  for (size_t i = 0; i < cone.blocks.size(); ++i) {
    const auto& block = cone.blocks[i];
    Matrix S = block_slack(block, s);
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) {
      throw ConeExitError("cone_gradient_map: block " + std::to_string(i) +
                          " slack is not positive definite");
    }
    // diag(P S^{-1} P') without forming the full ambient x ambient matrix.
    Matrix X = llt.solve(block.P.transpose());  // L_i x ambient
    Vector diag = (block.P.cwiseProduct(X.transpose())).rowwise().sum();
    if (block.unit_weight) {
      g += diag;
    } else {
      g += block.f.cwiseProduct(diag);
    }
  }
  return g;
}

double cone_neg_log_det(const Cone& cone, const Vector& s) {
  double value = 0.0;
  for (size_t i = 0; i < cone.blocks.size(); ++i) {
    Matrix S = block_slack(cone.blocks[i], s);
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) {
      throw ConeExitError("cone_neg_log_det: block " + std::to_string(i) +
                          " slack is not positive definite");
    }
    double log_det = 0.0;
    const auto& L = llt.matrixLLT();
    for (Index j = 0; j < L.rows(); ++j) log_det += std::log(L(j, j));
    value -= 2.0 * log_det;
  }
  return value;
}

Matrix cone_hessian_inner(const Cone& cone, const std::vector<Matrix>& slack) {
  if (slack.size() != cone.blocks.size()) {
    throw DimensionError("cone_hessian_inner: block count mismatch");
  }
  const Index U = cone.ambient();
  Matrix H = Matrix::Zero(U, U);
  for (size_t i = 0; i < cone.blocks.size(); ++i) {
    const auto& block = cone.blocks[i];
    Eigen::LLT<Matrix> llt(slack[i]);
    if (llt.info() != Eigen::Success) {
      throw ConeExitError("cone_hessian_inner: block " + std::to_string(i) +
                          " slack is not positive definite");
    }
    Matrix M = block.P * llt.solve(block.P.transpose());
    Matrix M2 = M.cwiseProduct(M);
    if (block.unit_weight) {
      H += M2;
    } else {
      H += (block.f * block.f.transpose()).cwiseProduct(M2);
    }
  }
  return 0.5 * (H + H.transpose());
}

}  // namespace sosipm

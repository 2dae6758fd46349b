#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sosipm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Base class of every error thrown by this library.
class SosError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent matrix/vector dimensions in an operation or a problem file.
class DimensionError : public SosError {
 public:
  using SosError::SosError;
};

// Requested polynomial space does not fit in machine integers.
class SizeError : public SosError {
 public:
  using SosError::SosError;
};

// A dense kernel failed (non-convergence, singularity, loss of symmetry).
class NumericError : public SosError {
 public:
  using SosError::SosError;
};

// An iterate left the cone: a slack matrix that must be positive definite
// is not.
class ConeExitError : public SosError {
 public:
  using SosError::SosError;
};

// An incremental inverse update hit a singular inner system; the caller is
// expected to fall back to a full recompute.
class UpdateRejectedError : public SosError {
 public:
  using SosError::SosError;
};

// Basis construction failed (unisolvence check, rank check).
class ConstructionError : public SosError {
 public:
  using SosError::SosError;
};

// Malformed problem file.
class ParseError : public SosError {
 public:
  using SosError::SosError;
};

}  // namespace sosipm

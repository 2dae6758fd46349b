#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sosipm/ipm.hpp"
#include "sosipm/polyspace.hpp"
#include "sosipm/types.hpp"
#include "sosipm/wsos.hpp"

namespace sosipm {

enum class ProblemKind { sos, wsos, raw };

// Weight polynomial given by its values at the interpolation points and the
// half-degree of its SOS multiplier.
struct WeightSpec {
  Vector values;
  int degree = 0;
};

struct SolverParamsBlock {
  std::optional<double> delta;
  std::optional<double> eps_n;
  std::optional<double> eps_s;
  std::optional<double> R;
};

// Records the affine decode of a frontend-produced file so a plain solve can
// report the bound gamma alongside the conic solution.
struct FrontendBlock {
  std::string type;    // "lower_bound" or "interval_min"
  double f_mean = 0.0;
};

// On-disk problem document. Matrices are JSON arrays of row arrays in
// decimal, or {"rows", "cols", "b64"} objects carrying little-endian
// binary64 payloads; parse and serialize are inverse on both encodings.
struct ProblemFile {
  int schema = 1;
  ProblemKind kind = ProblemKind::sos;
  int n = 0;
  int d = 0;
  std::optional<Matrix> points;  // U x n
  std::optional<Matrix> P;       // U x L
  Matrix A;
  Vector b;
  Vector c;
  std::vector<WeightSpec> weights;  // wsos only
  SolverParamsBlock params;
  std::optional<FrontendBlock> frontend;
};

// Strict parser: malformed fields, inconsistent dimensions and non-finite
// entries raise ParseError with a positional diagnostic.
ProblemFile parse_problem(const std::string& bytes);

std::string serialize_problem(const ProblemFile& file, bool binary64 = false);

// Instantiates the basis (from explicit points/P when present, else the
// deterministic construction) and assembles the conic program.
SosProgram to_sos_program(const ProblemFile& file);
WsosProgram to_wsos_program(const ProblemFile& file);

// File params override the base values where present.
IpmParams merge_params(const ProblemFile& file, IpmParams base);

// Lower-bound reduction: max gamma s.t. f - gamma * 1 is SOS, encoded as the
// primal min <c,x> over x in Sigma with A x = A f, A an orthonormal basis of
// the hyperplane orthogonal to the all-ones vector and c = 1_U / U.
struct LowerBoundProgram {
  SosProgram program;
  double f_mean = 0.0;

  // gamma recovered from a primal point: mean(f) - mean(x).
  double decode_gamma(const Vector& x) const { return f_mean - x.mean(); }
};

LowerBoundProgram lower_bound_frontend(const Vector& f_values,
                                       const InterpolantBasis& basis);

// Same affine encoding over the weighted cone.
struct IntervalMinProgram {
  WsosProgram program;
  double f_mean = 0.0;

  double decode_gamma(const Vector& x) const { return f_mean - x.mean(); }
};

IntervalMinProgram interval_min_frontend(const Vector& f_values,
                                         const InterpolantBasis& basis,
                                         const std::vector<WeightSpec>& weights);

// The standard univariate interval weights on [-1,1]: f1 = 1 with degree d,
// f2 = 1 - t^2 with degree d-1, both as value vectors at the basis points.
std::vector<WeightSpec> interval_weights(const InterpolantBasis& basis);

// One JSON object per iteration, newline-delimited.
void write_trace_jsonl(std::ostream& out, const IpmTrace& trace);

}  // namespace sosipm

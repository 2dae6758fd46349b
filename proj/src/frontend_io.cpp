#include "sosipm/frontend_io.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>

namespace sosipm {

namespace {

using nlohmann::json;

const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const std::uint8_t* data, size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    std::uint32_t word = std::uint32_t(data[i]) << 16;
    if (i + 1 < len) word |= std::uint32_t(data[i + 1]) << 8;
    if (i + 2 < len) word |= std::uint32_t(data[i + 2]);
    out.push_back(kB64Alphabet[(word >> 18) & 63]);
    out.push_back(kB64Alphabet[(word >> 12) & 63]);
    out.push_back(i + 1 < len ? kB64Alphabet[(word >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[word & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> b64_decode(const std::string& text,
                                     const std::string& where) {
  auto value_of = [&](char ch) -> int {
    if (ch >= 'A' && ch <= 'Z') return ch - 'A';
    if (ch >= 'a' && ch <= 'z') return ch - 'a' + 26;
    if (ch >= '0' && ch <= '9') return ch - '0' + 52;
    if (ch == '+') return 62;
    if (ch == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) {
    throw ParseError(where + ": base64 payload has bad length");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t word = 0;
    for (size_t j = 0; j < 4; ++j) {
      char ch = text[i + j];
      if (ch == '=') {
        ++pad;
        word <<= 6;
        continue;
      }
      int v = value_of(ch);
      if (v < 0 || pad > 0) {
        throw ParseError(where + ": invalid base64 character");
      }
      word = (word << 6) | std::uint32_t(v);
    }
    out.push_back(std::uint8_t((word >> 16) & 0xff));
    if (pad < 2) out.push_back(std::uint8_t((word >> 8) & 0xff));
    if (pad < 1) out.push_back(std::uint8_t(word & 0xff));
  }
  return out;
}

json matrix_to_json(const Matrix& M, bool binary64) {
  if (binary64) {
    std::vector<std::uint8_t> bytes(size_t(M.size()) * sizeof(double));
    // Row-major payload.
    size_t pos = 0;
    for (Index i = 0; i < M.rows(); ++i) {
      for (Index j = 0; j < M.cols(); ++j) {
        double v = M(i, j);
        std::memcpy(bytes.data() + pos, &v, sizeof(double));
        pos += sizeof(double);
      }
    }
    return json{{"rows", M.rows()},
                {"cols", M.cols()},
                {"b64", b64_encode(bytes.data(), bytes.size())}};
  }
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v, bool binary64) {
  if (binary64) {
    Matrix M = v;
    return matrix_to_json(M, true);
  }
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

double number_at(const json& node, const std::string& where) {
  if (!node.is_number()) {
    throw ParseError(where + ": expected a number");
  }
  double v = node.get<double>();
  if (!std::isfinite(v)) {
    throw ParseError(where + ": non-finite entry");
  }
  return v;
}

Matrix matrix_from_json(const json& node, const std::string& where) {
  if (node.is_object()) {
    if (!node.contains("rows") || !node.contains("cols") ||
        !node.contains("b64")) {
      throw ParseError(where + ": binary matrix needs rows/cols/b64");
    }
    const Index rows = node.at("rows").get<Index>();
    const Index cols = node.at("cols").get<Index>();
    if (rows < 0 || cols < 0) throw ParseError(where + ": negative shape");
    auto bytes = b64_decode(node.at("b64").get<std::string>(), where);
    if (bytes.size() != size_t(rows) * size_t(cols) * sizeof(double)) {
      throw ParseError(where + ": payload size does not match shape");
    }
    Matrix M(rows, cols);
    size_t pos = 0;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        double v;
        std::memcpy(&v, bytes.data() + pos, sizeof(double));
        pos += sizeof(double);
        if (!std::isfinite(v)) {
          throw ParseError(where + ": non-finite entry at (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");
        }
        M(i, j) = v;
      }
    }
    return M;
  }
  if (!node.is_array()) {
    throw ParseError(where + ": expected an array of rows");
  }
  const Index rows = Index(node.size());
  Index cols = -1;
  Matrix M;
  for (Index i = 0; i < rows; ++i) {
    const json& row = node[size_t(i)];
    if (!row.is_array()) {
      throw ParseError(where + ": row " + std::to_string(i) +
                       " is not an array");
    }
    if (cols < 0) {
      cols = Index(row.size());
      M.resize(rows, cols);
    }
    if (Index(row.size()) != cols) {
      throw ParseError(where + ": row " + std::to_string(i) +
                       " has inconsistent length");
    }
    for (Index j = 0; j < cols; ++j) {
      M(i, j) = number_at(row[size_t(j)], where + "[" + std::to_string(i) +
                                              "][" + std::to_string(j) + "]");
    }
  }
  if (rows == 0) throw ParseError(where + ": empty matrix");
  return M;
}

Vector vector_from_json(const json& node, const std::string& where) {
  if (node.is_object()) {
    Matrix M = matrix_from_json(node, where);
    if (M.cols() != 1) throw ParseError(where + ": expected a column vector");
    return M.col(0);
  }
  if (!node.is_array()) throw ParseError(where + ": expected an array");
  Vector v(Index(node.size()));
  for (Index i = 0; i < v.size(); ++i) {
    v[i] = number_at(node[size_t(i)], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

ProblemKind kind_from_string(const std::string& text) {
  if (text == "sos") return ProblemKind::sos;
  if (text == "wsos") return ProblemKind::wsos;
  if (text == "raw") return ProblemKind::raw;
  throw ParseError("kind: expected one of sos|wsos|raw, got '" + text + "'");
}

const char* kind_to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::sos: return "sos";
    case ProblemKind::wsos: return "wsos";
    case ProblemKind::raw: return "raw";
  }
  return "sos";
}

}  // namespace

ProblemFile parse_problem(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("problem file: ") + err.what());
  }
  if (!doc.is_object()) throw ParseError("problem file: not a JSON object");

  ProblemFile file;
  file.schema = doc.value("schema", 1);
  if (file.schema != 1) {
    throw ParseError("schema: unsupported version " +
                     std::to_string(file.schema));
  }
  if (!doc.contains("kind")) throw ParseError("kind: missing");
  file.kind = kind_from_string(doc.at("kind").get<std::string>());
  file.n = doc.value("n", 0);
  file.d = doc.value("d", 0);
  if (file.kind != ProblemKind::raw && (file.n < 1 || file.d < 1)) {
    throw ParseError("n/d: must be positive for sos and wsos problems");
  }

  for (const char* field : {"A", "b", "c"}) {
    if (!doc.contains(field)) {
      throw ParseError(std::string(field) + ": missing");
    }
  }
  file.A = matrix_from_json(doc.at("A"), "A");
  file.b = vector_from_json(doc.at("b"), "b");
  file.c = vector_from_json(doc.at("c"), "c");

  if (doc.contains("points")) {
    file.points = matrix_from_json(doc.at("points"), "points");
  }
  if (doc.contains("P")) {
    file.P = matrix_from_json(doc.at("P"), "P");
  }
  if (doc.contains("weights")) {
    const json& ws = doc.at("weights");
    if (!ws.is_array()) throw ParseError("weights: expected an array");
    for (size_t i = 0; i < ws.size(); ++i) {
      const std::string where = "weights[" + std::to_string(i) + "]";
      if (!ws[i].is_object() || !ws[i].contains("values") ||
          !ws[i].contains("degree")) {
        throw ParseError(where + ": expected {values, degree}");
      }
      WeightSpec spec;
      spec.values = vector_from_json(ws[i].at("values"), where + ".values");
      spec.degree = ws[i].at("degree").get<int>();
      if (spec.degree < 0) throw ParseError(where + ".degree: negative");
      file.weights.push_back(std::move(spec));
    }
  }
  if (doc.contains("frontend")) {
    const json& fj = doc.at("frontend");
    if (!fj.is_object() || !fj.contains("type") || !fj.contains("f_mean")) {
      throw ParseError("frontend: expected {type, f_mean}");
    }
    FrontendBlock block;
    block.type = fj.at("type").get<std::string>();
    block.f_mean = number_at(fj.at("f_mean"), "frontend.f_mean");
    file.frontend = std::move(block);
  }
  if (doc.contains("params")) {
    const json& pj = doc.at("params");
    if (!pj.is_object()) throw ParseError("params: expected an object");
    if (pj.contains("delta")) {
      file.params.delta = number_at(pj.at("delta"), "params.delta");
    }
    if (pj.contains("eps_n")) {
      file.params.eps_n = number_at(pj.at("eps_n"), "params.eps_n");
    }
    if (pj.contains("eps_s")) {
      file.params.eps_s = number_at(pj.at("eps_s"), "params.eps_s");
    }
    if (pj.contains("R")) file.params.R = number_at(pj.at("R"), "params.R");
  }

  // Cross-field consistency.
  const Index U = file.A.cols();
  const Index m = file.A.rows();
  if (m > U) throw ParseError("A: more rows than columns (m > U)");
  if (file.b.size() != m) throw ParseError("b: length must equal rows of A");
  if (file.c.size() != U) throw ParseError("c: length must equal cols of A");
  if (file.kind == ProblemKind::sos) {
    PolyDims dims = make_dims(file.n, file.d);
    if (dims.U != U) {
      throw ParseError("A: column count does not match binom(n+2d,2d)");
    }
  }
  if (file.points && file.points->rows() != U) {
    throw ParseError("points: row count must equal U");
  }
  if (file.P && file.P->rows() != U) {
    throw ParseError("P: row count must equal U");
  }
  if (file.kind == ProblemKind::raw && !file.P) {
    throw ParseError("P: required for raw problems");
  }
  if (file.kind == ProblemKind::wsos && file.weights.empty()) {
    throw ParseError("weights: required for wsos problems");
  }
  for (size_t i = 0; i < file.weights.size(); ++i) {
    if (file.weights[i].values.size() != U) {
      throw ParseError("weights[" + std::to_string(i) +
                       "].values: length must equal U");
    }
  }
  return file;
}

std::string serialize_problem(const ProblemFile& file, bool binary64) {
  json doc;
  doc["schema"] = file.schema;
  doc["kind"] = kind_to_string(file.kind);
  doc["n"] = file.n;
  doc["d"] = file.d;
  if (file.points) doc["points"] = matrix_to_json(*file.points, binary64);
  if (file.P) doc["P"] = matrix_to_json(*file.P, binary64);
  doc["A"] = matrix_to_json(file.A, binary64);
  doc["b"] = vector_to_json(file.b, binary64);
  doc["c"] = vector_to_json(file.c, binary64);
  if (!file.weights.empty()) {
    json ws = json::array();
    for (const auto& w : file.weights) {
      ws.push_back(json{{"values", vector_to_json(w.values, binary64)},
                        {"degree", w.degree}});
    }
    doc["weights"] = std::move(ws);
  }
  if (file.frontend) {
    doc["frontend"] =
        json{{"type", file.frontend->type}, {"f_mean", file.frontend->f_mean}};
  }
  json pj = json::object();
  if (file.params.delta) pj["delta"] = *file.params.delta;
  if (file.params.eps_n) pj["eps_n"] = *file.params.eps_n;
  if (file.params.eps_s) pj["eps_s"] = *file.params.eps_s;
  if (file.params.R) pj["R"] = *file.params.R;
  if (!pj.empty()) doc["params"] = std::move(pj);
  return doc.dump(2);
}

SosProgram to_sos_program(const ProblemFile& file) {
  if (file.kind == ProblemKind::wsos) {
    throw ParseError("to_sos_program: file holds a wsos problem");
  }
  SosProgram program;
  if (file.kind == ProblemKind::raw) {
    InterpolantBasis basis;
    basis.P = *file.P;
    basis.dims.n = file.n;
    basis.dims.d = file.d;
    basis.dims.L = basis.P.cols();
    basis.dims.U = basis.P.rows();
    if (file.points) basis.points = *file.points;
    program.basis = std::move(basis);
  } else if (file.points) {
    // Explicit points: take P from the file or evaluate the product
    // Chebyshev basis at them, and re-check unisolvence either way.
    PolyDims dims = make_dims(file.n, file.d);
    InterpolantBasis basis;
    basis.dims = dims;
    basis.points = *file.points;
    if (basis.points.cols() != dims.n) {
      throw ParseError("points: expected " + std::to_string(dims.n) +
                       " coordinates per row");
    }
    basis.P = file.P ? *file.P : chebyshev_vandermonde(basis.points, file.d);
    if (basis.P.cols() != dims.L) {
      throw ParseError("P: column count does not match binom(n+d,d)");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(basis.P);
    if (qr.rank() < dims.L) {
      throw ParseError("P: column rank deficient");
    }
    Matrix V2d = chebyshev_vandermonde(basis.points, 2 * file.d);
    Eigen::PartialPivLU<Matrix> lu(V2d);
    if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-10) {
      throw ParseError("points: not unisolvent for the degree-2d space");
    }
    program.basis = std::move(basis);
  } else {
    program.basis = build_basis(make_dims(file.n, file.d));
  }
  program.A = file.A;
  program.b = file.b;
  program.c = file.c;
  validate_program(program);
  return program;
}

WsosProgram to_wsos_program(const ProblemFile& file) {
  if (file.kind != ProblemKind::wsos) {
    throw ParseError("to_wsos_program: file does not hold a wsos problem");
  }
  const Index U = file.A.cols();
  Matrix points;
  if (file.points) {
    points = *file.points;
  } else if (file.n == 1) {
    points = chebyshev_points(U);
  } else {
    throw ParseError("points: required for multivariate wsos problems");
  }

  WsosProgram program;
  program.U = U;
  for (const auto& spec : file.weights) {
    WsosWeight weight;
    weight.f = spec.values;
    weight.P = chebyshev_vandermonde(points, spec.degree);
    program.weights.push_back(std::move(weight));
  }
  program.A = file.A;
  program.b = file.b;
  program.c = file.c;
  validate_program(program);
  return program;
}

IpmParams merge_params(const ProblemFile& file, IpmParams base) {
  if (file.params.delta) base.delta = *file.params.delta;
  if (file.params.eps_n) base.eps_N = *file.params.eps_n;
  if (file.params.eps_s) base.eps_S = *file.params.eps_s;
  if (file.params.R) base.R = *file.params.R;
  return base;
}

LowerBoundProgram lower_bound_frontend(const Vector& f_values,
                                       const InterpolantBasis& basis) {
  const Index U = basis.dims.U;
  if (f_values.size() != U) {
    throw DimensionError("lower_bound_frontend: f_values has wrong length");
  }
  // Householder reflector mapping e1 to q = 1/sqrt(U): rows 2..U form an
  // orthonormal basis of the hyperplane orthogonal to the all-ones vector.
  Vector q = Vector::Constant(U, 1.0 / std::sqrt(double(U)));
  Vector v = q - Vector::Unit(U, 0);
  Matrix H = Matrix::Identity(U, U) - (2.0 / v.squaredNorm()) * (v * v.transpose());

  LowerBoundProgram out;
  out.program.basis = basis;
  out.program.A = H.bottomRows(U - 1);
  out.program.b = out.program.A * f_values;
  out.program.c = Vector::Constant(U, 1.0 / double(U));
  out.f_mean = f_values.mean();
  validate_program(out.program);
  return out;
}

IntervalMinProgram interval_min_frontend(
    const Vector& f_values, const InterpolantBasis& basis,
    const std::vector<WeightSpec>& weights) {
  const Index U = basis.dims.U;
  if (f_values.size() != U) {
    throw DimensionError("interval_min_frontend: f_values has wrong length");
  }
  Vector q = Vector::Constant(U, 1.0 / std::sqrt(double(U)));
  Vector v = q - Vector::Unit(U, 0);
  Matrix H = Matrix::Identity(U, U) - (2.0 / v.squaredNorm()) * (v * v.transpose());

  IntervalMinProgram out;
  out.program.U = U;
  for (const auto& spec : weights) {
    if (spec.values.size() != U) {
      throw DimensionError("interval_min_frontend: weight values mismatch");
    }
    WsosWeight weight;
    weight.f = spec.values;
    weight.P = chebyshev_vandermonde(basis.points, spec.degree);
    out.program.weights.push_back(std::move(weight));
  }
  out.program.A = H.bottomRows(U - 1);
  out.program.b = out.program.A * f_values;
  out.program.c = Vector::Constant(U, 1.0 / double(U));
  out.f_mean = f_values.mean();
  validate_program(out.program);
  return out;
}

std::vector<WeightSpec> interval_weights(const InterpolantBasis& basis) {
  if (basis.dims.n != 1) {
    throw DimensionError("interval_weights: univariate bases only");
  }
  const Index U = basis.dims.U;
  WeightSpec one;
  one.values = Vector::Ones(U);
  one.degree = basis.dims.d;
  WeightSpec box;
  box.values.resize(U);
  for (Index u = 0; u < U; ++u) {
    const double t = basis.points(u, 0);
    box.values[u] = 1.0 - t * t;
  }
  box.degree = basis.dims.d - 1;
  return {std::move(one), std::move(box)};
}

void write_trace_jsonl(std::ostream& out, const IpmTrace& trace) {
  for (const auto& rec : trace.iterations) {
    json line{{"iter", rec.iter},
              {"eta", rec.eta},
              {"rank", rec.rank_charged},
              {"refresh", rec.refresh},
              {"rejected", rec.rejected_update},
              {"flops_maintained", rec.flops_maintained},
              {"flops_naive", rec.flops_naive},
              {"flops_common", rec.flops_common},
              {"newton_proxy", rec.newton_norm_proxy}};
    if (!std::isnan(rec.centrality)) {
      line["centrality"] = rec.centrality;
      line["newton_norm"] = rec.newton_norm;
      line["slow_move_lhs"] = rec.slow_move_lhs;
      line["sandwich_ok"] = rec.sandwich_ok;
      line["slack_approx_ok"] = rec.slack_approx_ok;
      if (!std::isnan(rec.step2_residual)) {
        line["step2_residual"] = rec.step2_residual;
      }
      if (!std::isnan(rec.n_residual)) {
        line["n_residual"] = rec.n_residual;
      }
    }
    out << line.dump() << "\n";
  }
}

}  // namespace sosipm

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sosipm/frontend_io.hpp"
#include "sosipm/init_transform.hpp"
#include "sosipm/ipm.hpp"
#include "sosipm/oracle.hpp"
#include "sosipm/wsos.hpp"

namespace {

using nlohmann::json;
using namespace sosipm;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

void apply_thread_cap() {
  if (const char* env = std::getenv("SOS_IPM_THREADS")) {
    int threads = std::atoi(env);
    if (threads > 0) Eigen::setNbThreads(threads);
  }
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json rank_histogram(const IpmTrace& trace) {
  std::map<std::string, Index> hist;
  for (const auto& rec : trace.iterations) {
    if (rec.refresh) {
      ++hist["refresh"];
    } else {
      ++hist[std::to_string(rec.rank_charged)];
    }
  }
  json out = json::object();
  for (const auto& [key, count] : hist) out[key] = count;
  return out;
}

json trace_summary(const IpmTrace& trace, const IpmParams& params) {
  json out{{"iterations", trace.iterations.size()},
           {"budget", trace.budget},
           {"eta_final", trace.eta_final},
           {"nu", trace.nu},
           {"alpha", trace.alpha},
           {"rank_histogram", rank_histogram(trace)},
           {"flops",
            {{"maintained", trace.flops_maintained_total},
             {"naive_estimate", trace.flops_naive_total},
             {"common", trace.flops_common_total},
             {"maintained_total",
              trace.flops_maintained_total + trace.flops_common_total},
             {"naive_total",
              trace.flops_naive_total + trace.flops_common_total}}}};
  if (params.collect_invariants) {
    out["invariants"] = {{"max_centrality", trace.max_centrality},
                         {"max_newton_norm", trace.max_newton_norm},
                         {"max_slow_move_residual", trace.max_slow_move_residual},
                         {"max_step2_residual", trace.max_step2_residual},
                         {"max_n_residual", trace.max_n_residual},
                         {"sandwich_ok", trace.all_sandwich_ok},
                         {"slack_approx_ok", trace.all_slack_approx_ok}};
  }
  return out;
}

void maybe_write_trace(const std::string& path, const IpmTrace& trace) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) {
    std::cerr << "sosipm: cannot open trace path " << path << "\n";
    return;
  }
  write_trace_jsonl(out, trace);
}

struct CommonFlags {
  double delta = 1e-3;
  double eps_n = 0.01;
  double eps_s = 0.009;
  double R = 0.0;
  bool naive = false;
  bool check = false;
  bool early_exit = false;
  std::string trace_path;
  std::uint64_t seed = 0;

  CLI::Option* opt_delta = nullptr;
  CLI::Option* opt_eps_n = nullptr;
  CLI::Option* opt_eps_s = nullptr;
  CLI::Option* opt_R = nullptr;

  void attach(CLI::App* app) {
    opt_delta = app->add_option("--delta", delta, "accuracy parameter in (0,1)");
    opt_eps_n = app->add_option("--eps-n", eps_n, "Newton tolerance (default 0.01)");
    opt_eps_s = app->add_option("--eps-s", eps_s, "slack tolerance (default 0.009)");
    opt_R = app->add_option("--R", R, "l1 bound on primal solutions (default 10*U)");
    app->add_flag("--naive", naive, "disable Hessian-inverse maintenance");
    app->add_flag("--check", check, "collect per-iteration invariants (slow)");
    app->add_flag("--early-exit", early_exit,
                  "stop once the certified gap reaches delta^2");
    app->add_option("--trace", trace_path, "write per-iteration JSONL here");
    app->add_option("--seed", seed, "seed echoed into the report");
  }

  IpmParams params() const {
    IpmParams p;
    p.delta = delta;
    p.eps_N = eps_n;
    p.eps_S = eps_s;
    p.R = R;
    p.naive_mode = naive;
    p.collect_invariants = check;
    p.early_exit = early_exit;
    p.seed = seed;
    return p;
  }

  // Explicit command-line values win over a file's params block.
  void overlay_explicit(IpmParams& p) const {
    if (opt_delta && opt_delta->count()) p.delta = delta;
    if (opt_eps_n && opt_eps_n->count()) p.eps_N = eps_n;
    if (opt_eps_s && opt_eps_s->count()) p.eps_S = eps_s;
    if (opt_R && opt_R->count()) p.R = R;
  }
};

json params_json(const IpmParams& p) {
  return json{{"delta", p.delta},
              {"eps_n", p.eps_N},
              {"eps_s", p.eps_S},
              {"R", p.R},
              {"naive", p.naive_mode},
              {"early_exit", p.early_exit}};
}

json solution_json(const Solution& sol) {
  return json{{"objective", sol.objective},
              {"gap_bound", sol.gap_bound},
              {"feasibility_residual", sol.feasibility_residual},
              {"aux_duality_gap", sol.aux_duality_gap},
              {"y", vector_json(sol.y)},
              {"s", vector_json(sol.s)},
              {"x", vector_json(sol.x)}};
}

int run_solve(const std::string& path, const CommonFlags& flags) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "sosipm: cannot read " << path << "\n";
    return kExitUsage;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  ProblemFile file;
  try {
    file = parse_problem(buffer.str());
  } catch (const ParseError& err) {
    std::cerr << "sosipm: parse error: " << err.what() << "\n";
    return kExitUsage;
  }

  IpmParams params = merge_params(file, flags.params());
  flags.overlay_explicit(params);
  json report{{"status", "ok"}, {"seed", flags.seed}};
  try {
    Solution sol;
    IpmTrace trace;
    bool dual_ok = false;
    if (file.kind == ProblemKind::wsos) {
      WsosProgram program = to_wsos_program(file);
      std::tie(sol, trace) = wsos_solve(program, params);
      report["kind"] = "wsos";
      dual_ok = true;
      Cone cone = wsos_cone(program);
      for (size_t i = 0; i < cone.blocks.size() && dual_ok; ++i) {
        Matrix S = block_slack(cone.blocks[i], sol.s);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
        double top = eig.eigenvalues().cwiseAbs().maxCoeff();
        dual_ok = eig.eigenvalues().minCoeff() >= -1e-9 * std::max(top, 1e-300);
      }
    } else {
      SosProgram program = to_sos_program(file);
      std::tie(sol, trace) = solve(program, params);
      report["kind"] = file.kind == ProblemKind::raw ? "raw" : "sos";
      dual_ok = oracle::dual_membership(program.basis, sol.s);
    }
    report.update(solution_json(sol));
    report["dual_membership"] = dual_ok;
    report["params"] = params_json(params);
    report["trace"] = trace_summary(trace, params);
    if (file.frontend) {
      double gamma = file.frontend->f_mean - sol.x.mean();
      report["gamma"] = gamma;
      report["frontend"] = file.frontend->type;
    }
    maybe_write_trace(flags.trace_path, trace);
  } catch (const SolverDivergedError& err) {
    std::cerr << "sosipm: " << err.what() << "\n";
    maybe_write_trace(flags.trace_path, err.trace());
    json fail{{"status", "diverged"},
              {"error", err.what()},
              {"trace", trace_summary(err.trace(), params)}};
    std::cout << fail.dump(2) << std::endl;
    return kExitDiverged;
  } catch (const SosError& err) {
    std::cerr << "sosipm: " << err.what() << "\n";
    return kExitUsage;
  }
  std::cout << report.dump(2) << std::endl;
  return kExitOk;
}

Vector parse_univariate_poly(const std::string& text) {
  std::vector<double> coefs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) {
      throw ParseError("--poly: bad coefficient '" + item + "'");
    }
    coefs.push_back(value);
  }
  if (coefs.empty()) throw ParseError("--poly: empty coefficient list");
  Vector out(Index(coefs.size()));
  for (Index i = 0; i < out.size(); ++i) out[i] = coefs[size_t(i)];
  return out;
}

// Sparse multivariate polynomial: {"n":2, "terms":[{"coef":1, "exp":[2,0]}]}.
struct SparsePoly {
  int n = 1;
  std::vector<std::pair<double, std::vector<int>>> terms;

  int degree() const {
    int deg = 0;
    for (const auto& [coef, exp] : terms) {
      int total = 0;
      for (int e : exp) total += e;
      deg = std::max(deg, total);
    }
    return deg;
  }

  double eval(const Eigen::RowVectorXd& point) const {
    double acc = 0.0;
    for (const auto& [coef, exp] : terms) {
      double term = coef;
      for (int axis = 0; axis < n; ++axis) {
        term *= std::pow(point[axis], exp[size_t(axis)]);
      }
      acc += term;
    }
    return acc;
  }
};

SparsePoly parse_sparse_poly(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("--mpoly: ") + err.what());
  }
  SparsePoly poly;
  poly.n = doc.value("n", 1);
  if (poly.n < 1) throw ParseError("--mpoly: n must be positive");
  if (!doc.contains("terms") || !doc.at("terms").is_array()) {
    throw ParseError("--mpoly: missing terms array");
  }
  for (const auto& term : doc.at("terms")) {
    double coef = term.at("coef").get<double>();
    std::vector<int> exp = term.at("exp").get<std::vector<int>>();
    if (Index(exp.size()) != poly.n) {
      throw ParseError("--mpoly: exponent arity mismatch");
    }
    poly.terms.emplace_back(coef, std::move(exp));
  }
  return poly;
}

int run_lowerbound(const std::string& poly_text, const std::string& mpoly_text,
                   int d, bool interval, const std::string& emit_path,
                   const CommonFlags& flags) {
  try {
    int n = 1;
    SparsePoly poly;
    if (!mpoly_text.empty()) {
      poly = parse_sparse_poly(mpoly_text);
      n = poly.n;
    } else {
      Vector coefs = parse_univariate_poly(poly_text);
      poly.n = 1;
      for (Index i = 0; i < coefs.size(); ++i) {
        poly.terms.emplace_back(coefs[i], std::vector<int>{int(i)});
      }
    }
    if (poly.degree() > 2 * d) {
      std::cerr << "sosipm: polynomial degree " << poly.degree()
                << " exceeds 2d = " << 2 * d << "\n";
      return kExitUsage;
    }
    if (interval && n != 1) {
      std::cerr << "sosipm: interval mode is univariate only\n";
      return kExitUsage;
    }

    InterpolantBasis basis = build_basis(make_dims(n, d), flags.seed);
    Vector f_values(basis.dims.U);
    for (Index u = 0; u < basis.dims.U; ++u) {
      f_values[u] = poly.eval(basis.points.row(u));
    }

    IpmParams params = flags.params();
    json report{{"status", "ok"}, {"seed", flags.seed}};
    Solution sol;
    IpmTrace trace;
    double gamma = 0.0;
    bool dual_ok = false;

    if (interval) {
      IntervalMinProgram ip =
          interval_min_frontend(f_values, basis, interval_weights(basis));
      std::tie(sol, trace) = wsos_solve(ip.program, params);
      gamma = ip.decode_gamma(sol.x);
      Cone cone = wsos_cone(ip.program);
      dual_ok = true;
      for (size_t i = 0; i < cone.blocks.size() && dual_ok; ++i) {
        Matrix S = block_slack(cone.blocks[i], sol.s);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
        double top = eig.eigenvalues().cwiseAbs().maxCoeff();
        dual_ok = eig.eigenvalues().minCoeff() >= -1e-9 * std::max(top, 1e-300);
      }
      report["kind"] = "wsos";
      if (!emit_path.empty()) {
        ProblemFile file;
        file.kind = ProblemKind::wsos;
        file.n = n;
        file.d = d;
        file.points = basis.points;
        file.A = ip.program.A;
        file.b = ip.program.b;
        file.c = ip.program.c;
        auto specs = interval_weights(basis);
        file.weights.assign(specs.begin(), specs.end());
        file.frontend = FrontendBlock{"interval_min", ip.f_mean};
        file.params.delta = params.delta;
        if (params.R > 0) file.params.R = params.R;
        std::ofstream out(emit_path);
        out << serialize_problem(file);
      }
    } else {
      LowerBoundProgram lb = lower_bound_frontend(f_values, basis);
      std::tie(sol, trace) = solve(lb.program, params);
      gamma = lb.decode_gamma(sol.x);
      dual_ok = oracle::dual_membership(basis, sol.s);
      report["kind"] = "sos";
      if (!emit_path.empty()) {
        ProblemFile file;
        file.kind = ProblemKind::sos;
        file.n = n;
        file.d = d;
        file.points = basis.points;
        file.P = basis.P;
        file.A = lb.program.A;
        file.b = lb.program.b;
        file.c = lb.program.c;
        file.frontend = FrontendBlock{"lower_bound", lb.f_mean};
        file.params.delta = params.delta;
        if (params.R > 0) file.params.R = params.R;
        std::ofstream out(emit_path);
        out << serialize_problem(file);
      }
    }

    report["gamma"] = gamma;
    report["certificate"] = {{"dual_membership", dual_ok}};
    report.update(solution_json(sol));
    report["params"] = params_json(params);
    report["trace"] = trace_summary(trace, params);
    maybe_write_trace(flags.trace_path, trace);
    std::cout << report.dump(2) << std::endl;
    return kExitOk;
  } catch (const SolverDivergedError& err) {
    std::cerr << "sosipm: " << err.what() << "\n";
    return kExitDiverged;
  } catch (const SosError& err) {
    std::cerr << "sosipm: " << err.what() << "\n";
    return kExitUsage;
  }
}

int run_bench(const std::string& sizes_text, const CommonFlags& flags) {
  try {
    json table = json::array();
    std::stringstream ss(sizes_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ParseError("--sizes: expected n:d pairs");
      }
      int n = std::stoi(item.substr(0, colon));
      int d = std::stoi(item.substr(colon + 1));

      InterpolantBasis basis = build_basis(make_dims(n, d), flags.seed);
      const Index U = basis.dims.U;

      // Deterministic strictly-positive test polynomial through the cone
      // adjoint: values of a random SOS polynomial plus a margin.
      std::mt19937_64 rng(flags.seed + 7);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Matrix G(basis.dims.L, basis.dims.L);
      for (Index i = 0; i < G.rows(); ++i) {
        for (Index j = 0; j < G.cols(); ++j) G(i, j) = gauss(rng);
      }
      Vector f_values =
          lambda_adjoint(basis, Matrix(G * G.transpose())) / double(U) +
          Vector::Ones(U);

      LowerBoundProgram lb = lower_bound_frontend(f_values, basis);
      IpmParams params = flags.params();
      auto [sol, trace] = solve(lb.program, params);

      const double iters = double(trace.iterations.size());
      table.push_back(
          {{"n", n},
           {"d", d},
           {"L", basis.dims.L},
           {"U", U},
           {"iterations", trace.iterations.size()},
           {"rank_histogram", rank_histogram(trace)},
           {"flops_per_iter",
            {{"maintained",
              double(trace.flops_maintained_total + trace.flops_common_total) /
                  iters},
             {"naive",
              double(trace.flops_naive_total + trace.flops_common_total) /
                  iters}}},
           {"flops_total",
            {{"maintained",
              trace.flops_maintained_total + trace.flops_common_total},
             {"naive", trace.flops_naive_total + trace.flops_common_total}}},
           {"gamma", lb.decode_gamma(sol.x)}});
    }
    std::cout << table.dump(2) << std::endl;
    return kExitOk;
  } catch (const SosError& err) {
    std::cerr << "sosipm: " << err.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"Sum-of-squares optimization with lazy Hessian-inverse "
               "maintenance in the interpolant basis"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file");
  std::string solve_path;
  solve_cmd->add_option("file", solve_path, "problem file (JSON)")->required();
  CommonFlags solve_flags;
  solve_flags.attach(solve_cmd);

  // lowerbound
  auto* lb_cmd = app.add_subcommand(
      "lowerbound", "certify a polynomial lower bound via SOS/WSOS");
  std::string poly_text, mpoly_text, emit_path;
  int lb_d = 1;
  bool interval = false;
  lb_cmd->add_option("--poly", poly_text,
                     "univariate coefficients c0,c1,... (power basis)");
  lb_cmd->add_option("--mpoly", mpoly_text,
                     "sparse multivariate polynomial as JSON");
  lb_cmd->add_option("--d", lb_d, "half-degree of the SOS multiplier")
      ->required();
  lb_cmd->add_flag("--interval", interval,
                   "minimize over [-1,1] with weights {1, 1-t^2}");
  lb_cmd->add_option("--emit", emit_path, "write the reduced problem file");
  CommonFlags lb_flags;
  lb_flags.attach(lb_cmd);

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "maintained-vs-naive flop comparison");
  std::string sizes_text = "1:6";
  bench_cmd->add_option("--sizes", sizes_text, "comma list of n:d pairs");
  CommonFlags bench_flags;
  bench_flags.delta = 1e-2;
  bench_flags.attach(bench_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(solve_path, solve_flags);
    if (lb_cmd->parsed()) {
      if (poly_text.empty() && mpoly_text.empty()) {
        std::cerr << "sosipm: need --poly or --mpoly\n";
        return kExitUsage;
      }
      return run_lowerbound(poly_text, mpoly_text, lb_d, interval, emit_path,
                            lb_flags);
    }
    if (bench_cmd->parsed()) return run_bench(sizes_text, bench_flags);
  } catch (const std::exception& err) {
    std::cerr << "sosipm: " << err.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

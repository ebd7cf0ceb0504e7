#include "grassmin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grassmin/dmet.hpp"
#include "grassmin/io.hpp"
#include "grassmin/rng.hpp"
#include "grassmin/solvers.hpp"
#include "grassmin/special.hpp"

namespace grassmin {

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitLoad = 3;
constexpr int kExitValidation = 4;
constexpr int kExitNumerical = 5;

int fail(int code, const std::string& stage, const std::string& what) {
  std::cerr << "grassmin: " << stage << ": " << what << "\n";
  return code;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

void write_trace_csv(const std::string& path, const SolveReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "iter,J,residual,alpha\n";
  for (const TraceRow& row : rep.trace)
    out << row.iter << "," << fmt17(row.objective) << "," << fmt17(row.residual) << ","
        << fmt17(row.step) << "\n";
}

struct InstanceFlags {
  std::string a_path;
  std::string b_path;
  std::string c_path;
  int m = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--A", a_path, "matrix A file (symmetric PSD)")->required();
    cmd->add_option("--B", b_path, "matrix B file");
    cmd->add_option("--C", c_path, "matrix C file (B is then derived as C + A^2/2)");
    cmd->add_option("-m,--rank", m, "rank / bath dimension target")->required();
  }

  ProblemInstance load(std::vector<std::string>& warnings) const {
    if (b_path.empty() == c_path.empty())
      throw CLI::ValidationError("instance", "exactly one of --B or --C is required");
    const LoadedSym a = load_sym_matrix(a_path);
    if (a.symmetrized_with_warning)
      warnings.push_back(a_path + ": asymmetry " + std::to_string(a.relative_asymmetry) +
                         " symmetrized");
    const LoadedSym other = load_sym_matrix(b_path.empty() ? c_path : b_path);
    if (other.symmetrized_with_warning)
      warnings.push_back((b_path.empty() ? c_path : b_path) + ": asymmetry " +
                         std::to_string(other.relative_asymmetry) + " symmetrized");
    return b_path.empty() ? ProblemInstance::from_AC(a.mat, other.mat, m)
                          : ProblemInstance::from_AB(a.mat, other.mat, m);
  }
};

struct SolverFlags {
  double tol = 1e-10;
  int max_iter = 10000;
  std::uint64_t seed = 0;
  bool no_polish = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "first-order residual tolerance");
    cmd->add_option("--max-iter", max_iter, "iteration cap");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_flag("--no-polish", no_polish, "disable the convex active-face refinement");
  }

  SolverOptions options() const {
    SolverOptions o;
    o.residual_tol = tol;
    o.max_iter = max_iter;
    o.seed = seed;
    o.polish = !no_polish;
    return o;
  }
};

GrassmannPoint start_point(const ProblemInstance& inst, const std::string& p0,
                           const SolverOptions& opts) {
  if (p0 == "spectral-C") return spectral_projector(eigh(inst.C), inst.m).P;
  if (p0 == "uniform")
    throw CLI::ValidationError("--p0", "'uniform' only initializes the convex methods");
  if (p0 == "oda-limit") {
    const SolveReport rep = oda_convex(inst, ConvexPoint::uniform(inst.M, inst.m), opts);
    return dominant_projector(eigh(rep.final_D->D), inst.m).P;
  }
  if (p0.rfind("random:", 0) == 0)
    return random_grassmann(inst.M, inst.m, std::stoull(p0.substr(7)));
  if (p0.rfind("file:", 0) == 0)
    return GrassmannPoint::checked(load_sym_matrix(p0.substr(5)).mat, inst.m);
  throw CLI::ValidationError("--p0", "unknown initial guess '" + p0 + "'");
}

ConvexPoint start_density(const ProblemInstance& inst, const std::string& p0,
                          const SolverOptions& opts) {
  if (p0 == "uniform") return ConvexPoint::uniform(inst.M, inst.m);
  if (p0.rfind("file:", 0) == 0)
    return ConvexPoint::checked(load_sym_matrix(p0.substr(5)).mat, inst.m);
  return ConvexPoint::from_projector(start_point(inst, p0, opts));
}

int cmd_solve(const InstanceFlags& inst_flags, const SolverFlags& solver_flags,
              const std::string& method_name, const std::string& p0, int starts,
              const std::string& json_path, const std::string& trace_path,
              const std::string& pfinal_path) {
  std::vector<std::string> warnings;
  ProblemInstance inst = inst_flags.load(warnings);
  const SolverOptions opts = solver_flags.options();

  json j;
  j["command"] = "solve";
  j["method"] = method_name;
  j["m"] = inst.m;
  j["M"] = inst.M;

  SolveReport rep;
  if (method_name == "commuting") {
    const CommutingSolution sol = solve_commuting(inst);
    rep.status = SolveStatus::converged;
    rep.final_P = sol.P_star;
    rep.final_objective = cost(inst, sol.P_star);
    rep.final_residual = residual(inst, sol.P_star.P);
    rep.trace.push_back({0, rep.final_objective, rep.final_residual, 0.0});
    j["degenerate"] = sol.degenerate;
    j["c_gap"] = sol.gap;
  } else if (method_name == "multistart") {
    MultistartResult ms = multistart(inst, starts, opts.seed, LocalMethod::tr_grassmann, opts);
    rep = std::move(ms.best);
    j["best_start"] = ms.best_index;
    j["all_J"] = ms.all_J;
  } else {
    const auto method = parse_method(method_name);
    if (!method) throw CLI::ValidationError("--method", "unknown method '" + method_name + "'");
    if (*method == LocalMethod::oda || *method == LocalMethod::oda_convex) {
      const ConvexPoint d0 = start_density(inst, p0, opts);
      rep = (*method == LocalMethod::oda) ? oda(inst, d0, opts) : oda_convex(inst, d0, opts);
    } else {
      const GrassmannPoint g0 = start_point(inst, p0, opts);
      rep = run_local(inst, *method, g0, opts);
    }
  }

  j["status"] = to_string(rep.status);
  j["J_final"] = rep.final_objective;
  j["residual"] = rep.final_residual;
  j["iterations"] = rep.iterations;
  j["aufbau_gap"] = rep.aufbau_gap;
  for (const auto& w : rep.warnings) warnings.push_back(w);
  j["warnings"] = warnings;

  if (!pfinal_path.empty()) {
    if (rep.final_P)
      save_matrix(pfinal_path, rep.final_P->P);
    else if (rep.final_D)
      save_matrix(pfinal_path, rep.final_D->D);
    j["P_final"] = pfinal_path;
  } else {
    j["P_final"] = nullptr;
  }
  if (!trace_path.empty()) {
    write_trace_csv(trace_path, rep);
    j["trace_csv"] = trace_path;
  }
  write_json(json_path, j);
  return 0;
}

int cmd_certify(const InstanceFlags& inst_flags, const SolverFlags& solver_flags,
                const std::string& d0_spec, double gap_tol, const std::string& json_path,
                const std::string& hstar_path, const std::string& pstar_path) {
  std::vector<std::string> warnings;
  ProblemInstance inst = inst_flags.load(warnings);
  const SolverOptions opts = solver_flags.options();

  const ConvexPoint d0 = start_density(inst, d0_spec, opts);
  const SolveReport rep = oda_convex(inst, d0, opts);
  const Certificate cert = certify_global(inst, *rep.final_D, gap_tol);

  json j;
  j["command"] = "certify";
  j["m"] = inst.m;
  j["M"] = inst.M;
  j["oda_status"] = to_string(rep.status);
  j["J_relaxed"] = rep.final_objective;
  j["fw_gap"] = rep.final_residual;
  j["gap"] = cert.gap;
  j["mu"] = cert.mu;
  j["certified"] = cert.certified;
  j["warnings"] = warnings;
  if (!hstar_path.empty()) {
    save_matrix(hstar_path, cert.H_star);
    j["H_star"] = hstar_path;
  }
  if (cert.certified) {
    j["J_at_P_star"] = cost(inst, *cert.P_star);
    if (!pstar_path.empty()) {
      save_matrix(pstar_path, cert.P_star->P);
      j["P_star"] = pstar_path;
    }
  }
  write_json(json_path, j);
  return 0;
}

int cmd_bath(const std::string& gamma_path, const std::string& fragment_path, int m_single,
             int m_min, int m_max, int starts, const SolverFlags& solver_flags,
             const std::string& sweep_path, const std::string& emit_prefix,
             const std::string& json_path) {
  const LoadedSym gamma = load_sym_matrix(gamma_path);
  const std::vector<int> fragment = load_fragment(fragment_path);
  const BathSpec spec = BathSpec::build(gamma.mat, fragment);
  const RdmDiagnostics diag = validate_rdm(spec.gamma);
  const BathDimension bath = min_bath_dimension(spec);
  const SolverOptions opts = solver_flags.options();

  json j;
  j["command"] = "bath";
  j["L"] = spec.L();
  j["l"] = spec.frag_dim();
  j["M"] = spec.ext_dim();
  j["trace"] = diag.trace;
  j["idempotency"] = diag.idempotency;
  j["slater"] = diag.slater;
  j["offset"] = spec.offset;
  j["min_bath_dimension"] = bath.min_bath;

  if (m_single > 0) {
    m_min = m_single;
    m_max = m_single;
  }
  if (m_min < 1) m_min = 1;
  if (m_max < m_min) m_max = m_min;
  m_max = std::min(m_max, spec.ext_dim() - 1);

  std::ofstream sweep;
  if (!sweep_path.empty()) {
    sweep.open(sweep_path);
    if (!sweep) throw std::runtime_error(sweep_path + ": cannot open for writing");
    sweep << "m,gap,D_idempotency,min_cost,certified\n";
  }

  json rows = json::array();
  for (int m = m_min; m <= m_max; ++m) {
    const ProblemInstance inst = build_bath_problem(spec, m);
    if (!emit_prefix.empty() && m == m_min) {
      save_matrix(emit_prefix + "A.txt", inst.A);
      save_matrix(emit_prefix + "B.txt", inst.B);
      save_matrix(emit_prefix + "C.txt", inst.C);
    }
    const SolveReport rep = oda_convex(inst, ConvexPoint::uniform(inst.M, m), opts);
    const Certificate cert = certify_global(inst, *rep.final_D, opts.gap_tol, 1e-4);
    const SymMat& d = rep.final_D->D;
    const double idem = frob_norm(d.mat() * d.mat() - d.mat());

    GrassmannPoint p_best = cert.certified
                                ? *cert.P_star
                                : multistart(inst, starts, opts.seed, LocalMethod::tr_grassmann, opts)
                                      .best.final_P.value();
    // kick the trust-region result from the relaxed limit as well and keep the better
    if (!cert.certified) {
      const GrassmannPoint from_oda = dominant_projector(eigh(d), m).P;
      const SolveReport polish = trust_region_grassmann(inst, from_oda, opts);
      if (polish.final_P && polish.final_objective < cost(inst, p_best))
        p_best = *polish.final_P;
    }
    const double min_cost = cluster_cost(spec, p_best);

    if (sweep.is_open())
      sweep << m << "," << fmt17(cert.gap) << "," << fmt17(idem) << "," << fmt17(min_cost) << ","
            << (cert.certified ? 1 : 0) << "\n";
    rows.push_back({{"m", m},
                    {"gap", cert.gap},
                    {"D_idempotency", idem},
                    {"min_cost", min_cost},
                    {"certified", cert.certified}});
  }
  j["sweep"] = rows;
  if (!sweep_path.empty()) j["sweep_csv"] = sweep_path;
  write_json(json_path, j);
  return 0;
}

int cmd_oracle(const InstanceFlags& inst_flags, const SolverFlags& solver_flags, bool angle,
               int grid, int starts, const std::string& method_name,
               const std::string& samples_path, const std::string& json_path) {
  std::vector<std::string> warnings;
  ProblemInstance inst = inst_flags.load(warnings);
  const SolverOptions opts = solver_flags.options();

  json j;
  j["command"] = "oracle";
  j["warnings"] = warnings;
  if (angle) {
    const AngleScan scan = bruteforce_angle_2x2(inst, grid);
    j["mode"] = "angle";
    j["theta_star"] = scan.theta_star;
    j["J_star"] = scan.J_star;
    if (!samples_path.empty()) {
      std::ofstream out(samples_path);
      if (!out) throw std::runtime_error(samples_path + ": cannot open for writing");
      out << "theta,J\n";
      for (const auto& [t, v] : scan.samples) out << fmt17(t) << "," << fmt17(v) << "\n";
      j["samples_csv"] = samples_path;
    }
  } else {
    const auto method = parse_method(method_name);
    if (!method) throw CLI::ValidationError("--method", "unknown method '" + method_name + "'");
    const MultistartResult ms = multistart(inst, starts, opts.seed, *method, opts);
    j["mode"] = "multistart";
    j["starts"] = starts;
    j["method"] = method_name;
    j["J_star"] = ms.best.final_objective;
    j["best_start"] = ms.best_index;
    j["all_J"] = ms.all_J;
  }
  write_json(json_path, j);
  return 0;
}

int cmd_bench(const InstanceFlags& inst_flags, const SolverFlags& solver_flags,
              const std::string& p0, const std::string& csv_path, const std::string& json_path) {
  std::vector<std::string> warnings;
  ProblemInstance inst = inst_flags.load(warnings);
  const SolverOptions opts = solver_flags.options();
  const GrassmannPoint g0 = start_point(inst, p0, opts);

  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error(csv_path + ": cannot open for writing");
  csv << "method,iter,J,residual,alpha\n";

  const LocalMethod methods[] = {LocalMethod::roothaan,      LocalMethod::oda,
                                 LocalMethod::oda_convex,    LocalMethod::roothaan_tilde,
                                 LocalMethod::rgd,           LocalMethod::tr_grassmann,
                                 LocalMethod::tr_stiefel};
  json summary = json::array();
  for (LocalMethod m : methods) {
    const SolveReport rep = run_local(inst, m, g0, opts);
    for (const TraceRow& row : rep.trace)
      csv << to_string(m) << "," << row.iter << "," << fmt17(row.objective) << ","
          << fmt17(row.residual) << "," << fmt17(row.step) << "\n";
    summary.push_back({{"method", to_string(m)},
                       {"status", to_string(rep.status)},
                       {"J_final", rep.final_objective},
                       {"iterations", rep.iterations}});
  }

  json j;
  j["command"] = "bench";
  j["csv"] = csv_path;
  j["results"] = summary;
  j["warnings"] = warnings;
  write_json(json_path, j);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"quadratic Grassmann optimization: SCF/ODA solvers, convex relaxation "
               "certificates, and DMET bath construction"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "minimize J over the rank-m projectors");
  InstanceFlags solve_inst;
  SolverFlags solve_opts;
  solve_inst.attach(solve);
  solve_opts.attach(solve);
  std::string solve_method = "roothaan";
  std::string solve_p0 = "spectral-C";
  int solve_starts = 32;
  std::string solve_json, solve_trace, solve_pfinal;
  solve->add_option("--method", solve_method,
                    "roothaan|oda|oda-convex|roothaan-tilde|rgd|tr-grassmann|tr-stiefel|"
                    "commuting|multistart");
  solve->add_option("--p0", solve_p0, "spectral-C|uniform|random:<seed>|file:<path>|oda-limit");
  solve->add_option("--starts", solve_starts, "multistart count");
  solve->add_option("--json", solve_json, "JSON report path ('-' = stdout)");
  solve->add_option("--trace", solve_trace, "CSV convergence trace path");
  solve->add_option("--pfinal", solve_pfinal, "write the final point to this matrix file");

  // certify
  auto* certify = app.add_subcommand("certify", "solve the convex relaxation and certify");
  InstanceFlags cert_inst;
  SolverFlags cert_opts;
  cert_inst.attach(certify);
  cert_opts.attach(certify);
  std::string cert_d0 = "uniform";
  double cert_gap_tol = 1e-8;
  std::string cert_json, cert_hstar, cert_pstar;
  certify->add_option("--d0", cert_d0, "initial density: uniform|spectral-C|random:<seed>|file:<path>");
  certify->add_option("--gap-tol", cert_gap_tol, "certification gap threshold");
  certify->add_option("--json", cert_json, "JSON report path ('-' = stdout)");
  certify->add_option("--hstar", cert_hstar, "write H_star to this matrix file");
  certify->add_option("--pstar", cert_pstar, "write P_star (when certified)");

  // bath
  auto* bath = app.add_subcommand("bath", "DMET bath construction from a 1-RDM");
  SolverFlags bath_opts;
  bath_opts.attach(bath);
  std::string bath_gamma, bath_fragment, bath_sweep, bath_emit, bath_json;
  int bath_m = 0, bath_m_min = 0, bath_m_max = 0, bath_starts = 8;
  bath->add_option("--gamma", bath_gamma, "1-RDM matrix file")->required();
  bath->add_option("--fragment", bath_fragment, "fragment index file (one 0-based index per line)")
      ->required();
  bath->add_option("--m", bath_m, "single bath dimension");
  bath->add_option("--m-min", bath_m_min, "sweep start");
  bath->add_option("--m-max", bath_m_max, "sweep end");
  bath->add_option("--starts", bath_starts, "multistart count for non-certified entries");
  bath->add_option("--sweep-csv", bath_sweep, "per-m CSV (m, gap, idempotency, min cost, certified)");
  bath->add_option("--emit-instance", bath_emit, "write A/B/C matrix files with this prefix");
  bath->add_option("--json", bath_json, "JSON report path ('-' = stdout)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "desk-scale global-optimum oracles");
  InstanceFlags oracle_inst;
  SolverFlags oracle_opts;
  oracle_inst.attach(oracle);
  oracle_opts.attach(oracle);
  bool oracle_angle = false;
  int oracle_grid = 100000, oracle_starts = 200;
  std::string oracle_method = "tr-grassmann";
  std::string oracle_samples, oracle_json;
  oracle->add_flag("--angle", oracle_angle, "2x2 angle brute force (default: multistart)");
  oracle->add_option("--grid", oracle_grid, "angle grid size");
  oracle->add_option("--starts", oracle_starts, "multistart count");
  oracle->add_option("--method", oracle_method, "local method for multistart");
  oracle->add_option("--samples", oracle_samples, "write angle samples CSV");
  oracle->add_option("--json", oracle_json, "JSON report path ('-' = stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "run every method on one instance, shared CSV");
  InstanceFlags bench_inst;
  SolverFlags bench_opts;
  bench_inst.attach(bench);
  bench_opts.attach(bench);
  std::string bench_p0 = "spectral-C";
  std::string bench_csv = "bench.csv", bench_json;
  bench->add_option("--p0", bench_p0, "shared initial guess");
  bench->add_option("--csv", bench_csv, "convergence CSV path");
  bench->add_option("--json", bench_json, "JSON report path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(solve_inst, solve_opts, solve_method, solve_p0, solve_starts, solve_json,
                       solve_trace, solve_pfinal);
    if (certify->parsed())
      return cmd_certify(cert_inst, cert_opts, cert_d0, cert_gap_tol, cert_json, cert_hstar,
                         cert_pstar);
    if (bath->parsed())
      return cmd_bath(bath_gamma, bath_fragment, bath_m, bath_m_min, bath_m_max, bath_starts,
                      bath_opts, bath_sweep, bath_emit, bath_json);
    if (oracle->parsed())
      return cmd_oracle(oracle_inst, oracle_opts, oracle_angle, oracle_grid, oracle_starts,
                        oracle_method, oracle_samples, oracle_json);
    if (bench->parsed())
      return cmd_bench(bench_inst, bench_opts, bench_p0, bench_csv, bench_json);
  } catch (const CLI::ValidationError& e) {
    return fail(kExitUsage, "config", e.what());
  } catch (const IoError& e) {
    return fail(kExitLoad, "load", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitValidation, "validation", e.what());
  } catch (const std::runtime_error& e) {
    return fail(kExitNumerical, "numerical", e.what());
  }
  return fail(kExitUsage, "config", "no subcommand");
}

}  // namespace grassmin

#include "opt3d1d/run.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <ostream>

#include "opt3d1d/analysis.hpp"
#include "opt3d1d/output.hpp"

namespace opt3d1d {

namespace {

namespace fs = std::filesystem;

double parse_number(const std::string &text, const char *what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception &) {
  }
  throw ConfigError(std::string("invalid number in ") + what + ": '" + text + "'");
}

nlohmann::json base_manifest(const std::string &command, const RunConfig &c) {
  nlohmann::json j;
  j["command"] = command;
  j["problem"] = c.mesh_file.empty() ? c.problem : "custom";
  if (!c.mesh_file.empty()) {
    j["mesh_file"] = c.mesh_file;
    j["network_file"] = c.network_file;
  }
  j["seed"] = c.seed;
  j["segments"] = c.segments;
  j["n"] = c.n;
  j["deltas"] = {{"uhat", c.deltas.uhat}, {"psi_d", c.deltas.psi_d}, {"psi_sigma", c.deltas.psi_sigma}};
  j["solver"] = {{"kind", to_string(c.solver)},
                 {"tol", c.tol},
                 {"max_iter", c.max_iter},
                 {"preconditioner", c.preconditioner},
                 {"residual_norm", "euclidean"},
                 {"initial_guess", "zero"}};
  j["versions"] = {{"opt3d1d", "1.0.0"},
                   {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"cxx_standard", __cplusplus}};
  return j;
}

nlohmann::json discretization_json(const SolveOutcome &o) {
  nlohmann::json j;
  j["h"] = o.disc.mesh.h;
  j["vertices"] = o.disc.mesh.num_vertices();
  j["tets"] = o.disc.mesh.num_tets();
  j["N"] = o.sys.N();
  j["Nhat"] = o.sys.Nhat();
  j["junction_multipliers"] = o.sys.num_multipliers();
  j["ND"] = o.sys.ND();
  j["NSigma"] = o.sys.NSigma();
  nlohmann::json segs = nlohmann::json::array();
  for (std::size_t i = 0; i < o.disc.traces.size(); ++i) {
    const auto &p = o.disc.partitions[i];
    segs.push_back({{"segment", i},
                    {"length", o.disc.network.segments[i].length()},
                    {"crossings", o.disc.traces[i].crossing_count()},
                    {"nodes_uhat", p.uhat.size()},
                    {"nodes_psi_d", p.psi_d.size()},
                    {"nodes_psi_sigma", p.psi_sigma.size()}});
  }
  j["segments"] = segs;
  return j;
}

void write_manifest(const fs::path &dir, const nlohmann::json &j) { write_text(dir / "manifest.json", j.dump(2) + "\n"); }

int run_solve(const RunConfig &c, std::ostream &out) {
  const TestProblem problem = problem_from_config(c);
  const fs::path dir = output_root(c);
  const int n = c.n.front();
  const SolveOutcome o = solve_problem(problem, n, c);

  const Vector u_all = o.sys.dofs.expand(o.solution.U);
  write_text(dir / "solution_3d.vtk", vtk_bulk(o.disc.mesh, u_all));
  const bool has_psi = o.solution.psi_d.size() == o.sys.ND();
  Solution shown = o.solution;
  if (!has_psi) {
    shown.psi_d = Vector::Zero(o.sys.ND());
    shown.psi_sigma = Vector::Zero(o.sys.NSigma());
  }
  write_text(dir / "solution_1d.vtk", vtk_network(o.disc, o.sys, shown));

  nlohmann::json m = base_manifest("solve", c);
  m["discretization"] = discretization_json(o);
  std::vector<std::string> files{"solution_3d.vtk", "solution_1d.vtk"};
  if (problem.exact && has_psi) {
    const ErrorReport e = compute_errors(o.solution, o.sys, o.disc, *problem.exact);
    write_text(dir / "errors.csv", errors_csv({e}));
    files.push_back("errors.csv");
    out << fmt::format("E_L2 {:.6e}  E_H1 {:.6e}  Ehat_L2 {:.6e}  Ehat_H1 {:.6e}  Epsi_D {:.6e}  Epsi_Sigma {:.6e}\n",
                       e.E_L2, e.E_H1, e.Ehat_L2, e.Ehat_H1, e.Epsi_D, e.Epsi_Sigma);
  }
  if (has_psi) {
    const double J = evaluate_functional(o.sys, o.solution.U, o.solution.Uhat, o.solution.psi_d, o.solution.psi_sigma);
    m["functional"] = J;
    out << fmt::format("functional J = {:.10e}\n", J);
  }
  if (o.pcg) {
    write_text(dir / "residuals.csv", residual_csv(*o.pcg));
    files.push_back("residuals.csv");
    m["pcg"] = {{"status", to_string(o.pcg->status)},
                {"iterations", o.pcg->iterations},
                {"relative_residual", o.pcg->relative_residual()}};
    out << fmt::format("pcg: {} after {} iterations, relative residual {:.3e}\n", to_string(o.pcg->status),
                       o.pcg->iterations, o.pcg->relative_residual());
  }
  if (c.dump_matrices) {
    const auto &s = o.sys;
    const std::pair<const char *, const SparseMatrix *> mats[] = {
        {"A", &s.A},         {"Ahat_sharp", &s.Ahat_sharp}, {"Q", &s.Q},     {"Dhat_beta", &s.Dhat_beta},
        {"S_beta", &s.S_beta}, {"D", &s.D},                 {"Shat", &s.Shat}, {"G", &s.G},
        {"Ghat", &s.Ghat},   {"MD", &s.MD},                 {"MSigma", &s.MSigma}, {"B", &s.B}};
    for (const auto &[name, mat] : mats) {
      const std::string file = fmt::format("matrices/{}.mtx", name);
      write_text(dir / file, to_matrix_market(*mat));
      files.push_back(file);
    }
  }
  files.push_back("manifest.json");
  m["files"] = files;
  write_manifest(dir, m);
  out << fmt::format("artifacts written to {}\n", dir.string());
  if (o.pcg && !o.pcg->converged()) return kExitNotConverged;
  return kExitOk;
}

int run_convergence(const RunConfig &c, std::ostream &out) {
  const TestProblem problem = problem_from_config(c);
  if (!problem.exact) throw ConfigError("convergence needs a problem with an exact solution (tp1)");
  if (c.n.size() < 2) throw ConfigError("convergence needs at least two values of mesh.n");
  const fs::path dir = output_root(c);
  bool all_converged = true;
  const ConvergenceStudy study = convergence_study(problem, c.n, c.deltas, [&](const BlockSystem &sys) {
    PcgReport rep;
    Solution s = solve_system(sys, c, &rep);
    if (c.solver == SolverKind::opt_pcg && !rep.converged()) all_converged = false;
    return s;
  });
  write_text(dir / "convergence.csv", errors_csv(study.rows));
  const std::string slopes = fmt::format(
      "indicator,slope\nE_L2,{:.17g}\nE_H1,{:.17g}\nEhat_L2,{:.17g}\nEhat_H1,{:.17g}\nEpsi_D,{:.17g}\nEpsi_Sigma,{:.17g}\n",
      study.slope_L2, study.slope_H1, study.slope_hat_L2, study.slope_hat_H1, study.slope_psi_D,
      study.slope_psi_Sigma);
  write_text(dir / "slopes.csv", slopes);
  nlohmann::json m = base_manifest("convergence", c);
  m["files"] = {"convergence.csv", "slopes.csv", "manifest.json"};
  write_manifest(dir, m);
  out << errors_csv(study.rows) << slopes;
  return all_converged ? kExitOk : kExitNotConverged;
}

struct ConditionRow {
  int n;
  PartitionDeltas deltas;
  int N, Nhat, ND, NSigma;
  ConditionEstimate K, M;
  int iterations = -1;
};

ConditionRow condition_row(const TestProblem &problem, int n, const PartitionDeltas &deltas, const RunConfig &c,
                           bool with_pcg) {
  const Discretization disc = problem.discretize(n, deltas);
  const BlockSystem sys = assemble_system(disc, problem.bulk);
  ConditionRow row{n, deltas, sys.N(), sys.Nhat(), sys.ND(), sys.NSigma(), {}, {}, -1};
  const KktSystem kkt = build_kkt(sys);
  if (kkt.layout.size() <= 5000) {
    row.K = condition_dense(DenseMatrix(kkt.K));
  } else {
    row.K.value = std::numeric_limits<double>::quiet_NaN();
    row.K.converged = false;
  }
  const ReducedOperator op(sys);
  if (op.size() <= 5000) row.M = condition_dense(explicit_reduced_matrix(op));
  else row.M = condition_lanczos([&](const Vector &x) { return op.apply(x); }, op.size());
  if (with_pcg) {
    PcgOptions opt;
    opt.tolerance = c.tol;
    opt.max_iterations = c.max_iter;
    const auto prec = c.preconditioner ? BlockPreconditioner(sys) : BlockPreconditioner::identity(op.size());
    row.iterations = pcg(op, prec, opt).report.iterations;
  }
  return row;
}

std::string condition_csv(const std::vector<ConditionRow> &rows) {
  std::string s = "n,delta_uhat,delta_d,delta_sigma,N,Nhat,ND,NSigma,cond_K,cond_K_method,cond_M,cond_M_method,"
                  "pcg_iterations\n";
  for (const auto &r : rows)
    s += fmt::format("{},{:.17g},{:.17g},{:.17g},{},{},{},{},{:.17g},{},{:.17g},{},{}\n", r.n, r.deltas.uhat,
                     r.deltas.psi_d, r.deltas.psi_sigma, r.N, r.Nhat, r.ND, r.NSigma, r.K.value,
                     to_string(r.K.method), r.M.value, to_string(r.M.method), r.iterations);
  return s;
}

int run_condition(const RunConfig &c, std::ostream &out) {
  const TestProblem problem = problem_from_config(c);
  const fs::path dir = output_root(c);
  std::vector<ConditionRow> rows;
  for (int n : c.n) {
    rows.push_back(condition_row(problem, n, c.deltas, c, false));
    const auto &r = rows.back();
    out << fmt::format("n={} cond(K) = {:.6e} [{}]  cond(M) = {:.6e} [{}]\n", n, r.K.value, to_string(r.K.method),
                       r.M.value, to_string(r.M.method));
  }
  write_text(dir / "condition.csv", condition_csv(rows));
  nlohmann::json m = base_manifest("condition", c);
  m["files"] = {"condition.csv", "manifest.json"};
  write_manifest(dir, m);
  return kExitOk;
}

int run_sweep(const RunConfig &c, std::ostream &out) {
  const TestProblem problem = problem_from_config(c);
  const fs::path dir = output_root(c);
  auto axis = [](const std::vector<double> &v, double fallback) { return v.empty() ? std::vector<double>{fallback} : v; };
  const auto gu = axis(c.sweep_uhat, c.deltas.uhat), gd = axis(c.sweep_d, c.deltas.psi_d),
             gs = axis(c.sweep_sigma, c.deltas.psi_sigma);
  std::vector<ConditionRow> rows;
  for (double du : gu)
    for (double dd : gd)
      for (double ds : gs) {
        rows.push_back(condition_row(problem, c.n.front(), {du, dd, ds}, c, true));
        const auto &r = rows.back();
        out << fmt::format("delta_uhat={} delta_d={} delta_sigma={}: cond(K) {:.4e} cond(M) {:.4e} pcg {} it\n", du,
                           dd, ds, r.K.value, r.M.value, r.iterations);
      }
  write_text(dir / "sweep.csv", condition_csv(rows));
  nlohmann::json m = base_manifest("sweep", c);
  m["files"] = {"sweep.csv", "manifest.json"};
  write_manifest(dir, m);
  return kExitOk;
}

int run_compare(const RunConfig &c, std::ostream &out) {
  const TestProblem problem = problem_from_config(c);
  const fs::path dir = output_root(c);
  RunConfig opt_cfg = c;
  if (opt_cfg.solver == SolverKind::coupled) opt_cfg.solver = SolverKind::opt_pcg;
  const SolveOutcome o = solve_problem(problem, c.n.front(), opt_cfg);
  const Solution coupled = solve_coupled(o.sys);
  const std::vector<double> planes{-0.5, 0.0, 0.5};
  const SolutionComparison cmp = compare_solutions(o.solution, coupled, o.sys, o.disc, planes);
  std::string s = "segment,rel_l2,rel_linf\n";
  for (const auto &d : cmp.segments) s += fmt::format("{},{:.17g},{:.17g}\n", d.segment, d.rel_l2, d.rel_linf);
  write_text(dir / "compare.csv", s);
  std::string p = "z,rel_l2\n";
  for (std::size_t i = 0; i < planes.size(); ++i) p += fmt::format("{:.17g},{:.17g}\n", planes[i], cmp.plane_rel_l2[i]);
  write_text(dir / "compare_planes.csv", p);
  nlohmann::json m = base_manifest("compare", c);
  m["discretization"] = discretization_json(o);
  m["max_segment_rel_l2"] = cmp.max_segment_rel_l2;
  m["files"] = {"compare.csv", "compare_planes.csv", "manifest.json"};
  write_manifest(dir, m);
  out << fmt::format("max per-segment relative L2 difference of Uhat: {:.6e}\n", cmp.max_segment_rel_l2);
  for (std::size_t i = 0; i < planes.size(); ++i)
    out << fmt::format("plane z={:+.2f}: relative difference of U {:.6e}\n", planes[i], cmp.plane_rel_l2[i]);
  if (o.pcg && !o.pcg->converged()) return kExitNotConverged;
  return kExitOk;
}

} // namespace

TestProblem problem_from_config(const RunConfig &c) {
  if (!c.mesh_file.empty() || !c.network_file.empty()) {
    if (c.mesh_file.empty() || c.network_file.empty())
      throw ConfigError("custom problems need both mesh_file and network_file");
    TestProblem p;
    p.name = "custom";
    p.fixed_mesh = load_mesh(c.mesh_file);
    p.box = p.fixed_mesh->bounding_box();
    p.network = load_network(c.network_file);
    p.bulk.conductivity = c.custom.conductivity;
    p.bulk.source = constant_field(c.custom.source);
    const auto &b = c.custom.boundary;
    const auto colon = b.find(':');
    const double value = parse_number(b.substr(colon + 1), "problem.boundary");
    for (auto tag : {FaceTag::lateral, FaceTag::top, FaceTag::bottom, FaceTag::other}) {
      if (b.rfind("dirichlet:", 0) == 0) p.bulk.set(tag, DirichletData{constant_field(value)});
      else p.bulk.set(tag, NeumannData{constant_field(value)});
    }
    return p;
  }
  try {
    return make_problem(c.problem, c.seed, c.segments);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

Solution solve_system(const BlockSystem &sys, const RunConfig &c, PcgReport *report) {
  switch (c.solver) {
  case SolverKind::opt_direct: return solve_direct(build_kkt(sys), sys);
  case SolverKind::coupled: return solve_coupled(sys);
  case SolverKind::opt_pcg: break;
  }
  const ReducedOperator op(sys);
  const auto prec = c.preconditioner ? BlockPreconditioner(sys) : BlockPreconditioner::identity(op.size());
  PcgOptions opt;
  opt.tolerance = c.tol;
  opt.max_iterations = c.max_iter;
  PcgResult res = pcg(op, prec, opt);
  if (report) *report = res.report;
  return std::move(res.solution);
}

SolveOutcome solve_problem(const TestProblem &problem, int n, const RunConfig &c) {
  SolveOutcome o{problem.discretize(n, c.deltas), {}, {}, std::nullopt};
  o.sys = assemble_system(o.disc, problem.bulk);
  if (c.solver == SolverKind::opt_pcg) {
    PcgReport rep;
    o.solution = solve_system(o.sys, c, &rep);
    o.pcg = std::move(rep);
  } else {
    o.solution = solve_system(o.sys, c);
  }
  return o;
}

fs::path output_root(const RunConfig &c) {
  if (const char *env = std::getenv("OPT3D1D_OUTPUT_DIR"); env && *env) return fs::path(env);
  return fs::path(c.output_dir);
}

int run_command(const std::string &command, const RunConfig &config, std::ostream &out, std::ostream &err) {
  try {
    validate(config);
    if (command == "solve") return run_solve(config, out);
    if (command == "convergence") return run_convergence(config, out);
    if (command == "condition") return run_condition(config, out);
    if (command == "sweep") return run_sweep(config, out);
    if (command == "compare") return run_compare(config, out);
    err << "unknown command '" << command << "'\n";
    return kExitInvalidConfig;
  } catch (const ConfigError &e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const ParseError &e) {
    err << "invalid input file: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

} // namespace opt3d1d

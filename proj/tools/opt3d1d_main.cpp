// Command-line driver for the 3D-1D optimization solver.
//
//   opt3d1d solve --problem tp1 --n 4 --solver opt_pcg --tol 1e-8
//   opt3d1d convergence --problem tp1 --n 4,8,16
//   opt3d1d condition --problem tp1 --n 2
//   opt3d1d sweep --problem tp1 --n 4 --sweep-delta-d 0.25,0.5,1
//   opt3d1d compare --problem tp2_like --seed 3 --n 8
//
// Flags override values read from --config (INI).

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "opt3d1d/run.hpp"

using namespace opt3d1d;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> problem, mesh, network, n, solver, output, sweep_uhat, sweep_d, sweep_sigma;
  std::optional<std::uint64_t> seed;
  std::optional<int> segments, max_iter;
  std::optional<double> delta_uhat, delta_d, delta_sigma, tol;
  bool no_preconditioner = false;
  bool dump_matrices = false;
};

void add_flags(CLI::App *cmd, Flags &f) {
  cmd->add_option("-c,--config", f.config, "INI configuration file");
  cmd->add_option("--problem", f.problem, "tp1, tp2_like or cgtest_like");
  cmd->add_option("--mesh", f.mesh, "tet mesh file (custom problem)");
  cmd->add_option("--network", f.network, "segment network file (custom problem)");
  cmd->add_option("--seed", f.seed, "generator seed for synthetic networks");
  cmd->add_option("--segments", f.segments, "number of segments for synthetic networks");
  cmd->add_option("--n", f.n, "box subdivisions, comma separated");
  cmd->add_option("--delta-uhat", f.delta_uhat);
  cmd->add_option("--delta-d", f.delta_d);
  cmd->add_option("--delta-sigma", f.delta_sigma);
  cmd->add_option("--solver", f.solver, "opt_pcg, opt_direct or coupled");
  cmd->add_option("--tol", f.tol, "relative residual tolerance of PCG");
  cmd->add_option("--max-iter", f.max_iter);
  cmd->add_flag("--no-preconditioner", f.no_preconditioner);
  cmd->add_option("-o,--output", f.output, "output directory");
  cmd->add_flag("--dump-matrices", f.dump_matrices, "write MatrixMarket files of all blocks");
  cmd->add_option("--sweep-delta-uhat", f.sweep_uhat);
  cmd->add_option("--sweep-delta-d", f.sweep_d);
  cmd->add_option("--sweep-delta-sigma", f.sweep_sigma);
}

RunConfig build_config(const Flags &f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.problem) c.problem = *f.problem;
  if (f.mesh) c.mesh_file = *f.mesh;
  if (f.network) c.network_file = *f.network;
  if (f.seed) c.seed = *f.seed;
  if (f.segments) c.segments = *f.segments;
  if (f.n) c.n = parse_int_list(*f.n);
  if (f.delta_uhat) c.deltas.uhat = *f.delta_uhat;
  if (f.delta_d) c.deltas.psi_d = *f.delta_d;
  if (f.delta_sigma) c.deltas.psi_sigma = *f.delta_sigma;
  if (f.solver) c.solver = solver_kind_from_string(*f.solver);
  if (f.tol) c.tol = *f.tol;
  if (f.max_iter) c.max_iter = *f.max_iter;
  if (f.no_preconditioner) c.preconditioner = false;
  if (f.output) c.output_dir = *f.output;
  if (f.dump_matrices) c.dump_matrices = true;
  if (f.sweep_uhat) c.sweep_uhat = parse_double_list(*f.sweep_uhat);
  if (f.sweep_d) c.sweep_d = parse_double_list(*f.sweep_d);
  if (f.sweep_sigma) c.sweep_sigma = parse_double_list(*f.sweep_sigma);
  return c;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Optimization-based solver for 3D-1D coupled elliptic problems"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char *, const char *> commands[] = {
      {"solve", "solve one problem and write fields, errors and residual history"},
      {"convergence", "error table and fitted rates over a mesh sequence"},
      {"condition", "condition numbers of the KKT matrix and of the reduced matrix"},
      {"sweep", "conditioning and iteration counts over a grid of 1D refinement parameters"},
      {"compare", "compare the optimization solution with the monolithic coupled solve"}};
  for (const auto &[name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  RunConfig config;
  try {
    config = build_config(flags);
  } catch (const std::exception &e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  return run_command(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}

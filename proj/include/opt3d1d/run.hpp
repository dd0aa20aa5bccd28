#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "opt3d1d/config.hpp"
#include "opt3d1d/monolithic.hpp"
#include "opt3d1d/optsolver.hpp"
#include "opt3d1d/problems.hpp"

namespace opt3d1d {

/// Named problem, or a custom one from mesh + network files.
TestProblem problem_from_config(const RunConfig &config);

struct SolveOutcome {
  Discretization disc;
  BlockSystem sys;
  Solution solution;
  std::optional<PcgReport> pcg;
};

/// Solves an assembled system with the configured method.
Solution solve_system(const BlockSystem &sys, const RunConfig &config, PcgReport *report = nullptr);

SolveOutcome solve_problem(const TestProblem &problem, int n, const RunConfig &config);

/// `config.output_dir`, or $OPT3D1D_OUTPUT_DIR when set.
std::filesystem::path output_root(const RunConfig &config);

/// Exit codes for `run_command`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNotConverged = 3;

/// Runs one of solve, convergence, condition, sweep, compare. Reports go to
/// `out`, diagnostics to `err`.
int run_command(const std::string &command, const RunConfig &config, std::ostream &out, std::ostream &err);

} // namespace opt3d1d

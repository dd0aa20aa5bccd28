#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "opt3d1d/trace.hpp"

namespace opt3d1d {

enum class SolverKind { opt_pcg, opt_direct, coupled };

const char *to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string &name);

/// Constant coefficients for a problem read from mesh + network files.
struct CustomBulk {
  double conductivity = 1.0;
  double source = 0.0;
  /// "dirichlet:<value>" or "neumann:<flux>", applied to every face tag.
  std::string boundary = "dirichlet:0";
};

struct RunConfig {
  std::string problem = "tp1";
  std::string mesh_file;    ///< custom problem when both files are set
  std::string network_file;
  CustomBulk custom;
  std::uint64_t seed = 1;
  int segments = -1; ///< generator size for the synthetic problems

  std::vector<int> n{4};
  PartitionDeltas deltas;

  SolverKind solver = SolverKind::opt_pcg;
  double tol = 1e-6;
  int max_iter = -1;
  bool preconditioner = true;

  std::string output_dir = "output";
  bool dump_matrices = false;

  /// Sweep grid; an empty axis keeps the value from `deltas`.
  std::vector<double> sweep_uhat, sweep_d, sweep_sigma;
};

/// INI text with sections [problem], [mesh], [partition], [solver], [output],
/// [sweep]. Throws ConfigError on unknown keys or malformed values.
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::filesystem::path &path);

/// Throws ConfigError if a value is out of range.
void validate(const RunConfig &config);

std::vector<int> parse_int_list(const std::string &text);
std::vector<double> parse_double_list(const std::string &text);

} // namespace opt3d1d

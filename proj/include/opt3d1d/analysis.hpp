#pragma once

#include <functional>
#include <string>
#include <vector>

#include "opt3d1d/kkt.hpp"
#include "opt3d1d/problems.hpp"

namespace opt3d1d {

struct ErrorReport {
  double h = 0.0;
  PartitionDeltas deltas;
  int N = 0, Nhat = 0, ND = 0, NSigma = 0;
  double E_L2 = 0.0, E_H1 = 0.0;       ///< 3D, relative
  double Ehat_L2 = 0.0, Ehat_H1 = 0.0; ///< 1D, relative
  double Epsi_D = 0.0, Epsi_Sigma = 0.0;
};

/// Relative errors against the exact solution. 3D integrals use the
/// collapsed Gauss rule with `tet_order` points per direction, 1D integrals
/// 3-point Gauss on every sub-interval. H¹ norms include the L² part.
ErrorReport compute_errors(const Solution &sol, const BlockSystem &sys, const Discretization &disc,
                           const ExactSolution &exact, int tet_order = 5);

/// Least-squares slope of log(e) against log(h). Throws std::invalid_argument
/// for fewer than two points or non-positive data.
double fit_slope(const std::vector<double> &h, const std::vector<double> &e);

struct ConvergenceStudy {
  std::vector<ErrorReport> rows;
  double slope_L2 = 0.0, slope_H1 = 0.0, slope_hat_L2 = 0.0, slope_hat_H1 = 0.0, slope_psi_D = 0.0,
         slope_psi_Sigma = 0.0;
};

using SystemSolver = std::function<Solution(const BlockSystem &)>;

/// Solves `problem` on box meshes with the given subdivisions. Throws
/// std::invalid_argument with fewer than two meshes or without an exact solution.
ConvergenceStudy convergence_study(const TestProblem &problem, const std::vector<int> &subdivisions,
                                   const PartitionDeltas &deltas, const SystemSolver &solver);

enum class ConditionMethod { dense_svd, lanczos };

const char *to_string(ConditionMethod method);

struct ConditionEstimate {
  ConditionMethod method = ConditionMethod::dense_svd;
  double value = 0.0;
  double largest = 0.0;  ///< σ_max or λ_max
  double smallest = 0.0; ///< σ_min or λ_min
  bool converged = true;
  double achieved_tolerance = 0.0;
  int steps = 0;
};

/// σ_max / σ_min of a dense matrix (order ≤ 5000).
ConditionEstimate condition_dense(const DenseMatrix &m);

/// λ_max / λ_min of an SPD operator by Lanczos with full reorthogonalization;
/// stops when both extreme Ritz values are stable to `tolerance` (relative).
ConditionEstimate condition_lanczos(const std::function<Vector(const Vector &)> &op, int size,
                                    double tolerance = 1e-6, int max_steps = 500, std::uint64_t seed = 7);

} // namespace opt3d1d

#pragma once

#include <vector>

#include "opt3d1d/assembly.hpp"
#include "opt3d1d/kkt.hpp"
#include "opt3d1d/linear_solver.hpp"

namespace opt3d1d {

/// Single global system [[A, −Bβ], [−Bβᵀ, Â]] without interface variables.
struct CoupledSystem {
  SparseMatrix K;
  Vector rhs;
  int N = 0, Nhat = 0, Nhat_ext = 0;
};

CoupledSystem build_coupled(const BlockSystem &sys);

/// Direct solve; Ψ fields of the result are left empty. Throws
/// WellPosednessError if the system is singular.
Solution solve_coupled(const BlockSystem &sys, Ordering ordering = Ordering::colamd);

struct SegmentDifference {
  int segment = 0;
  double rel_l2 = 0.0;   ///< ‖Û_a − Û_b‖_L² / ‖Û_b‖_L²
  double rel_linf = 0.0; ///< max nodal |Û_a − Û_b| / max nodal |Û_b|
};

struct SolutionComparison {
  std::vector<SegmentDifference> segments;
  double max_segment_rel_l2 = 0.0;
  double u_rel_l2 = 0.0;          ///< nodal relative difference of U over all vertices
  std::vector<double> plane_rel_l2; ///< relative difference of U sampled on planes z = const
};

/// Compares two solutions on the same discretization (`b` is the reference).
/// Throws std::invalid_argument if the vectors do not match the system.
SolutionComparison compare_solutions(const Solution &a, const Solution &b, const BlockSystem &sys,
                                     const Discretization &disc, const std::vector<double> &planes_z = {});

/// Conservation check for a coupled solution: the reaction on Dirichlet
/// vertices against the exchange ∫β|Γ|(Û − U|Λ) evaluated by quadrature.
struct FluxBalance {
  double dirichlet_outflux = 0.0; ///< flux leaving through Dirichlet faces
  double exchange = 0.0;
  double source = 0.0;            ///< sum of the bulk load (f and Neumann data)
};

FluxBalance flux_balance(const Solution &sol, const BlockSystem &sys, const Discretization &disc);

/// Value of a P1 field (all-vertex numbering) at x, or NaN outside the mesh.
double evaluate_p1(const TetMesh &mesh, const Vector &values, const Vec3 &x);

} // namespace opt3d1d

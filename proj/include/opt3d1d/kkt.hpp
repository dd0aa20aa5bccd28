#pragma once

#include "opt3d1d/assembly.hpp"
#include "opt3d1d/linear_solver.hpp"

namespace opt3d1d {

/// Discrete state, controls and adjoints, all in the free numbering.
struct Solution {
  Vector U;           ///< N
  Vector Uhat;        ///< Nhat (junction multipliers excluded)
  Vector multipliers; ///< junction continuity multipliers
  Vector psi_d;       ///< N_D
  Vector psi_sigma;   ///< N_Sigma
  Vector P;           ///< 3D adjoint (may be empty when not computed)
  Vector Phat;        ///< 1D adjoint incl. multiplier rows (may be empty)

  /// Û followed by the multipliers.
  Vector Uhat_ext() const;
};

/// Offsets of the blocks [U; Û'; Ψ_D; Ψ_Σ; −P; −P̂'] in the KKT unknown.
struct KktLayout {
  int N = 0, Nhat_ext = 0, ND = 0, NSigma = 0;
  int u() const { return 0; }
  int uhat() const { return N; }
  int psi_d() const { return N + Nhat_ext; }
  int psi_sigma() const { return psi_d() + ND; }
  int p() const { return psi_sigma() + NSigma; }
  int phat() const { return p() + N; }
  int size() const { return phat() + Nhat_ext; }
  int controls() const { return ND + NSigma; }
};

struct KktSystem {
  KktLayout layout;
  SparseMatrix K;
  Vector rhs;
};

/// Hessian of the functional w.r.t. [U; Û'; Ψ_D; Ψ_Σ].
SparseMatrix objective_matrix(const BlockSystem &sys);
/// Constraint operator [[A, 0, 0, −Sβ], [0, Â, −D̂β, 0]].
SparseMatrix constraint_matrix(const BlockSystem &sys);
/// Linear part of the functional (nonzero only with inhomogeneous Dirichlet data).
Vector objective_linear(const BlockSystem &sys);

/// Throws std::invalid_argument on inconsistent block dimensions.
KktSystem build_kkt(const BlockSystem &sys);

/// Sparse LU of the full saddle-point matrix. Prints a warning to stderr above
/// 2e5 unknowns. Throws WellPosednessError if singular.
Solution solve_direct(const KktSystem &kkt, const BlockSystem &sys, Ordering ordering = Ordering::colamd);

/// J̃ = ½ Σ_i (‖U|Λ_i − Ψ_D,i‖² + ‖Û_i − Ψ_Σ,i‖²), with the Dirichlet lifts included.
double evaluate_functional(const BlockSystem &sys, const Vector &U, const Vector &Uhat, const Vector &psi_d,
                           const Vector &psi_sigma);

/// Relative residuals of the two state equations.
struct ConstraintResidual {
  double bulk = 0.0;
  double segment = 0.0;
};
ConstraintResidual constraint_residual(const BlockSystem &sys, const Solution &sol);

} // namespace opt3d1d

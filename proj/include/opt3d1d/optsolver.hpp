#pragma once

#include <functional>
#include <vector>

#include "opt3d1d/kkt.hpp"
#include "opt3d1d/linear_solver.hpp"

namespace opt3d1d {

/// Matrix-free reduced Hessian M of the functional in the control variables
/// X = [Ψ_D; Ψ_Σ], together with the affine data d, q of J*(X).
/// The system must outlive the operator.
class ReducedOperator {
public:
  explicit ReducedOperator(const BlockSystem &sys);

  int size() const { return nd_ + ns_; }
  int ND() const { return nd_; }
  int NSigma() const { return ns_; }
  const BlockSystem &system() const { return *sys_; }

  /// M δX via two forward and two adjoint solves.
  Vector apply(const Vector &dX) const;
  const Vector &d() const { return d_; }
  double q() const { return q_; }
  /// J*(X) = ½(Xᵀ M X + 2 dᵀX + q).
  double energy(const Vector &X) const;
  /// Gradient M X + d.
  Vector gradient(const Vector &X) const { return apply(X) + d_; }

  /// States U = A⁻¹(Sβ Ψ_Σ + f), Û' = Â⁻¹(D̂β Ψ_D + g); adjoints left empty.
  Solution recover(const Vector &X) const;

  /// Per-segment Â blocks are needed by the preconditioner.
  const SparseMatrix &Ahat_ext() const { return ahat_; }
  const SparseMatrix &Dhat_beta_ext() const { return dhat_; }
  const SparseMatrix &Ghat_ext() const { return ghat_; }

private:
  const BlockSystem *sys_;
  int nd_ = 0, ns_ = 0;
  SparseMatrix ahat_, dhat_, ghat_, shat_;
  Factorization a_fact_, ahat_fact_;
  Vector u0_, uhat0_;
  Vector d_;
  double q_ = 0.0;
};

/// Block-diagonal preconditioner: per segment, the top-left block
/// (Â_i⁻¹D̂β_i)ᵀ Ĝ_i (Â_i⁻¹D̂β_i) + M^D_i and the bottom-right block M^Σ_i,
/// each factorized densely once. Identity when disabled.
class BlockPreconditioner {
public:
  /// Throws WellPosednessError on a singular per-segment block.
  explicit BlockPreconditioner(const BlockSystem &sys);
  static BlockPreconditioner identity(int size);

  Vector apply(const Vector &r) const;
  bool is_identity() const { return blocks_.empty() && size_ > 0; }
  int size() const { return size_; }

  /// Dense top-left block of segment i, for inspection.
  const DenseMatrix &top_left(int segment) const { return blocks_.at(segment).top; }

private:
  BlockPreconditioner() = default;
  struct SegmentBlock {
    int offset_d, count_d, offset_s, count_s;
    DenseMatrix top;
    Eigen::LLT<DenseMatrix> top_llt, bottom_llt;
  };
  std::vector<SegmentBlock> blocks_;
  int nd_ = 0;
  int size_ = 0;
};

enum class PcgStatus { converged, max_iterations, not_positive_definite };

const char *to_string(PcgStatus status);

struct PcgOptions {
  double tolerance = 1e-6;
  int max_iterations = -1; ///< -1: 10 (N_D + N_Σ)
  /// Recompute M X + d every `audit_every` iterations and record the drift.
  int audit_every = 0;
  bool record_energy = false;
};

struct PcgReport {
  PcgStatus status = PcgStatus::converged;
  int iterations = 0;
  double d_norm = 0.0;
  std::vector<double> residuals;   ///< ‖r_k‖, k = 0..iterations
  std::vector<double> energies;    ///< J*(X_k) if requested
  double max_audit_drift = 0.0;    ///< max ‖r_rec − (M X + d)‖ / ‖d‖
  double last_zeta = 0.0;
  bool converged() const { return status == PcgStatus::converged; }
  double relative_residual() const { return residuals.empty() || d_norm == 0.0 ? 0.0 : residuals.back() / d_norm; }
};

using LinearOp = std::function<Vector(const Vector &)>;

/// Preconditioned CG for M X + d = 0 with generic operators. Stops when
/// ‖r_k‖₂ / ‖d‖₂ ≤ tol. Returns X = 0 immediately if d = 0.
PcgReport pcg_core(const LinearOp &M, const LinearOp &precondition, const Vector &d, Vector &X,
                   const PcgOptions &options, const std::function<double(const Vector &, const Vector &)> &energy = {});

struct PcgResult {
  Solution solution;
  Vector X;
  PcgReport report;
};

PcgResult pcg(const ReducedOperator &op, const BlockPreconditioner &prec, const PcgOptions &options = {},
              const Vector *X0 = nullptr);

/// Dense M built column by column (for small problems and tests).
DenseMatrix explicit_reduced_matrix(const ReducedOperator &op);

} // namespace opt3d1d

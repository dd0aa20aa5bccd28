#pragma once

#include <array>
#include <variant>
#include <vector>

#include "opt3d1d/geom.hpp"
#include "opt3d1d/network.hpp"
#include "opt3d1d/trace.hpp"

namespace opt3d1d {

// ---------------------------------------------------------------------------
// Problem data for the 3D bulk.

struct DirichletData {
  ScalarField value;
};
/// Prescribed K grad(u) . n with n the outward normal of the box.
struct NeumannData {
  ScalarField flux;
};
using BoundaryCondition3D = std::variant<NeumannData, DirichletData>;

struct BulkData {
  double conductivity = 1.0;
  ScalarField source = constant_field(0.0);
  /// Indexed by FaceTag; defaults to homogeneous Neumann everywhere.
  std::array<BoundaryCondition3D, 4> boundary{NeumannData{constant_field(0.0)}, NeumannData{constant_field(0.0)},
                                              NeumannData{constant_field(0.0)}, NeumannData{constant_field(0.0)}};

  const BoundaryCondition3D &on(FaceTag tag) const { return boundary[static_cast<int>(tag)]; }
  void set(FaceTag tag, BoundaryCondition3D bc) { boundary[static_cast<int>(tag)] = std::move(bc); }
};

/// Everything that depends only on geometry and the 1D refinement parameters.
struct Discretization {
  TetMesh mesh;
  SegmentNetwork network;
  std::vector<TraceDecomposition> traces;
  std::vector<SegmentPartitions> partitions;
  PartitionDeltas deltas;
};

Discretization discretize(TetMesh mesh, SegmentNetwork network, const PartitionDeltas &deltas,
                          TieBreak tie_break = TieBreak::lowest_index);

// ---------------------------------------------------------------------------
// Degree-of-freedom maps. "all" indices count every vertex / 1D node; "free"
// indices skip Dirichlet nodes, whose values live in `lift`.

struct DofMap3D {
  std::vector<int> free_of_vertex; ///< -1 for Dirichlet vertices
  std::vector<int> vertex_of_free;
  Vector lift; ///< per vertex: Dirichlet value, 0 on free vertices
  SparseMatrix restriction; ///< free x all selection

  int num_free() const { return static_cast<int>(vertex_of_free.size()); }
  int num_all() const { return static_cast<int>(free_of_vertex.size()); }
  Vector expand(const Vector &free) const;
};

struct HatDofMap {
  std::vector<int> node_offset; ///< per segment, into the all-node numbering
  std::vector<int> free_of_node;
  std::vector<int> node_of_free;
  Vector lift;
  SparseMatrix restriction;

  int num_free() const { return static_cast<int>(node_of_free.size()); }
  int num_all() const { return static_cast<int>(free_of_node.size()); }
  Vector expand(const Vector &free) const;
  /// Nodal values of segment i from an all-node vector.
  Vector segment_values(const Vector &all, int segment, int count) const {
    return all.segment(node_offset[segment], count);
  }
};

struct InterfaceDofMap {
  std::vector<int> offset_d;
  std::vector<int> offset_sigma;
  int num_d = 0;
  int num_sigma = 0;
};

DofMap3D make_dof_map_3d(const TetMesh &mesh, const BulkData &bulk);
HatDofMap make_hat_dof_map(const SegmentNetwork &network, const std::vector<SegmentPartitions> &partitions);
InterfaceDofMap make_interface_dof_map(const std::vector<SegmentPartitions> &partitions);

// ---------------------------------------------------------------------------
// Assembly operations. Matrices returned here are in the "all" numbering
// unless stated otherwise.

/// P1 stiffness K grad(phi_k) . grad(phi_l) over the whole box.
/// Throws AssemblyError on a tet with non-positive volume.
SparseMatrix assemble_stiffness(const TetMesh &mesh, double conductivity);

/// Sum over segments of beta |Gamma| phi_k|L phi_l|L.
SparseMatrix assemble_trace_mass(const TetMesh &mesh, const SegmentNetwork &network,
                                 const std::vector<TraceDecomposition> &traces);

struct AssembledA {
  SparseMatrix full;     ///< stiffness + trace mass, all vertices
  SparseMatrix reduced;  ///< Dirichlet rows/columns eliminated
  Vector lift_rhs;       ///< -A_fd u_d, to be added to the free load
  DofMap3D dofs;
};

AssembledA assemble_A(const TetMesh &mesh, const SegmentNetwork &network,
                      const std::vector<TraceDecomposition> &traces, const BulkData &bulk);

struct AssembledAhat {
  SparseMatrix full;   ///< block-diagonal over segments, all nodes
  SparseMatrix sharp;  ///< Dirichlet endpoints eliminated
  SparseMatrix Q;      ///< junction continuity rows over free hat dofs
  Vector lift_rhs;
  HatDofMap dofs;
};

AssembledAhat assemble_Ahat(const SegmentNetwork &network, const std::vector<SegmentPartitions> &partitions);

/// Coupling and mass-type blocks, all in the "all" numbering.
struct CouplingBlocks {
  SparseMatrix Dhat_beta; ///< Nhat_all x N_D
  SparseMatrix S_beta;    ///< N_all x N_Sigma
  SparseMatrix D;         ///< N_all x N_D
  SparseMatrix Shat;      ///< Nhat_all x N_Sigma
  SparseMatrix G;         ///< N_all x N_all
  SparseMatrix Ghat;      ///< Nhat_all x Nhat_all
  SparseMatrix MD;        ///< N_D x N_D
  SparseMatrix MSigma;    ///< N_Sigma x N_Sigma
};

CouplingBlocks assemble_coupling(const TetMesh &mesh, const SegmentNetwork &network,
                                 const std::vector<TraceDecomposition> &traces,
                                 const std::vector<SegmentPartitions> &partitions);

struct LoadVectors {
  Vector bulk;    ///< int f phi_k + Neumann flux terms, all vertices
  Vector segment; ///< int |Sigma| gbar phihat_k, all 1D nodes
};

LoadVectors assemble_rhs(const TetMesh &mesh, const SegmentNetwork &network,
                         const std::vector<TraceDecomposition> &traces,
                         const std::vector<SegmentPartitions> &partitions, const BulkData &bulk);

/// int phi_k|L phihat_l over each segment (optionally weighted by beta |Gamma|).
SparseMatrix assemble_B(const TetMesh &mesh, const SegmentNetwork &network,
                        const std::vector<TraceDecomposition> &traces,
                        const std::vector<SegmentPartitions> &partitions, bool weighted = false);

// ---------------------------------------------------------------------------

/// All discrete blocks, restricted to free dofs. N = free 3D dofs, Nhat = free
/// 1D dofs (junction multipliers are not counted here), N_D / N_Sigma =
/// interface dofs (never constrained).
struct BlockSystem {
  DofMap3D dofs;
  HatDofMap hat;
  InterfaceDofMap psi;

  SparseMatrix A, Ahat_sharp, Q, Dhat_beta, S_beta, G, Ghat, MD, MSigma, D, Shat, B, B_beta;
  Vector f, g;

  /// Terms generated by nonzero Dirichlet data inside the cost functional
  /// and the monolithic system. All zero for homogeneous data.
  struct Lift {
    Vector G_u;     ///< G_fd u_d            (N)
    Vector D_u;     ///< D^T u_lift          (N_D)
    Vector Ghat_u;  ///< Ghat_fd uhat_d      (Nhat)
    Vector Shat_u;  ///< Shat^T uhat_lift    (N_Sigma)
    double c_u = 0.0, c_uhat = 0.0; ///< lift energies u^T G u, uhat^T Ghat uhat
    Vector coupled_f, coupled_g;
  } lift;

  struct Full {
    SparseMatrix stiffness, trace_mass, A, Ahat;
    CouplingBlocks coupling;
    SparseMatrix B, B_beta;
    LoadVectors load;
  } full;

  int N() const { return static_cast<int>(A.rows()); }
  int Nhat() const { return static_cast<int>(Ahat_sharp.rows()); }
  int num_multipliers() const { return static_cast<int>(Q.rows()); }
  int Nhat_ext() const { return Nhat() + num_multipliers(); }
  int ND() const { return psi.num_d; }
  int NSigma() const { return psi.num_sigma; }

  /// [[Ahat_sharp, Q^T], [Q, 0]]; equals Ahat_sharp without junctions.
  SparseMatrix Ahat() const;
  /// Pads a hat-space operator / vector with zero rows for the multipliers.
  SparseMatrix pad_hat_rows(const SparseMatrix &m) const;
  Vector pad_hat(const Vector &v) const;
};

BlockSystem assemble_system(const Discretization &disc, const BulkData &bulk);

/// MatrixMarket coordinate dump with 17 significant digits.
std::string to_matrix_market(const SparseMatrix &m);

} // namespace opt3d1d

#pragma once

// Independent reference computations used by the tests. Nothing here reuses
// the library's tracing, quadrature or operator code paths.

#include <opt3d1d/assembly.hpp>
#include <opt3d1d/kkt.hpp>

#include <optional>

namespace oracle {

using opt3d1d::DenseMatrix;
using opt3d1d::Vec3;
using opt3d1d::Vector;

/// First tet (lowest index) containing x, with barycentrics; brute force.
struct Location {
  int tet = -1;
  std::array<double, 4> bary{};
};
std::optional<Location> locate(const opt3d1d::TetMesh &mesh, const Vec3 &x, double tol = 1e-10);

/// Values of all P1 basis functions at x as (vertex, value) pairs.
std::vector<std::pair<int, double>> p1_basis(const opt3d1d::TetMesh &mesh, const Vec3 &x);

/// Hat function k of equally spaced nodes, written out directly.
double hat(const std::vector<double> &nodes, int k, double s);

/// All-node coupling blocks by composite trapezoid rule with step `step`
/// along every segment and brute-force point location.
struct DenseCoupling {
  DenseMatrix Dhat_beta, S_beta, D, Shat, G, Ghat, MD, MSigma, B;
};
DenseCoupling trapezoid_coupling(const opt3d1d::Discretization &disc, const opt3d1d::BlockSystem &sys,
                                 double step = 1e-5);

/// Reduced matrix built densely from explicit inverses.
DenseMatrix dense_reduced_matrix(const opt3d1d::BlockSystem &sys);

/// The affine term d built densely.
Vector dense_reduced_rhs(const opt3d1d::BlockSystem &sys);

/// Number of sign changes of "which tets contain the point" along the
/// segment, sampled with `samples` points (counts face crossings).
int sampled_crossings(const opt3d1d::TetMesh &mesh, const opt3d1d::Segment &seg, int samples);

} // namespace oracle

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "opt3d1d/assembly.hpp"

namespace opt3d1d {

/// Closed-form solution pair. 1D quantities are evaluated at centerline points.
struct ExactSolution {
  std::function<double(const Vec3 &)> u;
  std::function<Vec3(const Vec3 &)> grad_u;
  std::function<double(const Vec3 &)> uhat;
  /// dû/ds along the segment tangent.
  std::function<double(const Segment &, double)> duhat_ds;
  /// Trace of u on the inclusion surface at arclength s (radius R away from
  /// the centerline).
  std::function<double(const Segment &, double)> u_check;
};

struct TestProblem {
  std::string name;
  BoundingBox box;
  SegmentNetwork network;
  BulkData bulk;
  std::optional<ExactSolution> exact;
  /// Mesh read from a file; when set, `mesh(n)` ignores n.
  std::optional<TetMesh> fixed_mesh;

  TetMesh mesh(int n) const;
  Discretization discretize(int n, const PartitionDeltas &deltas) const;
};

/// Manufactured problem on [-1,1]^3 with one segment on the z axis.
TestProblem tp1();

/// Seeded branching network in [-1,1]^3 with homogeneous Dirichlet data on the
/// cube and at the inlets on z = -1.
TestProblem tp2_like(std::uint64_t seed, int count = 19);

/// Seeded network with a small uniform Neumann inflow on the cube and
/// Dirichlet 5e-3 at the inlets.
TestProblem cgtest_like(std::uint64_t seed, int count);

/// Builds a problem by name: "tp1", "tp2_like", "cgtest_like".
TestProblem make_problem(const std::string &name, std::uint64_t seed = 1, int count = -1);

struct ResidualReport {
  double bulk = 0.0;      ///< max |−∇·(K∇u) − f|
  double segment = 0.0;   ///< max |−(K̃|Σ|û')' + β|Γ|(û − ǔ) − |Σ|ḡ|
  double interface = 0.0; ///< max |K∇u·n − β(û − ǔ)| on the inclusion surface
  int samples = 0;
  double max() const { return std::max({bulk, segment, interface}); }
  bool passed(double tol = 1e-10) const { return max() <= tol; }
};

/// Checks the strong-form identities at sample points. Outer derivatives are
/// taken by fourth-order central differences of the analytic first
/// derivatives. Throws std::invalid_argument if the problem has no exact solution.
ResidualReport residual_check(const TestProblem &problem);

} // namespace opt3d1d

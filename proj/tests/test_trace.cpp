#include <doctest.h>

#include <opt3d1d/problems.hpp>
#include <opt3d1d/trace.hpp>

#include "oracles.hpp"

using namespace opt3d1d;

namespace {

Segment make(Vec3 a, Vec3 b) {
  Segment s;
  s.a = a;
  s.b = b;
  return s;
}

void check_trace_consistent(const TetMesh &mesh, const Segment &seg, const TraceDecomposition &tr) {
  REQUIRE(!tr.cells.empty());
  CHECK(tr.breakpoints.front() == 0.0);
  CHECK(tr.breakpoints.back() == doctest::Approx(seg.length()).epsilon(1e-14));
  double total = 0.0;
  for (const auto &c : tr.cells) {
    CHECK(c.interval.length() > 0.0);
    total += c.interval.length();
    const double mid = 0.5 * (c.interval.lo + c.interval.hi);
    const auto bary = c.barycentric(mid);
    Vec3 x = Vec3::Zero();
    for (int k = 0; k < 4; ++k) {
      CHECK(bary[k] >= -1e-10);
      x += bary[k] * mesh.vertices[mesh.tets[c.tet][k]];
    }
    CHECK((x - seg.point(mid)).norm() < 1e-12);
  }
  CHECK(total == doctest::Approx(seg.length()).epsilon(1e-13));
}

} // namespace

TEST_CASE("axis segment crosses n-1 times and its cells tile it") {
  for (int n : {2, 4, 8}) {
    const TestProblem p = tp1();
    const TetMesh mesh = p.mesh(n);
    const TraceDecomposition tr = trace_segment(mesh, p.network.segments[0]);
    CHECK(tr.crossing_count() == n - 1);
    check_trace_consistent(mesh, p.network.segments[0], tr);
  }
}

TEST_CASE("oblique segments agree with brute-force sampled crossings") {
  const TetMesh mesh = build_box_mesh(3, Vec3::Constant(-1), Vec3::Constant(1));
  const std::vector<Segment> segs{make(Vec3(-0.91, -0.73, -0.87), Vec3(0.83, 0.61, 0.94)),
                                  make(Vec3(0.12, -0.95, 0.33), Vec3(-0.41, 0.88, -0.21)),
                                  make(Vec3(-0.5, 0.2, 0.1), Vec3(-0.45, 0.25, 0.12))};
  for (const auto &seg : segs) {
    const TraceDecomposition tr = trace_segment(mesh, seg);
    check_trace_consistent(mesh, seg, tr);
    CHECK(tr.crossing_count() == oracle::sampled_crossings(mesh, seg, 20000));
  }
}

TEST_CASE("tie-break choice changes the owning tet but not the geometry") {
  const TetMesh mesh = build_box_mesh(2, Vec3::Constant(-1), Vec3::Constant(1));
  const Segment seg = tp1().network.segments[0];
  const auto lo = trace_segment(mesh, seg, TieBreak::lowest_index);
  const auto hi = trace_segment(mesh, seg, TieBreak::highest_index);
  REQUIRE(lo.breakpoints.size() == hi.breakpoints.size());
  for (std::size_t k = 0; k < lo.breakpoints.size(); ++k) CHECK(lo.breakpoints[k] == doctest::Approx(hi.breakpoints[k]));
  CHECK(lo.cells[0].tet < hi.cells[0].tet);
  check_trace_consistent(mesh, seg, hi);
}

TEST_CASE("segment leaving the mesh is rejected") {
  const TetMesh mesh = build_box_mesh(2, Vec3::Constant(-1), Vec3::Constant(1));
  CHECK_THROWS_AS(trace_segment(mesh, make(Vec3(0, 0, 0), Vec3(0, 0, 1.5))), GeometryError);
}

TEST_CASE("partition sizes follow delta times the crossing count") {
  const Segment seg = make(Vec3(0, 0, 0), Vec3(0, 0, 2));
  CHECK(build_partition(seg, PartitionRole::uhat, 1.0, 7).size() == 7);
  CHECK(build_partition(seg, PartitionRole::psi_d, 0.5, 7).size() == 4);
  CHECK(build_partition(seg, PartitionRole::psi_d, 0.1, 7).size() == 2);
  CHECK(build_partition(seg, PartitionRole::psi_sigma, 2.0, 7).size() == 14);
  const Partition1D p = build_partition(seg, PartitionRole::uhat, 1.0, 5);
  CHECK(p.nodes.front() == 0.0);
  CHECK(p.length() == doctest::Approx(2.0));
  CHECK(p.nodes[1] == doctest::Approx(0.5));

  const auto loc = p.evaluate(0.6);
  CHECK(loc.element == 1);
  CHECK(loc.value[0] == doctest::Approx(0.8));
  CHECK(loc.value[1] == doctest::Approx(0.2));
  CHECK(loc.slope[0] == doctest::Approx(-2.0));
  Vector v(5);
  v << 0, 1, 4, 9, 16;
  CHECK(p.interpolate(v, 0.75) == doctest::Approx(2.5));

  const TestProblem tp = tp1();
  const auto d = tp.discretize(8, {1.0, 0.5, 0.5});
  CHECK(d.partitions[0].uhat.size() == 7);
  CHECK(d.partitions[0].psi_d.size() == 4);
}

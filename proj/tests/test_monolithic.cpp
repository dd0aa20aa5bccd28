#include <doctest.h>

#include <opt3d1d/monolithic.hpp>
#include <opt3d1d/optsolver.hpp>
#include <opt3d1d/problems.hpp>

#include <cmath>

using namespace opt3d1d;

TEST_CASE("coupled system is symmetric and its solution conserves mass") {
  const TestProblem p = tp2_like(6, 12);
  const auto disc = p.discretize(6, {});
  const BlockSystem sys = assemble_system(disc, p.bulk);
  const CoupledSystem cs = build_coupled(sys);
  CHECK(cs.K.rows() == sys.N() + sys.Nhat_ext());
  CHECK((cs.K - SparseMatrix(cs.K.transpose())).norm() <= 1e-14 * cs.K.norm());

  const Solution s = solve_coupled(sys);
  CHECK(s.psi_d.size() == 0);
  CHECK(s.U.size() == sys.N());
  const FluxBalance fb = flux_balance(s, sys, disc);
  // Everything produced in the bulk or received from the network leaves through the box.
  CHECK(std::abs(fb.dirichlet_outflux - (fb.exchange + fb.source)) <= 1e-8 * std::abs(fb.dirichlet_outflux));
  CHECK(fb.exchange > 0.0);
}

TEST_CASE("comparing a solution with itself gives zero differences") {
  const TestProblem p = tp2_like(6, 8);
  const auto disc = p.discretize(4, {});
  const BlockSystem sys = assemble_system(disc, p.bulk);
  const Solution s = solve_coupled(sys);
  const auto cmp = compare_solutions(s, s, sys, disc, {-0.5, 0.0, 0.5});
  CHECK(cmp.segments.size() == disc.network.segments.size());
  CHECK(cmp.max_segment_rel_l2 == 0.0);
  CHECK(cmp.u_rel_l2 == 0.0);
  REQUIRE(cmp.plane_rel_l2.size() == 3);
  for (double v : cmp.plane_rel_l2) CHECK(v == 0.0);

  Solution broken = s;
  broken.U.conservativeResize(s.U.size() - 1);
  CHECK_THROWS_AS(compare_solutions(broken, s, sys, disc), std::invalid_argument);
}

TEST_CASE("optimization and monolithic solutions are close on the manufactured problem") {
  const TestProblem p = tp1();
  const auto disc = p.discretize(8, {});
  const BlockSystem sys = assemble_system(disc, p.bulk);
  const Solution opt = solve_direct(build_kkt(sys), sys);
  const Solution mono = solve_coupled(sys);
  const auto cmp = compare_solutions(opt, mono, sys, disc, {0.0});
  CHECK(cmp.max_segment_rel_l2 < 5e-2);
  CHECK(cmp.u_rel_l2 < 5e-2);
}

TEST_CASE("P1 evaluation reproduces linear fields") {
  const TetMesh mesh = build_box_mesh(3, Vec3::Constant(-1), Vec3::Constant(1));
  Vector v(mesh.num_vertices());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) v(i) = 2.0 * mesh.vertices[i].x() - mesh.vertices[i].z() + 0.5;
  CHECK(evaluate_p1(mesh, v, Vec3(0.13, -0.77, 0.41)) == doctest::Approx(0.26 - 0.41 + 0.5));
  CHECK(std::isnan(evaluate_p1(mesh, v, Vec3(1.5, 0, 0))));
}

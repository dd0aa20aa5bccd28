#include <doctest.h>

#include <opt3d1d/kkt.hpp>
#include <opt3d1d/problems.hpp>

#include <Eigen/SparseLU>

using namespace opt3d1d;

namespace {

struct Fixture {
  TestProblem problem;
  Discretization disc;
  BlockSystem sys;
  explicit Fixture(TestProblem p, int n, PartitionDeltas deltas = {})
      : problem(std::move(p)), disc(problem.discretize(n, deltas)), sys(assemble_system(disc, problem.bulk)) {}
};

Vector sparse_solve(const SparseMatrix &m, const Vector &b) {
  Eigen::SparseLU<SparseMatrix> lu(m);
  REQUIRE(lu.info() == Eigen::Success);
  return lu.solve(b);
}

} // namespace

TEST_CASE("KKT matrix is symmetric and sized from its blocks") {
  Fixture f(tp2_like(3, 8), 3);
  const KktSystem kkt = build_kkt(f.sys);
  const KktLayout &l = kkt.layout;
  CHECK(l.size() == 2 * (f.sys.N() + f.sys.Nhat_ext()) + f.sys.ND() + f.sys.NSigma());
  CHECK(kkt.K.rows() == l.size());
  CHECK((kkt.K - SparseMatrix(kkt.K.transpose())).norm() <= 1e-15 * kkt.K.norm());
}

TEST_CASE("direct KKT solve satisfies the state equations and stationarity") {
  Fixture f(tp1(), 4);
  const KktSystem kkt = build_kkt(f.sys);
  const Solution s = solve_direct(kkt, f.sys);
  const auto res = constraint_residual(f.sys, s);
  CHECK(res.bulk < 1e-12);
  CHECK(res.segment < 1e-12);

  Vector x(kkt.layout.size());
  x << s.U, s.Uhat_ext(), s.psi_d, s.psi_sigma, -s.P, -s.Phat;
  CHECK((kkt.K * x - kkt.rhs).norm() <= 1e-10 * kkt.rhs.norm());
  CHECK(evaluate_functional(f.sys, s.U, s.Uhat, s.psi_d, s.psi_sigma) >= 0.0);
}

TEST_CASE("orderings give the same KKT solution") {
  Fixture f(tp2_like(11, 10), 4);
  const KktSystem kkt = build_kkt(f.sys);
  const Solution a = solve_direct(kkt, f.sys, Ordering::colamd);
  const Solution b = solve_direct(kkt, f.sys, Ordering::amd);
  CHECK((a.U - b.U).norm() <= 1e-10 * a.U.norm());
  CHECK((a.psi_sigma - b.psi_sigma).norm() <= 1e-10 * a.psi_sigma.norm());
}

TEST_CASE("homogeneous data gives the zero solution") {
  TestProblem p = tp2_like(2, 6);
  p.bulk.source = constant_field(0.0);
  for (auto &seg : p.network.segments) seg.source_gbar = constant_field(0.0);
  Fixture f(std::move(p), 3);
  const Solution s = solve_direct(build_kkt(f.sys), f.sys);
  CHECK(s.U.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.Uhat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.psi_d.cwiseAbs().maxCoeff() == 0.0);
  CHECK(evaluate_functional(f.sys, s.U, s.Uhat, s.psi_d, s.psi_sigma) == 0.0);
}

TEST_CASE("zero exchange coefficient decouples the two state equations") {
  TestProblem p = tp1();
  p.network.segments[0].beta = 0.0;
  Fixture f(std::move(p), 4);
  CHECK(f.sys.S_beta.norm() == 0.0);
  CHECK(f.sys.Dhat_beta.norm() == 0.0);
  const Solution s = solve_direct(build_kkt(f.sys), f.sys);
  const Vector u = sparse_solve(f.sys.A, f.sys.f);
  const Vector uh = sparse_solve(f.sys.Ahat(), f.sys.pad_hat(f.sys.g));
  CHECK((s.U - u).norm() <= 1e-10 * u.norm());
  CHECK((s.Uhat_ext() - uh).norm() <= 1e-10 * uh.norm());
}

TEST_CASE("functional evaluation matches the objective matrix") {
  TestProblem p = tp2_like(4, 6);
  Fixture f(std::move(p), 3);
  const SparseMatrix Gc = objective_matrix(f.sys);
  const KktLayout l{f.sys.N(), f.sys.Nhat_ext(), f.sys.ND(), f.sys.NSigma()};
  Vector x = Vector::LinSpaced(Gc.rows(), 0.0, 5.0).array().cos();
  x.segment(l.uhat() + f.sys.Nhat(), f.sys.num_multipliers()).setZero();
  const double J = evaluate_functional(f.sys, x.segment(l.u(), l.N), x.segment(l.uhat(), f.sys.Nhat()),
                                       x.segment(l.psi_d(), l.ND), x.segment(l.psi_sigma(), l.NSigma));
  CHECK(J == doctest::Approx(0.5 * x.dot(Gc * x)).epsilon(1e-12));
  CHECK(objective_linear(f.sys).norm() == 0.0);
}

TEST_CASE("inconsistent blocks are rejected") {
  Fixture f(tp1(), 2);
  BlockSystem broken = f.sys;
  broken.MD = SparseMatrix(broken.ND() + 1, broken.ND() + 1);
  CHECK_THROWS_AS(build_kkt(broken), std::invalid_argument);
}

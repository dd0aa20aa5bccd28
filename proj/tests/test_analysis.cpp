#include <doctest.h>

#include <opt3d1d/analysis.hpp>
#include <opt3d1d/quadrature.hpp>

#include <cmath>

using namespace opt3d1d;

namespace {

double integrate_box(const TetMesh &mesh, int order, const std::function<double(const Vec3 &)> &f) {
  const auto rule = tet_rule_collapsed(order);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_tets(); ++e)
    for (const auto &q : rule) {
      Vec3 x = Vec3::Zero();
      for (int k = 0; k < 4; ++k) x += q.bary[k] * mesh.vertices[mesh.tets[e][k]];
      sum += q.w * mesh.tet_volume(e) * f(x);
    }
  return sum;
}

double integrate_segment(const Segment &seg, const std::function<double(double)> &f) {
  double sum = 0.0;
  for (const auto &q : gauss_legendre(10, 0.0, seg.length())) sum += q.w * f(q.x);
  return sum;
}

} // namespace

TEST_CASE("slope fit") {
  const std::vector<double> h{0.5, 0.25, 0.125};
  CHECK(fit_slope(h, {0.25, 0.0625, 0.015625}) == doctest::Approx(2.0));
  CHECK(fit_slope(h, {3.0, 1.5, 0.75}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_slope({0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_slope(h, {1.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("dense condition numbers") {
  CHECK(condition_dense(DenseMatrix::Identity(5, 5)).value == doctest::Approx(1.0));
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -10.0;
  CHECK(condition_dense(d).value == doctest::Approx(10.0));
}

TEST_CASE("Lanczos recovers the extreme eigenvalues of an SPD operator") {
  const int n = 400;
  Vector diag(n);
  for (int i = 0; i < n; ++i) diag(i) = 1.0 + 99.0 * i / (n - 1);
  const auto est = condition_lanczos([&](const Vector &x) { return Vector(diag.cwiseProduct(x)); }, n, 1e-8);
  CHECK(est.method == ConditionMethod::lanczos);
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(100.0).epsilon(1e-5));
  CHECK(est.steps <= n);

  // 1D Laplacian with known spectrum 2 - 2 cos(k pi / (n + 1)).
  const int m = 120;
  auto lap = [&](const Vector &x) {
    Vector y = 2.0 * x;
    y.head(m - 1) -= x.tail(m - 1);
    y.tail(m - 1) -= x.head(m - 1);
    return y;
  };
  const double lmin = 2 - 2 * std::cos(M_PI / (m + 1)), lmax = 2 - 2 * std::cos(m * M_PI / (m + 1));
  const auto lap_est = condition_lanczos(lap, m, 1e-10);
  CHECK(lap_est.value == doctest::Approx(lmax / lmin).epsilon(1e-6));
}

TEST_CASE("exact-solution norms of the manufactured problem") {
  const TestProblem p = tp1();
  const TetMesh mesh = p.mesh(2);
  const auto &ex = *p.exact;
  const double u2 = integrate_box(mesh, 6, [&](const Vec3 &x) { return ex.u(x) * ex.u(x); });
  const double g2 = integrate_box(mesh, 6, [&](const Vec3 &x) { return ex.grad_u(x).squaredNorm(); });
  CHECK(u2 == doctest::Approx(3448.0 / 675.0).epsilon(1e-13));
  CHECK(g2 == doctest::Approx(608.0 / 135.0).epsilon(1e-13));
  CHECK(integrate_box(mesh, 3, p.bulk.source) == doctest::Approx(16.0 / 3.0).epsilon(1e-13));

  const Segment &seg = p.network.segments[0];
  const double c2 = integrate_segment(seg, [&](double s) { return std::pow(ex.u_check(seg, s), 2); });
  const double d2 = integrate_segment(seg, [&](double s) { return std::pow(ex.duhat_ds(seg, s), 2); });
  const double k = integrate_segment(seg, [&](double s) { return seg.ktilde(s) * std::pow(ex.duhat_ds(seg, s), 2); });
  CHECK(c2 == doctest::Approx(749950001.0 / 375000000.0).epsilon(1e-13));
  CHECK(d2 == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  CHECK(k == doctest::Approx(1.0 / 3.0 * 4.0 * 2.0 / 5.0 + 0.5 * 8.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("interpolating a linear exact solution gives zero error") {
  auto lin = [](const Vec3 &x) { return 1.0 + 0.2 * x.x() - 0.1 * x.y() + 0.3 * x.z(); };
  TestProblem p = tp1();
  p.bulk.set(FaceTag::lateral, DirichletData{lin});
  p.bulk.set(FaceTag::top, DirichletData{lin});
  p.bulk.set(FaceTag::bottom, DirichletData{lin});
  Segment &seg = p.network.segments[0];
  seg.endpoint_bc = {Dirichlet{lin(seg.a)}, Dirichlet{lin(seg.b)}};
  ExactSolution ex;
  ex.u = lin;
  ex.grad_u = [](const Vec3 &) { return Vec3(0.2, -0.1, 0.3); };
  ex.uhat = lin;
  ex.duhat_ds = [](const Segment &s, double) { return Vec3(0.2, -0.1, 0.3).dot(s.tangent()); };
  ex.u_check = [lin](const Segment &s, double t) { return lin(s.point(t)) + 0.05; };

  const auto disc = p.discretize(3, {1.0, 0.5, 1.5});
  const BlockSystem sys = assemble_system(disc, p.bulk);
  Vector u_all(disc.mesh.num_vertices());
  for (std::size_t i = 0; i < disc.mesh.num_vertices(); ++i) u_all(i) = lin(disc.mesh.vertices[i]);
  const auto &parts = disc.partitions[0];
  auto nodal = [&](const Partition1D &part, double shift) {
    Vector v(part.size());
    for (int k = 0; k < part.size(); ++k) v(k) = lin(disc.network.segments[0].point(part.nodes[k])) + shift;
    return v;
  };
  Solution s;
  s.U = sys.dofs.restriction * u_all;
  s.Uhat = sys.hat.restriction * nodal(parts.uhat, 0.0);
  s.psi_d = nodal(parts.psi_d, 0.05);
  s.psi_sigma = nodal(parts.psi_sigma, 0.0);
  const ErrorReport e = compute_errors(s, sys, disc, ex);
  CHECK(e.E_L2 < 1e-14);
  CHECK(e.E_H1 < 1e-13);
  CHECK(e.Ehat_L2 < 1e-14);
  CHECK(e.Ehat_H1 < 1e-13);
  CHECK(e.Epsi_D < 1e-14);
  CHECK(e.Epsi_Sigma < 1e-14);
  CHECK(e.N == sys.N());

  s.U.setZero();
  CHECK(compute_errors(s, sys, disc, ex).E_L2 > 0.0);
}

TEST_CASE("error quadrature is stable under refinement of the rule") {
  const TestProblem p = tp1();
  const auto disc = p.discretize(4, {});
  const BlockSystem sys = assemble_system(disc, p.bulk);
  const Solution s = solve_direct(build_kkt(sys), sys);
  const ErrorReport a = compute_errors(s, sys, disc, *p.exact, 5);
  const ErrorReport b = compute_errors(s, sys, disc, *p.exact, 8);
  // The default rule is exact up to degree 7; the squared error is degree 8.
  CHECK(a.E_L2 == doctest::Approx(b.E_L2).epsilon(1e-6));
  CHECK(a.E_H1 == doctest::Approx(b.E_H1).epsilon(1e-6));
  CHECK(a.Ehat_L2 == b.Ehat_L2);
}

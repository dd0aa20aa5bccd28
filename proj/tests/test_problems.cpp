#include <doctest.h>

#include <opt3d1d/problems.hpp>

#include <numbers>

using namespace opt3d1d;

TEST_CASE("manufactured solution satisfies the strong equations") {
  const TestProblem p = tp1();
  const ResidualReport r = residual_check(p);
  CHECK(r.samples > 0);
  CHECK(r.bulk < 1e-10);
  CHECK(r.segment < 1e-10);
  CHECK(r.interface < 1e-10);
  CHECK(r.passed());
}

TEST_CASE("perturbed data is caught by the residual check") {
  TestProblem p = tp1();
  p.network.segments[0].beta *= 1.01;
  CHECK_FALSE(residual_check(p).passed());
  TestProblem q = tp1();
  q.bulk.source = [f = q.bulk.source](const Vec3 &x) { return f(x) + 1e-6; };
  CHECK(residual_check(q).bulk == doctest::Approx(1e-6).epsilon(1e-3));
  CHECK_THROWS_AS(residual_check(tp2_like(1)), std::invalid_argument);
}

TEST_CASE("manufactured problem data") {
  const TestProblem p = tp1();
  const Segment &s = p.network.segments[0];
  CHECK(s.beta == doctest::Approx(2e-2 / (2.0 + 1e-4)).epsilon(1e-15));
  CHECK(s.ktilde(0.0) == doctest::Approx(1.0 / 3.0 + 0.5));
  CHECK(s.ktilde(1.0) == doctest::Approx(0.5));
  CHECK(s.gbar(0.3) == 3.0);
  CHECK(std::get<Dirichlet>(s.endpoint_bc[0]).value == 1.0);
  CHECK(p.exact->uhat(Vec3(0, 0, 0.5)) == doctest::Approx(1.75));
  CHECK(p.exact->u(Vec3(1, 1, 0)) == doctest::Approx(0.0));
  CHECK(std::holds_alternative<DirichletData>(p.bulk.on(FaceTag::lateral)));
  CHECK(std::holds_alternative<NeumannData>(p.bulk.on(FaceTag::top)));
}

TEST_CASE("synthetic networks are seeded and carry their coefficients") {
  const TestProblem a = tp2_like(4), b = tp2_like(4), c = tp2_like(5);
  CHECK(a.network.segments.size() == 19);
  CHECK(a.network.segments[7].b == b.network.segments[7].b);
  CHECK(a.network.segments[7].b != c.network.segments[7].b);
  for (const auto &s : a.network.segments) {
    CHECK(s.radius == 1e-2);
    CHECK(s.beta == 5e-2);
    CHECK(s.ktilde(0.0) == 100.0);
    CHECK(s.gbar(0.0) == 100.0);
  }
  CHECK(!a.exact);

  const TestProblem g = cgtest_like(2, 50);
  CHECK(g.network.segments.size() == 50);
  CHECK(g.bulk.conductivity == 2e-4);
  int inlets = 0;
  for (const auto &s : g.network.segments)
    if (const auto *d = std::get_if<Dirichlet>(&s.endpoint_bc[0])) {
      ++inlets;
      CHECK(d->value == 5e-3);
    }
  CHECK(inlets >= 1);

  CHECK(make_problem("tp2_like", 4).network.segments.size() == 19);
  CHECK(make_problem("cgtest_like", 4).network.segments.size() == 50);
  CHECK(make_problem("tp1").name == "tp1");
  CHECK_THROWS_AS(make_problem("tp3"), std::invalid_argument);
}

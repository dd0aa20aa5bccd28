#include <doctest.h>

#include <opt3d1d/quadrature.hpp>

#include <cmath>

using namespace opt3d1d;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// ∫ over the reference tet of x^a y^b z^c.
double tet_monomial(int a, int b, int c) { return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3); }

} // namespace

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n = 1; n <= 8; ++n) {
    const auto rule = gauss_legendre(n, 0.0, 2.0);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (const auto &q : rule) sum += q.w * std::pow(q.x, p);
      CHECK(sum == doctest::Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule merges breakpoints within tolerance") {
  const std::vector<std::vector<double>> lists{{0.0, 1.0, 2.0}, {0.0, 0.5, 1.0 + 1e-15, 2.0}};
  const auto cells = composite_rule(lists, 3, 1e-12);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].interval.hi == 0.5);
  double total = 0.0;
  for (const auto &c : cells)
    for (const auto &q : c.points) total += q.w * q.x * q.x * q.x * q.x * q.x;
  CHECK(total == doctest::Approx(64.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("tet rules") {
  double w = 0.0;
  for (const auto &q : tet_rule_degree2()) w += q.w;
  CHECK(w == doctest::Approx(1.0));
  // Degree-2 monomials with the symmetric 4-point rule (bary 1..3 are x,y,z).
  double xy = 0.0, zz = 0.0;
  for (const auto &q : tet_rule_degree2()) {
    xy += q.w * q.bary[1] * q.bary[2] / 6.0;
    zz += q.w * q.bary[3] * q.bary[3] / 6.0;
  }
  CHECK(xy == doctest::Approx(tet_monomial(1, 1, 0)).epsilon(1e-14));
  CHECK(zz == doctest::Approx(tet_monomial(0, 0, 2)).epsilon(1e-14));

  for (int n : {2, 4, 6}) {
    const auto rule = tet_rule_collapsed(n);
    const int degree = 2 * n - 3;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) {
          double sum = 0.0;
          for (const auto &q : rule)
            sum += q.w / 6.0 * std::pow(q.bary[1], a) * std::pow(q.bary[2], b) * std::pow(q.bary[3], c);
          CHECK(sum == doctest::Approx(tet_monomial(a, b, c)).epsilon(1e-12));
        }
  }
}

TEST_CASE("triangle rule is exact for quadratics") {
  double w = 0.0, xx = 0.0, xy = 0.0;
  for (const auto &q : triangle_rule_degree2()) {
    w += q.w;
    xx += q.w * q.bary[1] * q.bary[1] * 0.5;
    xy += q.w * q.bary[1] * q.bary[2] * 0.5;
  }
  CHECK(w == doctest::Approx(1.0));
  CHECK(xx == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(xy == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

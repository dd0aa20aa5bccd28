#include "opt3d1d/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace opt3d1d {

std::vector<QuadPoint1D> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre recurrence.
  DenseMatrix jacobi = DenseMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(jacobi);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  std::vector<QuadPoint1D> rule(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Symmetrize so that the rule is exactly symmetric about the midpoint.
    const int j = n - 1 - i;
    const double x = 0.5 * (eig.eigenvalues()(i) - eig.eigenvalues()(j));
    const double v0 = eig.eigenvectors()(0, i), v1 = eig.eigenvectors()(0, j);
    const double w = v0 * v0 + v1 * v1; // 2 * 0.5 * (w_i + w_j)
    rule[i] = {mid + half * x, half * w};
  }
  return rule;
}

std::vector<CompositeCell> composite_rule(std::span<const std::vector<double>> breakpoint_lists, int points_per_cell,
                                          double tolerance) {
  std::vector<double> merged;
  for (const auto &list : breakpoint_lists) merged.insert(merged.end(), list.begin(), list.end());
  std::sort(merged.begin(), merged.end());
  std::vector<double> unique;
  for (double x : merged)
    if (unique.empty() || x - unique.back() > tolerance) unique.push_back(x);

  const auto ref = gauss_legendre(points_per_cell, 0.0, 1.0);
  std::vector<CompositeCell> cells;
  for (std::size_t k = 0; k + 1 < unique.size(); ++k) {
    CompositeCell cell{{unique[k], unique[k + 1]}, {}};
    const double len = cell.interval.length();
    for (const auto &q : ref) cell.points.push_back({cell.interval.lo + q.x * len, q.w * len});
    cells.push_back(std::move(cell));
  }
  return cells;
}

const std::vector<TetQuadPoint> &tet_rule_degree2() {
  static const std::vector<TetQuadPoint> rule = [] {
    const double a = 0.5854101966249685, b = 0.1381966011250105;
    return std::vector<TetQuadPoint>{
        {{a, b, b, b}, 0.25}, {{b, a, b, b}, 0.25}, {{b, b, a, b}, 0.25}, {{b, b, b, a}, 0.25}};
  }();
  return rule;
}

std::vector<TetQuadPoint> tet_rule_collapsed(int n) {
  // Map the unit cube (u, v, w) to the reference tet:
  //   x = u, y = v (1 - u), z = w (1 - u)(1 - v), J = (1 - u)^2 (1 - v).
  const auto g = gauss_legendre(n, 0.0, 1.0);
  std::vector<TetQuadPoint> rule;
  rule.reserve(static_cast<std::size_t>(n) * n * n);
  for (const auto &qu : g)
    for (const auto &qv : g)
      for (const auto &qw : g) {
        const double x = qu.x, y = qv.x * (1.0 - qu.x), z = qw.x * (1.0 - qu.x) * (1.0 - qv.x);
        const double jac = (1.0 - qu.x) * (1.0 - qu.x) * (1.0 - qv.x);
        // Reference tet volume is 1/6; normalize weights to sum to 1.
        rule.push_back({{1.0 - x - y - z, x, y, z}, 6.0 * qu.w * qv.w * qw.w * jac});
      }
  return rule;
}

const std::vector<TriQuadPoint> &triangle_rule_degree2() {
  static const std::vector<TriQuadPoint> rule{
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
  };
  return rule;
}

} // namespace opt3d1d

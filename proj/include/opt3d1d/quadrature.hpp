#pragma once

#include <span>
#include <vector>

#include "opt3d1d/types.hpp"

namespace opt3d1d {

struct QuadPoint1D {
  double x;
  double w;
};

/// n-point Gauss-Legendre rule on [a, b] (exact for degree 2n-1).
std::vector<QuadPoint1D> gauss_legendre(int n, double a = -1.0, double b = 1.0);

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

struct CompositeCell {
  Interval interval;
  std::vector<QuadPoint1D> points;
};

/// Merges sorted breakpoint lists into one partition (duplicates closer than
/// `tolerance` collapse) and places `points_per_cell` Gauss points on each
/// sub-interval. The default 3 points integrate degree <= 5 exactly.
std::vector<CompositeCell> composite_rule(std::span<const std::vector<double>> breakpoint_lists,
                                          int points_per_cell = 3, double tolerance = 0.0);

/// Barycentric quadrature point on a tetrahedron (weights sum to 1).
struct TetQuadPoint {
  std::array<double, 4> bary;
  double w;
};

/// Symmetric 4-point rule, exact for degree 2.
const std::vector<TetQuadPoint> &tet_rule_degree2();

/// Collapsed-coordinate (Duffy) Gauss product rule with `n` points per
/// direction; exact for polynomial degree 2n-3 or better.
std::vector<TetQuadPoint> tet_rule_collapsed(int n);

struct TriQuadPoint {
  std::array<double, 3> bary;
  double w;
};

/// 3-point rule exact for degree 2 (weights sum to 1).
const std::vector<TriQuadPoint> &triangle_rule_degree2();

} // namespace opt3d1d

#include "opt3d1d/monolithic.hpp"

#include <cmath>
#include <limits>

#include "opt3d1d/quadrature.hpp"

namespace opt3d1d {

CoupledSystem build_coupled(const BlockSystem &sys) {
  CoupledSystem cs;
  cs.N = sys.N();
  cs.Nhat = sys.Nhat();
  cs.Nhat_ext = sys.Nhat_ext();
  const SparseMatrix ahat = sys.Ahat();
  std::vector<Triplet> t;
  auto add = [&t](const SparseMatrix &m, int row, int col, double scale, bool transpose) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int r = static_cast<int>(transpose ? it.col() : it.row());
        const int c = static_cast<int>(transpose ? it.row() : it.col());
        t.emplace_back(row + r, col + c, scale * it.value());
      }
  };
  add(sys.A, 0, 0, 1.0, false);
  add(sys.B_beta, 0, cs.N, -1.0, false);
  add(sys.B_beta, cs.N, 0, -1.0, true);
  add(ahat, cs.N, cs.N, 1.0, false);
  cs.K.resize(cs.N + cs.Nhat_ext, cs.N + cs.Nhat_ext);
  cs.K.setFromTriplets(t.begin(), t.end());
  cs.K.makeCompressed();

  cs.rhs = Vector::Zero(cs.N + cs.Nhat_ext);
  cs.rhs.head(cs.N) = sys.f + sys.lift.coupled_f;
  cs.rhs.segment(cs.N, cs.Nhat) = sys.g + sys.lift.coupled_g;
  return cs;
}

Solution solve_coupled(const BlockSystem &sys, Ordering ordering) {
  const CoupledSystem cs = build_coupled(sys);
  const Vector x = Factorization::general(cs.K, ordering, "coupled system").solve(cs.rhs);
  Solution s;
  s.U = x.head(cs.N);
  s.Uhat = x.segment(cs.N, cs.Nhat);
  s.multipliers = x.tail(cs.Nhat_ext - cs.Nhat);
  return s;
}

double evaluate_p1(const TetMesh &mesh, const Vector &values, const Vec3 &x) {
  const double tol = 1e-10;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto &v = mesh.tets[t];
    const Vec3 &p0 = mesh.vertices[v[0]];
    Vec3 lo = p0, hi = p0;
    for (int k = 1; k < 4; ++k) {
      lo = lo.cwiseMin(mesh.vertices[v[k]]);
      hi = hi.cwiseMax(mesh.vertices[v[k]]);
    }
    if ((x.array() < lo.array() - tol).any() || (x.array() > hi.array() + tol).any()) continue;
    Eigen::Matrix3d e;
    for (int k = 0; k < 3; ++k) e.col(k) = mesh.vertices[v[k + 1]] - p0;
    const Vec3 l = e.inverse() * (x - p0);
    const double l0 = 1.0 - l.sum();
    if (l0 < -tol || (l.array() < -tol).any()) continue;
    return l0 * values(v[0]) + l(0) * values(v[1]) + l(1) * values(v[2]) + l(2) * values(v[3]);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SolutionComparison compare_solutions(const Solution &a, const Solution &b, const BlockSystem &sys,
                                     const Discretization &disc, const std::vector<double> &planes_z) {
  if (a.U.size() != sys.N() || b.U.size() != sys.N() || a.Uhat.size() != sys.Nhat() || b.Uhat.size() != sys.Nhat())
    throw std::invalid_argument("compare_solutions: solutions do not match the discretization");
  SolutionComparison out;
  const Vector ha = sys.hat.expand(a.Uhat), hb = sys.hat.expand(b.Uhat);
  for (std::size_t i = 0; i < disc.partitions.size(); ++i) {
    const auto &part = disc.partitions[i].uhat;
    const Vector va = sys.hat.segment_values(ha, static_cast<int>(i), part.size());
    const Vector vb = sys.hat.segment_values(hb, static_cast<int>(i), part.size());
    double diff2 = 0.0, ref2 = 0.0;
    for (const auto &cell : composite_rule(std::span(&part.nodes, 1), 3))
      for (const auto &q : cell.points) {
        const double x = part.interpolate(va, q.x), y = part.interpolate(vb, q.x);
        diff2 += q.w * (x - y) * (x - y);
        ref2 += q.w * y * y;
      }
    SegmentDifference d;
    d.segment = static_cast<int>(i);
    d.rel_l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
    const double ref_inf = vb.cwiseAbs().maxCoeff();
    const double diff_inf = (va - vb).cwiseAbs().maxCoeff();
    d.rel_linf = ref_inf > 0.0 ? diff_inf / ref_inf : diff_inf;
    out.max_segment_rel_l2 = std::max(out.max_segment_rel_l2, d.rel_l2);
    out.segments.push_back(d);
  }
  const double un = b.U.norm();
  out.u_rel_l2 = un > 0.0 ? (a.U - b.U).norm() / un : (a.U - b.U).norm();

  const Vector ua = sys.dofs.expand(a.U), ub = sys.dofs.expand(b.U);
  const BoundingBox box = disc.mesh.bounding_box();
  constexpr int kSamples = 21;
  for (double z : planes_z) {
    double diff2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < kSamples; ++i)
      for (int j = 0; j < kSamples; ++j) {
        const Vec3 x(box.lo.x() + (box.hi.x() - box.lo.x()) * i / (kSamples - 1.0),
                     box.lo.y() + (box.hi.y() - box.lo.y()) * j / (kSamples - 1.0), z);
        const double va = evaluate_p1(disc.mesh, ua, x), vb = evaluate_p1(disc.mesh, ub, x);
        if (std::isnan(va) || std::isnan(vb)) continue;
        diff2 += (va - vb) * (va - vb);
        ref2 += vb * vb;
      }
    out.plane_rel_l2.push_back(ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2));
  }
  return out;
}

FluxBalance flux_balance(const Solution &sol, const BlockSystem &sys, const Discretization &disc) {
  const Vector u = sys.dofs.expand(sol.U);
  const Vector uh = sys.hat.expand(sol.Uhat);
  const auto &full = sys.full;
  // Row residual of the 3D equation; it vanishes on free vertices and equals
  // the weak boundary flux ∫ K∇u·n φ_d on Dirichlet vertices.
  const Vector residual = full.A * u - full.B_beta * uh - full.load.bulk;
  FluxBalance fb;
  for (int v = 0; v < sys.dofs.num_all(); ++v)
    if (sys.dofs.free_of_vertex[v] < 0) fb.dirichlet_outflux -= residual(v);
  fb.source = full.load.bulk.sum();

  for (std::size_t i = 0; i < disc.network.segments.size(); ++i) {
    const auto &seg = disc.network.segments[i];
    const auto &trace = disc.traces[i];
    const auto &part = disc.partitions[i].uhat;
    const Vector vals = sys.hat.segment_values(uh, static_cast<int>(i), part.size());
    const std::vector<std::vector<double>> lists{trace.breakpoints, part.nodes};
    for (const auto &cell : composite_rule(lists, 3, disc.mesh.geometric_tolerance())) {
      const TraceCell &tc = trace.cell_at(0.5 * (cell.interval.lo + cell.interval.hi));
      const auto &tet = disc.mesh.tets[tc.tet];
      for (const auto &q : cell.points) {
        const auto l = tc.barycentric(q.x);
        double u_line = 0.0;
        for (int k = 0; k < 4; ++k) u_line += l[k] * u(tet[k]);
        fb.exchange += q.w * seg.beta * seg.perimeter(q.x) * (part.interpolate(vals, q.x) - u_line);
      }
    }
  }
  return fb;
}

} // namespace opt3d1d

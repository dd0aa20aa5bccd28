#include "opt3d1d/analysis.hpp"

#include <cmath>
#include <random>

#include "opt3d1d/quadrature.hpp"

namespace opt3d1d {

namespace {

double ratio(double num2, double den2) { return den2 > 0.0 ? std::sqrt(num2 / den2) : std::sqrt(num2); }

// ∫ (f - F_h)^2 and ∫ f^2 over one partition, f given in arclength.
template <typename Exact> std::pair<double, double> line_l2(const Partition1D &part, const Vector &vals, Exact &&f) {
  double e2 = 0.0, r2 = 0.0;
  for (const auto &cell : composite_rule(std::span(&part.nodes, 1), 3))
    for (const auto &q : cell.points) {
      const double ex = f(q.x), d = ex - part.interpolate(vals, q.x);
      e2 += q.w * d * d;
      r2 += q.w * ex * ex;
    }
  return {e2, r2};
}

} // namespace

ErrorReport compute_errors(const Solution &sol, const BlockSystem &sys, const Discretization &disc,
                           const ExactSolution &exact, int tet_order) {
  if (sol.U.size() != sys.N() || sol.Uhat.size() != sys.Nhat() || sol.psi_d.size() != sys.ND() ||
      sol.psi_sigma.size() != sys.NSigma())
    throw std::invalid_argument("compute_errors: solution does not match the system");
  ErrorReport rep;
  const TetMesh &mesh = disc.mesh;
  rep.h = mesh.h;
  rep.deltas = disc.deltas;
  rep.N = sys.N();
  rep.Nhat = sys.Nhat();
  rep.ND = sys.ND();
  rep.NSigma = sys.NSigma();

  const Vector u = sys.dofs.expand(sol.U);
  const auto rule = tet_rule_collapsed(tet_order);
  double l2e = 0.0, l2r = 0.0, h1e = 0.0, h1r = 0.0;
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const auto &v = mesh.tets[e];
    const double vol = mesh.tet_volume(e);
    Eigen::Matrix3d edges;
    for (int k = 0; k < 3; ++k) edges.col(k) = mesh.vertices[v[k + 1]] - mesh.vertices[v[0]];
    const Eigen::Matrix3d inv = edges.inverse();
    Vec3 grad_h = Vec3::Zero();
    for (int k = 0; k < 3; ++k) grad_h += (u(v[k + 1]) - u(v[0])) * inv.row(k).transpose();
    for (const auto &q : rule) {
      Vec3 x = Vec3::Zero();
      double uh = 0.0;
      for (int k = 0; k < 4; ++k) {
        x += q.bary[k] * mesh.vertices[v[k]];
        uh += q.bary[k] * u(v[k]);
      }
      const double w = q.w * vol, ue = exact.u(x);
      const Vec3 ge = exact.grad_u(x);
      l2e += w * (ue - uh) * (ue - uh);
      l2r += w * ue * ue;
      h1e += w * (ge - grad_h).squaredNorm();
      h1r += w * ge.squaredNorm();
    }
  }
  rep.E_L2 = ratio(l2e, l2r);
  rep.E_H1 = ratio(l2e + h1e, l2r + h1r);

  const Vector uhat = sys.hat.expand(sol.Uhat);
  double he = 0.0, hr = 0.0, hde = 0.0, hdr = 0.0, de = 0.0, dr = 0.0, se = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < disc.network.segments.size(); ++i) {
    const auto &seg = disc.network.segments[i];
    const auto &parts = disc.partitions[i];
    const int si = static_cast<int>(i);
    const Vector vals = sys.hat.segment_values(uhat, si, parts.uhat.size());
    auto uhat_ex = [&](double s) { return exact.uhat(seg.point(s)); };
    auto [e2, r2] = line_l2(parts.uhat, vals, uhat_ex);
    he += e2;
    hr += r2;
    for (const auto &cell : composite_rule(std::span(&parts.uhat.nodes, 1), 3))
      for (const auto &q : cell.points) {
        const auto loc = parts.uhat.evaluate(q.x);
        const double slope = loc.slope[0] * vals(loc.element) + loc.slope[1] * vals(loc.element + 1);
        const double ex = exact.duhat_ds(seg, q.x);
        hde += q.w * (ex - slope) * (ex - slope);
        hdr += q.w * ex * ex;
      }
    const Vector pd = sol.psi_d.segment(sys.psi.offset_d[i], parts.psi_d.size());
    auto [d2, dr2] = line_l2(parts.psi_d, pd, [&](double s) { return exact.u_check(seg, s); });
    de += d2;
    dr += dr2;
    const Vector ps = sol.psi_sigma.segment(sys.psi.offset_sigma[i], parts.psi_sigma.size());
    auto [s2, sr2] = line_l2(parts.psi_sigma, ps, uhat_ex);
    se += s2;
    sr += sr2;
  }
  rep.Ehat_L2 = ratio(he, hr);
  rep.Ehat_H1 = ratio(he + hde, hr + hdr);
  rep.Epsi_D = ratio(de, dr);
  rep.Epsi_Sigma = ratio(se, sr);
  return rep;
}

double fit_slope(const std::vector<double> &h, const std::vector<double> &e) {
  if (h.size() != e.size() || h.size() < 2) throw std::invalid_argument("fit_slope: need at least two points");
  const auto n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(e[i] > 0.0)) throw std::invalid_argument("fit_slope: data must be positive");
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("fit_slope: mesh sizes must differ");
  return (n * sxy - sx * sy) / den;
}

ConvergenceStudy convergence_study(const TestProblem &problem, const std::vector<int> &subdivisions,
                                   const PartitionDeltas &deltas, const SystemSolver &solver) {
  if (subdivisions.size() < 2) throw std::invalid_argument("convergence_study: need at least two meshes");
  if (!problem.exact) throw std::invalid_argument("convergence_study: problem has no exact solution");
  ConvergenceStudy study;
  for (int n : subdivisions) {
    const Discretization disc = problem.discretize(n, deltas);
    const BlockSystem sys = assemble_system(disc, problem.bulk);
    const Solution sol = solver(sys);
    study.rows.push_back(compute_errors(sol, sys, disc, *problem.exact));
  }
  std::vector<double> h;
  for (const auto &r : study.rows) h.push_back(r.h);
  auto slope = [&](double ErrorReport::*field) {
    std::vector<double> e;
    for (const auto &r : study.rows) e.push_back(r.*field);
    return fit_slope(h, e);
  };
  study.slope_L2 = slope(&ErrorReport::E_L2);
  study.slope_H1 = slope(&ErrorReport::E_H1);
  study.slope_hat_L2 = slope(&ErrorReport::Ehat_L2);
  study.slope_hat_H1 = slope(&ErrorReport::Ehat_H1);
  study.slope_psi_D = slope(&ErrorReport::Epsi_D);
  study.slope_psi_Sigma = slope(&ErrorReport::Epsi_Sigma);
  return study;
}

const char *to_string(ConditionMethod method) {
  return method == ConditionMethod::dense_svd ? "dense_svd" : "lanczos";
}

ConditionEstimate condition_dense(const DenseMatrix &m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("condition_dense: matrix must be square");
  if (m.rows() > 5000) throw std::invalid_argument("condition_dense: order above 5000");
  ConditionEstimate c;
  c.method = ConditionMethod::dense_svd;
  if (m.rows() == 0) return c;
  Eigen::BDCSVD<DenseMatrix> svd(m);
  const auto &s = svd.singularValues();
  c.largest = s(0);
  c.smallest = s(s.size() - 1);
  c.value = c.smallest > 0.0 ? c.largest / c.smallest : std::numeric_limits<double>::infinity();
  c.steps = 1;
  return c;
}

ConditionEstimate condition_lanczos(const std::function<Vector(const Vector &)> &op, int size, double tolerance,
                                    int max_steps, std::uint64_t seed) {
  ConditionEstimate c;
  c.method = ConditionMethod::lanczos;
  if (size == 0) return c;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = normal(rng);
  v.normalize();

  const int steps = std::min(max_steps, size);
  DenseMatrix basis(size, steps);
  std::vector<double> alpha, beta;
  double prev_min = 0.0, prev_max = 0.0;
  c.converged = false;
  for (int k = 0; k < steps; ++k) {
    basis.col(k) = v;
    Vector w = op(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    // Full reorthogonalization (twice is enough).
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    const double b = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      T(i, i) = alpha[i];
      if (i < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(k);
    c.steps = k + 1;
    c.smallest = lmin;
    c.largest = lmax;
    if (k > 0) {
      const double dmin = std::abs(lmin - prev_min) / std::abs(lmin);
      const double dmax = std::abs(lmax - prev_max) / std::abs(lmax);
      c.achieved_tolerance = std::max(dmin, dmax);
    }
    prev_min = lmin;
    prev_max = lmax;
    // Invariant subspace found: Ritz values are exact.
    if (b <= 1e-14 * std::abs(lmax) || k + 1 == size) {
      c.converged = true;
      c.achieved_tolerance = 0.0;
      break;
    }
    if (k > 2 && c.achieved_tolerance <= tolerance * 1e-2) {
      c.converged = true;
      break;
    }
    beta.push_back(b);
    v = w / b;
  }
  c.value = c.smallest > 0.0 ? c.largest / c.smallest : std::numeric_limits<double>::infinity();
  return c;
}

} // namespace opt3d1d

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracle {

std::optional<Location> locate(const opt3d1d::TetMesh &mesh, const Vec3 &x, double tol) {
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto &v = mesh.tets[t];
    Eigen::Matrix4d m;
    for (int k = 0; k < 4; ++k) m.col(k) << mesh.vertices[v[k]], 1.0;
    const Eigen::Vector4d l = m.fullPivLu().solve(Eigen::Vector4d(x.x(), x.y(), x.z(), 1.0));
    if (l.minCoeff() >= -tol) return Location{static_cast<int>(t), {l(0), l(1), l(2), l(3)}};
  }
  return std::nullopt;
}

std::vector<std::pair<int, double>> p1_basis(const opt3d1d::TetMesh &mesh, const Vec3 &x) {
  const auto loc = locate(mesh, x);
  if (!loc) throw std::runtime_error("oracle: point outside mesh");
  std::vector<std::pair<int, double>> out;
  for (int k = 0; k < 4; ++k) out.emplace_back(mesh.tets[loc->tet][k], loc->bary[k]);
  return out;
}

double hat(const std::vector<double> &nodes, int k, double s) {
  const int n = static_cast<int>(nodes.size());
  if (k > 0 && s >= nodes[k - 1] && s <= nodes[k]) return (s - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
  if (k < n - 1 && s >= nodes[k] && s <= nodes[k + 1]) return (nodes[k + 1] - s) / (nodes[k + 1] - nodes[k]);
  return 0.0;
}

DenseCoupling trapezoid_coupling(const opt3d1d::Discretization &disc, const opt3d1d::BlockSystem &sys, double step) {
  const int nv = static_cast<int>(disc.mesh.num_vertices());
  const int nh = sys.hat.num_all(), nd = sys.ND(), ns = sys.NSigma();
  DenseCoupling c;
  c.Dhat_beta = DenseMatrix::Zero(nh, nd);
  c.S_beta = DenseMatrix::Zero(nv, ns);
  c.D = DenseMatrix::Zero(nv, nd);
  c.Shat = DenseMatrix::Zero(nh, ns);
  c.G = DenseMatrix::Zero(nv, nv);
  c.Ghat = DenseMatrix::Zero(nh, nh);
  c.MD = DenseMatrix::Zero(nd, nd);
  c.MSigma = DenseMatrix::Zero(ns, ns);
  c.B = DenseMatrix::Zero(nv, nh);

  for (std::size_t i = 0; i < disc.network.segments.size(); ++i) {
    const auto &seg = disc.network.segments[i];
    const auto &p = disc.partitions[i];
    const double S = seg.length();
    const long m = std::lround(std::ceil(S / step));
    const double ds = S / static_cast<double>(m);
    const int oh = sys.hat.node_offset[i], od = sys.psi.offset_d[i], os = sys.psi.offset_sigma[i];
    for (long j = 0; j <= m; ++j) {
      const double s = ds * static_cast<double>(j);
      const double w = (j == 0 || j == m) ? 0.5 * ds : ds;
      const Vec3 x = seg.a + (seg.b - seg.a) * (s / S);
      const auto phi = p1_basis(disc.mesh, x);
      const double bg = seg.beta * 2.0 * M_PI * seg.radius;
      std::vector<double> hu(p.uhat.size()), hd(p.psi_d.size()), hs(p.psi_sigma.size());
      for (int k = 0; k < p.uhat.size(); ++k) hu[k] = hat(p.uhat.nodes, k, s);
      for (int k = 0; k < p.psi_d.size(); ++k) hd[k] = hat(p.psi_d.nodes, k, s);
      for (int k = 0; k < p.psi_sigma.size(); ++k) hs[k] = hat(p.psi_sigma.nodes, k, s);
      for (auto [a, pa] : phi) {
        for (auto [b, pb] : phi) c.G(a, b) += w * pa * pb;
        for (std::size_t l = 0; l < hd.size(); ++l) c.D(a, od + l) += w * pa * hd[l];
        for (std::size_t l = 0; l < hs.size(); ++l) c.S_beta(a, os + l) += w * bg * pa * hs[l];
        for (std::size_t l = 0; l < hu.size(); ++l) c.B(a, oh + l) += w * pa * hu[l];
      }
      for (std::size_t k = 0; k < hu.size(); ++k) {
        for (std::size_t l = 0; l < hu.size(); ++l) c.Ghat(oh + k, oh + l) += w * hu[k] * hu[l];
        for (std::size_t l = 0; l < hd.size(); ++l) c.Dhat_beta(oh + k, od + l) += w * bg * hu[k] * hd[l];
        for (std::size_t l = 0; l < hs.size(); ++l) c.Shat(oh + k, os + l) += w * hu[k] * hs[l];
      }
      for (std::size_t k = 0; k < hd.size(); ++k)
        for (std::size_t l = 0; l < hd.size(); ++l) c.MD(od + k, od + l) += w * hd[k] * hd[l];
      for (std::size_t k = 0; k < hs.size(); ++k)
        for (std::size_t l = 0; l < hs.size(); ++l) c.MSigma(os + k, os + l) += w * hs[k] * hs[l];
    }
  }
  return c;
}

namespace {

DenseMatrix dense(const opt3d1d::SparseMatrix &m) { return DenseMatrix(m); }

} // namespace

DenseMatrix dense_reduced_matrix(const opt3d1d::BlockSystem &sys) {
  const DenseMatrix Ainv = dense(sys.A).inverse();
  const DenseMatrix Ahinv = dense(sys.Ahat()).inverse();
  const DenseMatrix Dh = dense(sys.pad_hat_rows(sys.Dhat_beta));
  const DenseMatrix Sh = dense(sys.pad_hat_rows(sys.Shat));
  DenseMatrix Gh = DenseMatrix::Zero(sys.Nhat_ext(), sys.Nhat_ext());
  Gh.topLeftCorner(sys.Nhat(), sys.Nhat()) = dense(sys.Ghat);
  const DenseMatrix Wu = Ainv * dense(sys.S_beta);
  const DenseMatrix Wh = Ahinv * Dh;
  const DenseMatrix D = dense(sys.D), G = dense(sys.G);
  const int nd = sys.ND(), ns = sys.NSigma();
  DenseMatrix M(nd + ns, nd + ns);
  M.topLeftCorner(nd, nd) = Wh.transpose() * Gh * Wh + dense(sys.MD);
  M.topRightCorner(nd, ns) = -Wh.transpose() * Sh - D.transpose() * Wu;
  M.bottomLeftCorner(ns, nd) = -Wu.transpose() * D - Sh.transpose() * Wh;
  M.bottomRightCorner(ns, ns) = Wu.transpose() * G * Wu + dense(sys.MSigma);
  return M;
}

Vector dense_reduced_rhs(const opt3d1d::BlockSystem &sys) {
  // d = Zᵀ(𝒢 x0 + c) with x0 the state for X = 0 and Z the state sensitivity.
  const DenseMatrix Ainv = dense(sys.A).inverse();
  const DenseMatrix Ahinv = dense(sys.Ahat()).inverse();
  const opt3d1d::KktLayout l{sys.N(), sys.Nhat_ext(), sys.ND(), sys.NSigma()};
  const int nx = l.psi_sigma() + l.NSigma;
  Vector x0 = Vector::Zero(nx);
  x0.segment(l.u(), l.N) = Ainv * sys.f;
  x0.segment(l.uhat(), l.Nhat_ext) = Ahinv * sys.pad_hat(sys.g);
  DenseMatrix Z = DenseMatrix::Zero(nx, l.controls());
  Z.block(l.u(), l.ND, l.N, l.NSigma) = Ainv * dense(sys.S_beta);
  Z.block(l.uhat(), 0, l.Nhat_ext, l.ND) = Ahinv * dense(sys.pad_hat_rows(sys.Dhat_beta));
  Z.block(l.psi_d(), 0, l.ND, l.ND).setIdentity();
  Z.block(l.psi_sigma(), l.ND, l.NSigma, l.NSigma).setIdentity();
  const DenseMatrix Gc = dense(opt3d1d::objective_matrix(sys));
  return Z.transpose() * (Gc * x0 + opt3d1d::objective_linear(sys));
}

int sampled_crossings(const opt3d1d::TetMesh &mesh, const opt3d1d::Segment &seg, int samples) {
  auto containing = [&](const Vec3 &x) {
    std::set<int> out;
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
      const auto &v = mesh.tets[t];
      Eigen::Matrix4d m;
      for (int k = 0; k < 4; ++k) m.col(k) << mesh.vertices[v[k]], 1.0;
      const Eigen::Vector4d l = m.fullPivLu().solve(Eigen::Vector4d(x.x(), x.y(), x.z(), 1.0));
      if (l.minCoeff() >= -1e-10) out.insert(static_cast<int>(t));
    }
    return out;
  };
  const double S = seg.length();
  std::set<int> prev;
  int changes = 0;
  for (int i = 0; i < samples; ++i) {
    const double s = S * (i + 0.5) / samples;
    auto cur = containing(seg.a + (seg.b - seg.a) * (s / S));
    if (i > 0 && cur != prev) ++changes;
    prev = std::move(cur);
  }
  return changes;
}

} // namespace oracle

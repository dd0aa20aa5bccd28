#include "opt3d1d/kkt.hpp"

#include <fmt/format.h>

#include <cstdio>

namespace opt3d1d {

namespace {

void add_block(std::vector<Triplet> &t, const SparseMatrix &m, int row, int col, double scale = 1.0,
               bool transpose = false) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const int r = static_cast<int>(transpose ? it.col() : it.row());
      const int c = static_cast<int>(transpose ? it.row() : it.col());
      t.emplace_back(row + r, col + c, scale * it.value());
    }
}

void check_dims(const BlockSystem &s) {
  const int n = s.N(), nh = s.Nhat(), nd = s.ND(), ns = s.NSigma();
  auto expect = [](const SparseMatrix &m, int r, int c, const char *name) {
    if (m.rows() != r || m.cols() != c)
      throw std::invalid_argument(
          fmt::format("block {} is {}x{}, expected {}x{}", name, m.rows(), m.cols(), r, c));
  };
  expect(s.A, n, n, "A");
  expect(s.G, n, n, "G");
  expect(s.S_beta, n, ns, "S_beta");
  expect(s.D, n, nd, "D");
  expect(s.Ahat_sharp, nh, nh, "Ahat");
  expect(s.Ghat, nh, nh, "Ghat");
  expect(s.Dhat_beta, nh, nd, "Dhat_beta");
  expect(s.Shat, nh, ns, "Shat");
  expect(s.MD, nd, nd, "MD");
  expect(s.MSigma, ns, ns, "MSigma");
  if (s.Q.cols() != nh) throw std::invalid_argument("junction block has wrong width");
  if (s.f.size() != n || s.g.size() != nh) throw std::invalid_argument("load vectors have wrong size");
}

KktLayout layout_of(const BlockSystem &s) { return {s.N(), s.Nhat_ext(), s.ND(), s.NSigma()}; }

} // namespace

Vector Solution::Uhat_ext() const {
  Vector out(Uhat.size() + multipliers.size());
  out << Uhat, multipliers;
  return out;
}

SparseMatrix objective_matrix(const BlockSystem &sys) {
  check_dims(sys);
  const KktLayout l = layout_of(sys);
  const int n = l.psi_sigma() + l.NSigma;
  std::vector<Triplet> t;
  add_block(t, sys.G, l.u(), l.u());
  add_block(t, sys.Ghat, l.uhat(), l.uhat());
  add_block(t, sys.D, l.u(), l.psi_d(), -1.0);
  add_block(t, sys.D, l.psi_d(), l.u(), -1.0, true);
  add_block(t, sys.Shat, l.uhat(), l.psi_sigma(), -1.0);
  add_block(t, sys.Shat, l.psi_sigma(), l.uhat(), -1.0, true);
  add_block(t, sys.MD, l.psi_d(), l.psi_d());
  add_block(t, sys.MSigma, l.psi_sigma(), l.psi_sigma());
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix constraint_matrix(const BlockSystem &sys) {
  check_dims(sys);
  const KktLayout l = layout_of(sys);
  std::vector<Triplet> t;
  add_block(t, sys.A, 0, l.u());
  add_block(t, sys.S_beta, 0, l.psi_sigma(), -1.0);
  add_block(t, sys.Ahat(), l.N, l.uhat());
  add_block(t, sys.Dhat_beta, l.N, l.psi_d(), -1.0);
  SparseMatrix m(l.N + l.Nhat_ext, l.psi_sigma() + l.NSigma);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Vector objective_linear(const BlockSystem &sys) {
  const KktLayout l = layout_of(sys);
  Vector c = Vector::Zero(l.psi_sigma() + l.NSigma);
  c.segment(l.u(), l.N) = sys.lift.G_u;
  c.segment(l.uhat(), sys.Nhat()) = sys.lift.Ghat_u;
  c.segment(l.psi_d(), l.ND) = -sys.lift.D_u;
  c.segment(l.psi_sigma(), l.NSigma) = -sys.lift.Shat_u;
  return c;
}

KktSystem build_kkt(const BlockSystem &sys) {
  check_dims(sys);
  KktSystem kkt;
  kkt.layout = layout_of(sys);
  const KktLayout &l = kkt.layout;
  const SparseMatrix g = objective_matrix(sys);
  const SparseMatrix a = constraint_matrix(sys);
  std::vector<Triplet> t;
  add_block(t, g, 0, 0);
  add_block(t, a, l.p(), 0);
  add_block(t, a, 0, l.p(), 1.0, true);
  kkt.K.resize(l.size(), l.size());
  kkt.K.setFromTriplets(t.begin(), t.end());
  kkt.K.makeCompressed();

  kkt.rhs = Vector::Zero(l.size());
  kkt.rhs.head(l.p()) = -objective_linear(sys);
  kkt.rhs.segment(l.p(), l.N) = sys.f;
  kkt.rhs.segment(l.phat(), sys.Nhat()) = sys.g;
  return kkt;
}

Solution solve_direct(const KktSystem &kkt, const BlockSystem &sys, Ordering ordering) {
  const KktLayout &l = kkt.layout;
  if (l.size() > 200000)
    std::fprintf(stderr, "warning: direct KKT solve with %d unknowns may be slow\n", l.size());
  const Vector x = Factorization::general(kkt.K, ordering, "KKT matrix").solve(kkt.rhs);
  Solution s;
  const int nh = sys.Nhat();
  s.U = x.segment(l.u(), l.N);
  s.Uhat = x.segment(l.uhat(), nh);
  s.multipliers = x.segment(l.uhat() + nh, l.Nhat_ext - nh);
  s.psi_d = x.segment(l.psi_d(), l.ND);
  s.psi_sigma = x.segment(l.psi_sigma(), l.NSigma);
  s.P = -x.segment(l.p(), l.N);
  s.Phat = -x.segment(l.phat(), l.Nhat_ext);
  return s;
}

double evaluate_functional(const BlockSystem &sys, const Vector &U, const Vector &Uhat, const Vector &psi_d,
                           const Vector &psi_sigma) {
  if (U.size() != sys.N() || Uhat.size() != sys.Nhat() || psi_d.size() != sys.ND() ||
      psi_sigma.size() != sys.NSigma())
    throw std::invalid_argument("evaluate_functional: dimension mismatch");
  const auto &lf = sys.lift;
  const double bulk = U.dot(sys.G * U) - 2.0 * U.dot(sys.D * psi_d) + psi_d.dot(sys.MD * psi_d) +
                      2.0 * U.dot(lf.G_u) - 2.0 * psi_d.dot(lf.D_u) + lf.c_u;
  const double line = Uhat.dot(sys.Ghat * Uhat) - 2.0 * Uhat.dot(sys.Shat * psi_sigma) +
                      psi_sigma.dot(sys.MSigma * psi_sigma) + 2.0 * Uhat.dot(lf.Ghat_u) -
                      2.0 * psi_sigma.dot(lf.Shat_u) + lf.c_uhat;
  return 0.5 * (bulk + line);
}

ConstraintResidual constraint_residual(const BlockSystem &sys, const Solution &sol) {
  auto rel = [](const Vector &r, const Vector &ref) {
    const double n = ref.norm();
    return n > 0.0 ? r.norm() / n : r.norm();
  };
  ConstraintResidual out;
  out.bulk = rel(sys.A * sol.U - sys.S_beta * sol.psi_sigma - sys.f, sys.f);
  const Vector r = sys.Ahat() * sol.Uhat_ext() - sys.pad_hat(Vector(sys.Dhat_beta * sol.psi_d)) - sys.pad_hat(sys.g);
  out.segment = rel(r, sys.g);
  return out;
}

} // namespace opt3d1d

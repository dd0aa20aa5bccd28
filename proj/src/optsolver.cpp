#include "opt3d1d/optsolver.hpp"

#include <cmath>

namespace opt3d1d {

namespace {

DenseMatrix dense_block(const SparseMatrix &m, int row, int col, int rows, int cols) {
  return SparseMatrix(m.block(row, col, rows, cols)).toDense();
}

} // namespace

ReducedOperator::ReducedOperator(const BlockSystem &sys)
    : sys_(&sys), nd_(sys.ND()), ns_(sys.NSigma()) {
  ahat_ = sys.Ahat();
  dhat_ = sys.pad_hat_rows(sys.Dhat_beta);
  shat_ = sys.pad_hat_rows(sys.Shat);
  ghat_ = sys.pad_hat_rows(sys.Ghat);
  ghat_.conservativeResize(ghat_.rows(), ghat_.rows());
  a_fact_ = Factorization::spd(sys.A, "A");
  ahat_fact_ = sys.num_multipliers() == 0 ? Factorization::spd(ahat_, "Ahat")
                                          : Factorization::general(ahat_, Ordering::colamd, "Ahat");

  const auto &lf = sys.lift;
  u0_ = a_fact_.solve(sys.f);
  uhat0_ = ahat_fact_.solve(sys.pad_hat(sys.g));
  const Vector ghat_u = sys.pad_hat(lf.Ghat_u);
  const Vector p0 = a_fact_.solve(Vector(sys.G * u0_ + lf.G_u));
  const Vector phat0 = ahat_fact_.solve(Vector(ghat_ * uhat0_ + ghat_u));
  d_.resize(size());
  d_.head(nd_) = dhat_.transpose() * phat0 - sys.D.transpose() * u0_ - lf.D_u;
  d_.tail(ns_) = sys.S_beta.transpose() * p0 - shat_.transpose() * uhat0_ - lf.Shat_u;
  q_ = u0_.dot(sys.G * u0_) + 2.0 * u0_.dot(lf.G_u) + lf.c_u + uhat0_.dot(ghat_ * uhat0_) +
       2.0 * uhat0_.dot(ghat_u) + lf.c_uhat;
}

Vector ReducedOperator::apply(const Vector &dX) const {
  if (dX.size() != size()) throw std::invalid_argument("ReducedOperator::apply: size mismatch");
  const BlockSystem &s = *sys_;
  const Vector psi_d = dX.head(nd_), psi_s = dX.tail(ns_);
  const Vector du = a_fact_.solve(Vector(s.S_beta * psi_s));
  const Vector duhat = ahat_fact_.solve(Vector(dhat_ * psi_d));
  const Vector dp = a_fact_.solve(Vector(s.G * du - s.D * psi_d));
  const Vector dphat = ahat_fact_.solve(Vector(ghat_ * duhat - shat_ * psi_s));
  Vector out(size());
  out.head(nd_) = dhat_.transpose() * dphat - s.D.transpose() * du + s.MD * psi_d;
  out.tail(ns_) = s.S_beta.transpose() * dp - shat_.transpose() * duhat + s.MSigma * psi_s;
  return out;
}

double ReducedOperator::energy(const Vector &X) const { return 0.5 * (X.dot(apply(X)) + 2.0 * d_.dot(X) + q_); }

Solution ReducedOperator::recover(const Vector &X) const {
  const BlockSystem &s = *sys_;
  Solution sol;
  sol.psi_d = X.head(nd_);
  sol.psi_sigma = X.tail(ns_);
  sol.U = a_fact_.solve(Vector(s.S_beta * sol.psi_sigma + s.f));
  const Vector uh = ahat_fact_.solve(Vector(dhat_ * sol.psi_d + s.pad_hat(s.g)));
  sol.Uhat = uh.head(s.Nhat());
  sol.multipliers = uh.tail(s.num_multipliers());
  return sol;
}

// ---------------------------------------------------------------------------

BlockPreconditioner::BlockPreconditioner(const BlockSystem &sys) : nd_(sys.ND()), size_(sys.ND() + sys.NSigma()) {
  const int segments = static_cast<int>(sys.psi.offset_d.size());
  for (int i = 0; i < segments; ++i) {
    SegmentBlock b;
    b.offset_d = sys.psi.offset_d[i];
    b.offset_s = sys.psi.offset_sigma[i];
    b.count_d = (i + 1 < segments ? sys.psi.offset_d[i + 1] : sys.ND()) - b.offset_d;
    b.count_s = (i + 1 < segments ? sys.psi.offset_sigma[i + 1] : sys.NSigma()) - b.offset_s;

    // Free hat dofs of segment i are contiguous.
    const int node_lo = sys.hat.node_offset[i];
    const int node_hi = i + 1 < segments ? sys.hat.node_offset[i + 1] : sys.hat.num_all();
    int lo = -1, hi = -1;
    for (int n = node_lo; n < node_hi; ++n)
      if (const int f = sys.hat.free_of_node[n]; f >= 0) {
        if (lo < 0) lo = f;
        hi = f + 1;
      }
    const int nf = lo < 0 ? 0 : hi - lo;

    const DenseMatrix md = dense_block(sys.MD, b.offset_d, b.offset_d, b.count_d, b.count_d);
    b.top = md;
    if (nf > 0) {
      const DenseMatrix a_i = dense_block(sys.Ahat_sharp, lo, lo, nf, nf);
      const DenseMatrix d_i = dense_block(sys.Dhat_beta, lo, b.offset_d, nf, b.count_d);
      const DenseMatrix g_i = dense_block(sys.Ghat, lo, lo, nf, nf);
      Eigen::LLT<DenseMatrix> a_llt(a_i);
      if (a_llt.info() != Eigen::Success)
        throw WellPosednessError("preconditioner: singular 1D block on segment " + std::to_string(i));
      const DenseMatrix w = a_llt.solve(d_i);
      b.top += w.transpose() * g_i * w;
    }
    b.top_llt.compute(b.top);
    const DenseMatrix ms = dense_block(sys.MSigma, b.offset_s, b.offset_s, b.count_s, b.count_s);
    b.bottom_llt.compute(ms);
    if (b.top_llt.info() != Eigen::Success || b.bottom_llt.info() != Eigen::Success)
      throw WellPosednessError("preconditioner: singular block on segment " + std::to_string(i));
    blocks_.push_back(std::move(b));
  }
}

BlockPreconditioner BlockPreconditioner::identity(int size) {
  BlockPreconditioner p;
  p.size_ = size;
  return p;
}

Vector BlockPreconditioner::apply(const Vector &r) const {
  if (r.size() != size_) throw std::invalid_argument("BlockPreconditioner::apply: size mismatch");
  if (blocks_.empty()) return r;
  Vector z(size_);
  for (const auto &b : blocks_) {
    z.segment(b.offset_d, b.count_d) = b.top_llt.solve(r.segment(b.offset_d, b.count_d));
    z.segment(nd_ + b.offset_s, b.count_s) = b.bottom_llt.solve(r.segment(nd_ + b.offset_s, b.count_s));
  }
  return z;
}

// ---------------------------------------------------------------------------

const char *to_string(PcgStatus status) {
  switch (status) {
  case PcgStatus::converged: return "converged";
  case PcgStatus::max_iterations: return "max_iterations";
  case PcgStatus::not_positive_definite: return "not_positive_definite";
  }
  return "?";
}

PcgReport pcg_core(const LinearOp &M, const LinearOp &precondition, const Vector &d, Vector &X,
                   const PcgOptions &options, const std::function<double(const Vector &, const Vector &)> &energy) {
  PcgReport rep;
  rep.d_norm = d.norm();
  const int max_it = options.max_iterations >= 0 ? options.max_iterations : 10 * static_cast<int>(d.size());
  if (X.size() != d.size()) X = Vector::Zero(d.size());
  if (rep.d_norm == 0.0) {
    X.setZero();
    rep.residuals.push_back(0.0);
    return rep;
  }

  Vector r = M(X) + d;
  Vector z = precondition(r);
  Vector dX = -z;
  double rz = r.dot(z);
  rep.residuals.push_back(r.norm());
  if (options.record_energy && energy) rep.energies.push_back(energy(X, r));

  int k = 0;
  while (rep.residuals.back() / rep.d_norm > options.tolerance) {
    if (k >= max_it) {
      rep.status = PcgStatus::max_iterations;
      break;
    }
    const Vector MdX = M(dX);
    const double curvature = dX.dot(MdX);
    if (!(curvature > 0.0)) {
      rep.status = PcgStatus::not_positive_definite;
      rep.last_zeta = 0.0;
      break;
    }
    const double zeta = rz / curvature;
    rep.last_zeta = zeta;
    X += zeta * dX;
    r += zeta * MdX;
    z = precondition(r);
    const double rz_next = r.dot(z);
    const double beta = rz_next / rz;
    dX = -z + beta * dX;
    rz = rz_next;
    ++k;
    rep.residuals.push_back(r.norm());
    if (options.record_energy && energy) rep.energies.push_back(energy(X, r));
    if (options.audit_every > 0 && k % options.audit_every == 0) {
      const double drift = (M(X) + d - r).norm() / rep.d_norm;
      rep.max_audit_drift = std::max(rep.max_audit_drift, drift);
    }
  }
  rep.iterations = k;
  return rep;
}

PcgResult pcg(const ReducedOperator &op, const BlockPreconditioner &prec, const PcgOptions &options, const Vector *X0) {
  if (prec.size() != op.size()) throw std::invalid_argument("pcg: preconditioner size mismatch");
  PcgResult res;
  res.X = X0 ? *X0 : Vector::Zero(op.size());
  const double q = op.q();
  const Vector &d = op.d();
  auto energy = [&](const Vector &X, const Vector &r) { return 0.5 * (X.dot(r) + d.dot(X) + q); };
  res.report = pcg_core([&](const Vector &x) { return op.apply(x); }, [&](const Vector &r) { return prec.apply(r); },
                        d, res.X, options, energy);
  res.solution = op.recover(res.X);
  return res;
}

DenseMatrix explicit_reduced_matrix(const ReducedOperator &op) {
  const int n = op.size();
  DenseMatrix m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = op.apply(Vector::Unit(n, j));
  return m;
}

} // namespace opt3d1d

#include "opt3d1d/linear_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <variant>

namespace opt3d1d {

using Cholesky = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
using LuColamd = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
using LuAmd = Eigen::SparseLU<SparseMatrix, Eigen::AMDOrdering<int>>;
using LuNatural = Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>>;

struct Factorization::Impl {
  std::variant<std::monostate, Cholesky, LuColamd, LuAmd, LuNatural> solver;
};

namespace {

template <typename Solver> void factorize(Solver &solver, const SparseMatrix &m, const char *name) {
  solver.compute(m);
  if (solver.info() != Eigen::Success)
    throw WellPosednessError(std::string("factorization of ") + name + " failed (singular or not definite)");
}

} // namespace

Factorization Factorization::spd(const SparseMatrix &matrix, const char *name) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("Factorization: matrix must be square");
  auto impl = std::make_shared<Impl>();
  Factorization f;
  f.size_ = matrix.rows();
  if (f.size_ > 0) factorize(impl->solver.emplace<Cholesky>(), matrix, name);
  f.impl_ = std::move(impl);
  return f;
}

Factorization Factorization::general(const SparseMatrix &matrix, Ordering ordering, const char *name) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("Factorization: matrix must be square");
  auto impl = std::make_shared<Impl>();
  Factorization f;
  f.size_ = matrix.rows();
  if (f.size_ > 0) {
    SparseMatrix m = matrix;
    m.makeCompressed();
    switch (ordering) {
    case Ordering::colamd: factorize(impl->solver.emplace<LuColamd>(), m, name); break;
    case Ordering::amd: factorize(impl->solver.emplace<LuAmd>(), m, name); break;
    case Ordering::natural: factorize(impl->solver.emplace<LuNatural>(), m, name); break;
    }
  }
  f.impl_ = std::move(impl);
  return f;
}

Vector Factorization::solve(const Vector &rhs) const {
  if (rhs.size() != size_) throw std::invalid_argument("Factorization::solve: size mismatch");
  if (size_ == 0) return Vector(0);
  if (!impl_) throw std::logic_error("Factorization::solve: not factorized");
  return std::visit(
      [&](const auto &s) -> Vector {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::monostate>) return Vector(0);
        else return s.solve(rhs);
      },
      impl_->solver);
}

DenseMatrix Factorization::solve(const DenseMatrix &rhs) const {
  DenseMatrix out(size_, rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) out.col(c) = solve(Vector(rhs.col(c)));
  return out;
}

} // namespace opt3d1d

#pragma once

#include <memory>

#include "opt3d1d/types.hpp"

namespace opt3d1d {

enum class Ordering { colamd, amd, natural };

/// Immutable sparse direct factorization; copies share the factors.
/// Zero-sized systems are valid and solve to empty vectors.
class Factorization {
public:
  /// Sparse Cholesky (LLt, AMD ordering). Throws WellPosednessError if the
  /// matrix is not numerically SPD.
  static Factorization spd(const SparseMatrix &matrix, const char *name = "matrix");
  /// Sparse LU with partial pivoting; used for the symmetric indefinite
  /// saddle-point systems. Throws WellPosednessError if singular.
  static Factorization general(const SparseMatrix &matrix, Ordering ordering = Ordering::colamd,
                               const char *name = "matrix");

  Vector solve(const Vector &rhs) const;
  DenseMatrix solve(const DenseMatrix &rhs) const;
  Eigen::Index size() const { return size_; }

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Eigen::Index size_ = 0;
};

} // namespace opt3d1d

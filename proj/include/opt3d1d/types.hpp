#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace opt3d1d {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// A point or segment violates a geometric precondition.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the offending line number (1-based, 0 if unknown).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Structurally invalid mesh (face incidence, degenerate elements).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A matrix that must be nonsingular failed to factorize.
class WellPosednessError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace opt3d1d

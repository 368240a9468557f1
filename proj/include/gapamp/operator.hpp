#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>

namespace gapamp {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Real symmetric operator in compressed sparse storage.
///
/// The constructor checks squareness and symmetry. Inputs that are symmetric
/// only up to rounding (e.g. products like U P U) are accepted when the
/// asymmetry is within `symmetry_tol` and are then symmetrized, so every
/// stored operator satisfies A == A^T exactly.
class SparseSymOperator {
 public:
  SparseSymOperator() = default;
  explicit SparseSymOperator(SparseMatrix m, double symmetry_tol = 1e-12);

  static SparseSymOperator from_dense(const DenseMatrix& m, double symmetry_tol = 1e-12);
  static SparseSymOperator identity(Index n);
  static SparseSymOperator zero(Index n);

  Index dim() const { return m_.rows(); }
  const SparseMatrix& matrix() const { return m_; }
  DenseMatrix dense() const { return DenseMatrix(m_); }
  Index nonzeros() const { return m_.nonZeros(); }

  SparseSymOperator operator+(const SparseSymOperator& o) const;
  SparseSymOperator operator-(const SparseSymOperator& o) const;
  SparseSymOperator operator*(double s) const;

 private:
  SparseMatrix m_;
};

// Max-abs entry (the ‖·‖_max used by every tolerance check in the library).
double max_abs(const SparseMatrix& m);
double max_abs(const DenseMatrix& m);

SparseMatrix sparse_identity(Index n);
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix outer(const DenseVector& u, const DenseVector& v);

// Largest singular value.
double spectral_norm(const DenseMatrix& m);
double spectral_norm(const ComplexMatrix& m);

}  // namespace gapamp

#include "gapamp/operator.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gapamp {

SparseSymOperator::SparseSymOperator(SparseMatrix m, double symmetry_tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("operator must be square, got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
  SparseMatrix mt = m.transpose();
  const double asym = max_abs(SparseMatrix(m - mt));
  const double scale = std::max(1.0, max_abs(m));
  if (asym > symmetry_tol * scale) {
    throw std::invalid_argument("operator is not symmetric (max asymmetry " + std::to_string(asym) +
                                ")");
  }
  if (asym > 0.0) {
    m = 0.5 * (m + mt);
  }
  m.prune(0.0);
  m.makeCompressed();
  m_ = std::move(m);
}

SparseSymOperator SparseSymOperator::from_dense(const DenseMatrix& m, double symmetry_tol) {
  return SparseSymOperator(m.sparseView(), symmetry_tol);
}

SparseSymOperator SparseSymOperator::identity(Index n) { return SparseSymOperator(sparse_identity(n)); }

SparseSymOperator SparseSymOperator::zero(Index n) { return SparseSymOperator(SparseMatrix(n, n)); }

SparseSymOperator SparseSymOperator::operator+(const SparseSymOperator& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("dimension mismatch in operator sum");
  return SparseSymOperator(SparseMatrix(m_ + o.m_), 0.0);
}

SparseSymOperator SparseSymOperator::operator-(const SparseSymOperator& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("dimension mismatch in operator difference");
  return SparseSymOperator(SparseMatrix(m_ - o.m_), 0.0);
}

SparseSymOperator SparseSymOperator::operator*(double s) const {
  return SparseSymOperator(SparseMatrix(s * m_), 0.0);
}

double max_abs(const SparseMatrix& m) {
  double r = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  }
  return r;
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

SparseMatrix sparse_identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix r = Eigen::kroneckerProduct(a, b);
  r.makeCompressed();
  return r;
}

SparseMatrix outer(const DenseVector& u, const DenseVector& v) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(u.size() * v.size()));
  for (Index i = 0; i < u.size(); ++i) {
    if (u(i) == 0.0) continue;
    for (Index j = 0; j < v.size(); ++j) {
      if (v(j) != 0.0) t.emplace_back(i, j, u(i) * v(j));
    }
  }
  SparseMatrix r(u.size(), v.size());
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace gapamp

#include "gapamp/ffham.hpp"

#include "gapamp/spectra.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gapamp {

namespace {

DenseMatrix random_orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  return qr.householderQ() * DenseMatrix::Identity(rows, cols);
}

}  // namespace

ProjectorTerm rank1_projector(const DenseVector& v, double coefficient) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("rank1_projector: zero vector");
  ProjectorTerm t;
  t.matrix = outer(v, v) / n2;
  t.matrix.makeCompressed();
  t.coefficient = coefficient;
  return t;
}

ProjectorTerm span_projector(const DenseMatrix& basis, double coefficient) {
  ProjectorTerm t;
  t.coefficient = coefficient;
  if (basis.cols() == 0) {
    t.matrix = SparseMatrix(basis.rows(), basis.rows());
    return t;
  }
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(basis);
  const Index r = qr.rank();
  if (r == 0) throw std::invalid_argument("span_projector: zero basis");
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(basis.rows(), r);
  DenseMatrix p = q * q.transpose();
  // Exact symmetry is part of the projector contract.
  p = (0.5 * (p + p.transpose())).eval();
  t.matrix = p.sparseView();
  t.matrix.makeCompressed();
  return t;
}

FFHamiltonian::FFHamiltonian(std::vector<ProjectorTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("FFHamiltonian needs at least one term");
  dim_ = terms_.front().matrix.rows();
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& m = terms_[k].matrix;
    if (m.rows() != m.cols() || m.rows() != dim_) {
      throw std::invalid_argument("term " + std::to_string(k) + " has dimension " +
                                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                  ", expected " + std::to_string(dim_));
    }
  }
}

SparseSymOperator assemble(std::span<const ProjectorTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("assemble: no terms");
  const Index n = terms.front().matrix.rows();
  SparseMatrix h(n, n);
  for (const auto& t : terms) {
    if (t.matrix.rows() != n || t.matrix.cols() != n) {
      throw std::invalid_argument("assemble: dimension mismatch among terms");
    }
    h += t.coefficient * t.matrix;
  }
  return SparseSymOperator(std::move(h));
}

SparseSymOperator assemble(const FFHamiltonian& ham) { return assemble(std::span(ham.terms())); }

FFHamiltonian with_unit_coefficients(const FFHamiltonian& ham) {
  std::vector<ProjectorTerm> terms = ham.terms();
  for (auto& t : terms) t.coefficient = 1.0;
  return FFHamiltonian(std::move(terms));
}

ValidationReport validate_frustration_free(const FFHamiltonian& ham, double tol) {
  return validate_frustration_free(ham, ValidationTolerance{tol, tol});
}

ValidationReport validate_frustration_free(const FFHamiltonian& ham, ValidationTolerance tol) {
  ValidationReport report;
  bool ok = true;
  report.terms.reserve(ham.terms().size());
  for (const auto& t : ham.terms()) {
    TermCheck c;
    const SparseMatrix sq = t.matrix * t.matrix;
    c.idempotency_residual = max_abs(SparseMatrix(sq - t.matrix));
    c.symmetry_residual = max_abs(SparseMatrix(t.matrix - SparseMatrix(t.matrix.transpose())));
    c.coefficient_in_range = t.coefficient >= 0.0 && t.coefficient <= 1.0;
    ok = ok && c.idempotency_residual <= tol.idempotency && c.symmetry_residual == 0.0 &&
         c.coefficient_in_range;
    report.terms.push_back(c);
  }

  // A non-symmetric term would make H non-symmetric; report rather than throw.
  SparseMatrix h(ham.dim(), ham.dim());
  for (const auto& t : ham.terms()) h += t.coefficient * t.matrix;
  DenseMatrix hd(h);
  hd = (0.5 * (hd + hd.transpose())).eval();
  EigOptions opts;
  opts.vectors = true;
  const SpectrumReport spec = eig_full(hd, opts);
  report.min_eigenvalue = spec.min();
  report.null_dim = spec.null_dim;
  report.vacuous = spec.null_dim == 0;

  for (Index j = 0; j < spec.size(); ++j) {
    if (std::abs(spec.eigenvalues[static_cast<std::size_t>(j)]) > spec.null_tol) continue;
    const DenseVector psi = spec.eigenvectors->col(j);
    for (std::size_t k = 0; k < ham.terms().size(); ++k) {
      const double r = (ham.terms()[k].matrix * psi).norm();
      report.terms[k].annihilation_residual = std::max(report.terms[k].annihilation_residual, r);
      report.max_annihilation_residual = std::max(report.max_annihilation_residual, r);
    }
  }
  ok = ok && report.max_annihilation_residual <= tol.annihilation;
  report.passed = ok;
  return report;
}

FFHamiltonian random_frustration_free(const RandomFFSpec& spec, std::mt19937_64& rng) {
  if (spec.dim < 1 || spec.num_terms < 1 || spec.null_dim < 0 || spec.null_dim > spec.dim) {
    throw std::invalid_argument("random_frustration_free: bad spec");
  }
  const Index n = spec.dim;
  const Index comp = n - spec.null_dim;
  const DenseMatrix basis = random_orthonormal(n, n, rng);
  const DenseMatrix complement = basis.rightCols(comp);

  const Index hi = spec.max_rank > 0 ? std::min(spec.max_rank, comp) : std::max<Index>(1, comp / 2);
  std::vector<Index> ranks(static_cast<std::size_t>(spec.num_terms), 0);
  if (comp > 0) {
    std::uniform_int_distribution<Index> pick(1, std::max<Index>(1, hi));
    for (auto& r : ranks) r = std::min(pick(rng), comp);
    if (spec.cover_complement) {
      Index total = 0;
      for (auto r : ranks) total += r;
      for (std::size_t k = 0; total < comp; k = (k + 1) % ranks.size()) {
        if (ranks[k] < comp) {
          ++ranks[k];
          ++total;
        }
      }
    }
  }

  std::uniform_real_distribution<double> coeff(0.2, 1.0);
  std::vector<ProjectorTerm> terms;
  terms.reserve(ranks.size());
  for (Index r : ranks) {
    const double a = spec.mixed_coefficients ? coeff(rng) : 1.0;
    if (r == 0) {
      terms.push_back(ProjectorTerm{SparseMatrix(n, n), a});
      continue;
    }
    const DenseMatrix mix = random_orthonormal(comp, r, rng);
    terms.push_back(span_projector(complement * mix, a));
  }
  return FFHamiltonian(std::move(terms));
}

}  // namespace gapamp

#pragma once

#include "gapamp/operator.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gapamp {

/// One term a_k Π_k of a frustration-free Hamiltonian. Π_k is stored as an
/// explicit sparse matrix; nothing is checked at construction so that
/// `validate_frustration_free` can report malformed terms instead of throwing.
struct ProjectorTerm {
  SparseMatrix matrix;
  double coefficient = 1.0;

  Index dim() const { return matrix.rows(); }
};

/// Returns v v^T / |v|^2 with coefficient `coefficient`.
/// Throws std::invalid_argument for the zero vector.
ProjectorTerm rank1_projector(const DenseVector& v, double coefficient = 1.0);

/// Projector onto the column span of `basis` (columns need not be orthonormal).
ProjectorTerm span_projector(const DenseMatrix& basis, double coefficient = 1.0);

/// H = Σ_k a_k Π_k over an N-dimensional space, L >= 1 terms.
class FFHamiltonian {
 public:
  /// Throws std::invalid_argument if `terms` is empty, a term is not square,
  /// or the terms do not share one dimension.
  explicit FFHamiltonian(std::vector<ProjectorTerm> terms);

  Index dim() const { return dim_; }
  Index num_terms() const { return static_cast<Index>(terms_.size()); }
  const std::vector<ProjectorTerm>& terms() const { return terms_; }
  const ProjectorTerm& term(Index k) const { return terms_.at(static_cast<std::size_t>(k)); }

 private:
  std::vector<ProjectorTerm> terms_;
  Index dim_ = 0;
};

/// Σ a_k Π_k. Throws std::invalid_argument on an empty list or mismatched dimensions.
SparseSymOperator assemble(std::span<const ProjectorTerm> terms);
SparseSymOperator assemble(const FFHamiltonian& ham);

/// The same projectors with every a_k set to 1. This is the operator that the
/// reflection-based construction (X, U, G, H') encodes.
FFHamiltonian with_unit_coefficients(const FFHamiltonian& ham);

struct ValidationTolerance {
  double idempotency = 1e-10;
  double annihilation = 1e-8;
};

struct TermCheck {
  double idempotency_residual = 0.0;  // ‖Π² − Π‖_max
  double symmetry_residual = 0.0;     // ‖Π − Πᵀ‖_max
  bool coefficient_in_range = true;   // 0 <= a_k <= 1
  double annihilation_residual = 0.0; // max over null vectors ψ of ‖Π ψ‖
};

struct ValidationReport {
  std::vector<TermCheck> terms;
  int null_dim = 0;
  double min_eigenvalue = 0.0;
  double max_annihilation_residual = 0.0;
  bool vacuous = false;  // H has no null vectors; annihilation holds trivially
  bool passed = false;
};

/// Checks every term (idempotency, exact symmetry, a_k ∈ [0,1]) and that every
/// null vector of H is annihilated by every Π_k. Never throws on a failed
/// check; failures show up in the report.
ValidationReport validate_frustration_free(const FFHamiltonian& ham, ValidationTolerance tol = {});
ValidationReport validate_frustration_free(const FFHamiltonian& ham, double tol);

/// Counts calls to the Hamiltonian black box O_H. Only grows.
class BlackBoxLedger {
 public:
  void charge(std::uint64_t n = 1) { calls_ += n; }
  std::uint64_t calls() const { return calls_; }

 private:
  std::uint64_t calls_ = 0;
};

struct RandomFFSpec {
  Index dim = 8;
  Index num_terms = 2;
  Index null_dim = 1;
  Index max_rank = 0;  // 0: up to (dim - null_dim) / 2
  bool mixed_coefficients = true;
  bool cover_complement = true;  // ranges jointly span the complement of the null space
};

/// Random frustration-free Hamiltonian with a prescribed null space: every Π_k
/// projects onto a random subspace of the orthogonal complement of a random
/// `null_dim`-dimensional subspace. With cover_complement the null space of H
/// is exactly that subspace.
FFHamiltonian random_frustration_free(const RandomFFSpec& spec, std::mt19937_64& rng);

}  // namespace gapamp

#pragma once

#include "gapamp/operator.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapamp {

class FFHamiltonian;
struct AmplifiedOperator;

inline constexpr Index kDefaultDenseCap = 4096;

struct EigOptions {
  bool vectors = false;
  Index dense_cap = kDefaultDenseCap;
  std::optional<double> null_tol;  // default: 1e-9 * max(1, ‖A‖)
};

/// Result of a full symmetric eigendecomposition.
struct SpectrumReport {
  std::vector<double> eigenvalues;          // ascending
  std::optional<DenseMatrix> eigenvectors;  // columns, same order as eigenvalues
  double null_tol = 0.0;
  int null_dim = 0;

  Index size() const { return static_cast<Index>(eigenvalues.size()); }
  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
  double norm() const;
  double gap_about(double target) const;
};

/// Thrown when a dense decomposition is requested above the configured cap.
class DenseCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double default_null_tol(double operator_norm);

/// Dense symmetric eigendecomposition (Householder tridiagonalization + implicit QL).
SpectrumReport eig_full(const SparseSymOperator& op, const EigOptions& opts = {});
SpectrumReport eig_full(const DenseMatrix& symmetric, const EigOptions& opts = {});

/// Smallest |λ − target| over eigenvalues outside the cluster of `target`
/// (cluster radius = report.null_tol). Returns +inf when the cluster is the
/// whole spectrum. Throws std::invalid_argument when no eigenvalue lies within
/// max(1e-9, null_tol) of `target`.
double spectral_gap(const SpectrumReport& report, double target);

/// Number of eigenvalues with |λ| <= tol.
int null_space_dim(const SparseSymOperator& op, double tol, Index dense_cap = kDefaultDenseCap);
int null_space_dim(const SpectrumReport& report, double tol);

/// Projection of G onto V_j = span{ψ_j⊗|o>, U ψ_j⊗|o>} compared with the
/// analytic block [[-s², s c], [s c, s²]] where c = cos α_j = 1 − 2 λ_j / L_eff.
struct BlockReport {
  Index j = 0;
  double lambda = 0.0;  // eigenvalue λ_j of the unit-coefficient Hamiltonian
  double cos_alpha = 0.0;
  double sin_alpha = 0.0;
  Eigen::Matrix2d block = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d analytic = Eigen::Matrix2d::Zero();
  double deviation = 0.0;     // ‖block − analytic‖_max
  double leakage = 0.0;       // ‖(1 − Π_V) G v‖ for v ∈ V_j, max over the basis
  Eigen::Vector2d block_eigenvalues = Eigen::Vector2d::Zero();
};

/// `g` must be a G-flavored operator built from `ham`. `j` indexes the
/// ascending spectrum of the unit-coefficient Hamiltonian; λ_j must be nonzero.
BlockReport verify_block(const FFHamiltonian& ham, const AmplifiedOperator& g, Index j);

/// verify_block for every j with λ_j != 0, sharing one eigendecomposition.
std::vector<BlockReport> verify_all_blocks(const FFHamiltonian& ham, const AmplifiedOperator& g);

/// CSV rows "index,eigenvalue" and a JSON summary (gap about 0, null_dim, extremes).
std::string spectrum_csv(const SpectrumReport& report);
std::string spectrum_json(const SpectrumReport& report);

struct LanczosOptions {
  int max_iterations = 400;
  double tolerance = 1e-10;
  std::uint64_t seed = 7;
};

struct LanczosResult {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // Ritz vectors, one column per value
  int iterations = 0;
  bool converged = false;
};

/// Lowest `k` eigenpairs by Lanczos with full reorthogonalization.
/// Used for operators above the dense cap; cross-checked against eig_full in tests.
LanczosResult lanczos_lowest(const SparseSymOperator& op, int k, const LanczosOptions& opts = {});

}  // namespace gapamp

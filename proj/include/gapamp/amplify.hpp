#pragma once

#include "gapamp/ffham.hpp"
#include "gapamp/operator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gapamp {

enum class Flavor { G, Hprime, Gtilde, Gbar, LocalHprime };

std::string to_string(Flavor f);

/// An operator on system ⊗ ancilla. Basis index = system_index * ancilla_dim + ancilla_index.
///
/// For LocalHprime the ancilla is a register of L+1 qubits (qubit 0 is the
/// flag) restricted to the bitstrings listed in `qubit_basis`; bit k of a
/// bitstring is the occupation of qubit k. Occupation convention: n = |1><1|,
/// σᶻ|0> = +|0>, σ⁺ = |1><0| creates a particle, so n = (1 − σᶻ)/2.
struct AmplifiedOperator {
  SparseSymOperator op;
  Index system_dim = 0;
  Index ancilla_dim = 0;
  Flavor flavor = Flavor::G;
  double delta = 0.0;        // penalty δ (Hprime) or √Δ̄/2 flag penalty (Gbar, LocalHprime)
  bool padded = false;
  double l_eff = 0.0;        // L or 2L for the reflection construction; L for the others
  double d_exponent = 0.0;   // LocalHprime only
  std::vector<std::uint32_t> qubit_basis;  // LocalHprime only

  Index dim() const { return op.dim(); }
};

/// Ancilla register size of the reflection construction: L, or 2L when padded.
Index reflection_ancilla_dim(const FFHamiltonian& ham, bool padded);

/// |o> = (1/√D) Σ_k |k> on a D-dimensional ancilla.
DenseVector uniform_ancilla_state(Index ancilla_dim);

/// X = Σ_k Π_k ⊗ |k><k|. Coefficients a_k are not used: the reflection
/// construction acts on Σ_k Π_k. Padded slots carry zero projectors.
SparseSymOperator build_X(const FFHamiltonian& ham, bool padded = false);

/// U = exp(−iπX) = 1 − 2X (real, symmetric, U² = 1).
SparseSymOperator build_U(const FFHamiltonian& ham, bool padded = false);

/// P = 1 ⊗ |o><o|.
SparseSymOperator build_P(Index system_dim, Index ancilla_dim);

/// G = U P U − P. With padded=true the ancilla is doubled so that
/// cos α_j = 1 − λ_j / L stays non-negative.
AmplifiedOperator build_G(const FFHamiltonian& ham, bool padded = true);

/// H' = L_eff G + δ (1 − P) with δ = √(gap_lower_bound · L_eff).
/// Throws std::invalid_argument if gap_lower_bound <= 0.
AmplifiedOperator build_Hprime(const FFHamiltonian& ham, double gap_lower_bound, bool padded = true);

/// G̃ = Σ_k √a_k Π_k ⊗ (|k><0| + |0><k|) on an (L+1)-dimensional ancilla; index 0 is the flag.
AmplifiedOperator build_Gtilde(const FFHamiltonian& ham);

/// Ḡ = G̃ + (√Δ̄/2)(1 − |0><0|), the ancilla-register form of the flagged operator.
AmplifiedOperator build_Gbar(const FFHamiltonian& ham, double gap_lower_bound);

/// Qubit-register Hamiltonian
///   H' = L^{-1/d} [ Σ_k √a_k Π_k (σ⁺_k σ⁻_0 + σ⁻_k σ⁺_0) + (√Δ̄/2)(1 + σᶻ_0)/2 ] + 2Z,
///   Z = 2(N̂ − 1),
/// on all 2^{L+1} bitstrings (total dimension capped at 2^14).
/// Throws if the null space of H is not one-dimensional, if gap_lower_bound <= 0,
/// or if d_exponent is outside (0, 2].
AmplifiedOperator build_local_Hprime(const FFHamiltonian& ham, double gap_lower_bound,
                                     double d_exponent = 2.0);

/// Same operator restricted to the given particle-number sectors (block diagonal,
/// since H' conserves N̂). Reaches larger L than the full assembly.
AmplifiedOperator build_local_Hprime_sectors(const FFHamiltonian& ham, double gap_lower_bound,
                                             double d_exponent, const std::vector<int>& sectors);

/// The three pieces of the local Hamiltonian on an explicit qubit basis, unscaled.
struct LocalTerms {
  SparseSymOperator coupling;      // Σ_k √a_k Π_k (σ⁺_k σ⁻_0 + h.c.)
  SparseSymOperator flag_penalty;  // 1 ⊗ (1 + σᶻ_0)/2
  SparseSymOperator particle_penalty;  // 1 ⊗ Z,  Z = 2(N̂ − 1)
  SparseSymOperator number;        // 1 ⊗ N̂
};
LocalTerms build_local_terms(const FFHamiltonian& ham, const std::vector<std::uint32_t>& qubit_basis);

/// Bitstrings over `num_qubits` qubits whose popcount is in `sectors`, ordered by (popcount, value).
std::vector<std::uint32_t> qubit_sector_basis(int num_qubits, const std::vector<int>& sectors);

/// Block of a LocalHprime operator on the span of weight-a bitstrings.
/// Block dimension N · C(L+1, a). Throws on wrong flavor or a out of range.
SparseSymOperator restrict_to_sector(const AmplifiedOperator& op, int a);

/// Same, for any operator laid out on `qubit_basis`.
SparseSymOperator restrict_to_sector(const SparseSymOperator& op, Index system_dim,
                                     const std::vector<std::uint32_t>& qubit_basis, int a);

/// N(S, m) = ½ √((S + m)(S − m + 2)): S⁺|S, m−2> = N(S, m)|S, m>, spins in
/// units where σᶻ has eigenvalues ±1. Valid for −S <= m <= S + 2 with m ≡ S (mod 2);
/// the endpoints give 0. Throws std::domain_error otherwise.
double su2_ladder_coefficient(int S, int m);

}  // namespace gapamp

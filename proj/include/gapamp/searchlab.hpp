#pragma once

#include "gapamp/edge_coloring.hpp"
#include "gapamp/ffham.hpp"
#include "gapamp/graph.hpp"

#include <cstdint>

namespace gapamp {

/// Frustration-free search Hamiltonian on an expander with marked vertex x:
/// per-edge states φ_(y,z) = c(y)|y> − c(z)|z>, normalized projectors grouped
/// by edge color into Π_k, so L = χ.
struct SearchInstance {
  RegularGraph graph;
  EdgeColoring coloring;
  Index marked = 0;
  FFHamiltonian ham;            // H̃_x = Σ_k Π_k
  std::uint64_t oracle_calls = 0;  // vertex-identity tests made while building
};

/// c(y) = 1/√(d(M−1)) if y = x, 1/√d otherwise.
double search_weight(Index y, Index x, Index M, int d);

/// ψ_x = |x>/√2 + Σ_{y≠x} |y>/√(2(M−1)).
DenseVector search_ground_state(Index M, Index x);

/// Throws std::invalid_argument on an improper coloring or x out of range.
SearchInstance build_search_ff(const RegularGraph& graph, const EdgeColoring& coloring, Index x);

/// H_x = Σ_(y,z) |φ_(y,z)><φ_(y,z)| (unnormalized per-edge terms).
SparseSymOperator unnormalized_search_hamiltonian(const SearchInstance& inst);

struct GapCertificate {
  Index M = 0;
  int d = 0;
  double lambda = 0.0;
  int chi = 0;
  double gap = 0.0;    // of H̃_x, by dense diagonalization
  double bound = 0.0;  // 1/(4(M−1))
  bool unique_ground_state = false;
  bool pass = false;
};

GapCertificate gap_certificate(const SearchInstance& inst);

struct SearchStats {
  Index M = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  double p_lower = 0.0;  // Wilson bounds at z = 3
  double p_upper = 0.0;
  double p_x = 0.0;      // |<x|ψ>|²
  double p_s = 0.0;      // |<s|ψ>|²
  double analytic = 0.0; // p_x · p_s
  double exact_success = 0.0;  // full protocol success probability
  bool pass = false;           // analytic <= p_upper
};

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z);

/// Two-measurement protocol from |s>: project onto {|ψ><ψ|, 1 − |ψ><ψ|}, then
/// measure in the computational basis; success when the outcome is x. Both
/// measurements are Born-sampled exactly from the given unit vector ψ.
SearchStats measurement_search(const DenseVector& psi, Index x, std::uint64_t seed, std::uint64_t trials);

/// Same, with ψ the unique ground state of H̃_x computed by dense diagonalization.
/// Throws std::invalid_argument if the ground state is degenerate.
SearchStats measurement_search(const SearchInstance& inst, std::uint64_t seed, std::uint64_t trials);

/// Unique ground state of `op` (ascending order); throws on degeneracy.
DenseVector unique_ground_state(const SparseSymOperator& op, double degeneracy_tol = 1e-9);

}  // namespace gapamp

#pragma once

#include "gapamp/ffham.hpp"
#include "gapamp/operator.hpp"
#include "gapamp/spectra.hpp"

#include <cstdint>
#include <vector>

namespace gapamp {

struct EvolutionResult {
  ComplexMatrix unitary;
  BlackBoxLedger ledger;
  double t = 0.0;
  int steps = 0;
  int order = 0;
};

/// exp(−i op t) from the dense eigendecomposition.
ComplexMatrix evolve_exact(const SparseSymOperator& op, double t, Index dense_cap = kDefaultDenseCap);

/// Product-formula simulation of exp(−i H' t) for the reflection-built H'.
///
/// H' = A₁ − (L_eff + δ) P + δ with A₁ = L_eff U P U. Each A₁ factor is applied as
/// U exp(−i L_eff P s) U and charges the ledger 2; the P factors are closed-form
/// (1 + (e^{−iθ} − 1) P) and free; the constant δ is an exact global phase.
/// order 1: [e^{−iA₁τ} e^{−iBτ}]^steps. order 2: [e^{−iBτ/2} e^{−iA₁τ} e^{−iBτ/2}]^steps.
/// Throws std::invalid_argument when steps < 1, order is not 1 or 2, or gap_lower_bound <= 0.
EvolutionResult evolve_blackbox(const FFHamiltonian& ham, double gap_lower_bound, double t, int steps, int order,
                                bool padded = true);

/// Spectral norm of W − V.
double evolution_error(const ComplexMatrix& w, const ComplexMatrix& v);

/// Smallest step count whose error is <= eps (doubling, then bisection).
/// Returns −1 if max_steps is not enough.
int min_steps_for(const FFHamiltonian& ham, double gap_lower_bound, double t, int order, double eps,
                  bool padded = true, int max_steps = 1 << 16);

/// Call-count model ⌈c |L t|^{1 + 1/(2κ)}⌉ with c fitted to measurements.
/// κ = 1 is the second-order (Strang) formula.
struct CallModel {
  int kappa = 1;
  double eps = 1e-4;
  double c = 1.0;
};

struct CallSample {
  double l_eff = 0.0;
  double t = 0.0;
  std::uint64_t calls = 0;
};

/// Geometric mean of calls / |L t|^{1+1/(2κ)} over the samples.
CallModel calibrate_call_model(const std::vector<CallSample>& samples, int kappa, double eps);

/// Throws std::invalid_argument when kappa < 1 or eps <= 0.
std::uint64_t calls_needed(double L, double t, int kappa, double eps, const CallModel& model);

}  // namespace gapamp

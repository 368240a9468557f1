#pragma once

#include "gapamp/graph.hpp"
#include "gapamp/operator.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace gapamp {

/// H_x = −|x><x| + F/4 with F real symmetric, off-diagonals <= 0, irreducible, ‖F‖ <= 1.
struct PerturbedSearchHam {
  SparseSymOperator F;
  Index x = 0;
  SparseSymOperator H;

  Index dim() const { return H.dim(); }
};

/// Throws std::invalid_argument when ‖F‖ > 1 + 1e−9, F has a positive
/// off-diagonal entry, its support graph is disconnected, or x is out of range.
PerturbedSearchHam build_perturbed(const SparseSymOperator& F, Index x);

/// Connected support graph of the off-diagonal part.
bool is_irreducible(const SparseSymOperator& F);

/// Random F: a random spanning path plus Erdős–Rényi extra edges of mean degree
/// `extra_degree`, weights uniform in (0.1, 1], negated, zero diagonal, scaled
/// to spectral norm 1 − 1e−6.
SparseSymOperator random_stoquastic_F(Index M, double extra_degree, std::mt19937_64& rng);

/// F = −(1 − 1e−6) A/d for a d-regular graph.
SparseSymOperator expander_F(const RegularGraph& g);

struct GroundStateCheck {
  double e0 = 0.0;
  double gap = 0.0;
  double p_x = 0.0;
  double min_component = 0.0;  // of the sign-fixed ground state
  bool e0_ok = false;          // E_0 <= −3/4 + 1e−9
  bool gap_ok = false;         // Δ >= 1/2 − 1e−9
  bool positive = false;       // every component > 0
  bool pass() const { return e0_ok && gap_ok && positive; }
};

GroundStateCheck ground_state_check(const PerturbedSearchHam& ham);

/// β, η = β/p, p = ⌈β/η₀⌉ with η₀ = min(1/(4β), positivity bound / 2).
struct PathSchedule {
  double beta = 0.0;
  double eta = 0.0;
  int p = 0;
};

PathSchedule default_schedule(const PerturbedSearchHam& ham, double beta);

/// f(y, z) = <y| 1 − ηH |z> and the weight of a periodic path z(1..p).
class PathWeights {
 public:
  /// Throws std::invalid_argument when p < 1, eta <= 0 or 1 − ηH has a negative entry.
  PathWeights(const PerturbedSearchHam& ham, double eta, int p);

  double f(Index y, Index z) const;
  double weight(const std::vector<Index>& path) const;

  /// Columns with f(y, ·) > 0, ascending (includes y itself).
  const std::vector<Index>& support(Index y) const { return rows_[static_cast<std::size_t>(y)]; }

  Index dim() const { return transfer_.rows(); }
  int p() const { return p_; }
  double eta() const { return eta_; }
  Index marked() const { return x_; }
  const SparseMatrix& transfer() const { return transfer_; }

  /// tr((1 − ηH)^p), equal to the sum of weight over all paths.
  double transfer_trace() const;

 private:
  SparseMatrix transfer_;
  std::vector<std::vector<Index>> rows_;
  std::vector<std::vector<double>> vals_;
  double eta_;
  int p_;
  Index x_;
};

/// Single-slice Metropolis chain on paths: pick a slice r uniformly, propose
/// z(r) uniformly from C = {y : f(z(r−1), y) > 0 and f(y, z(r+1)) > 0}, accept
/// with min(1, w'/w). C does not depend on z(r), so the proposal is symmetric.
/// Every proposal charges 4 oracle calls (the four f entries of the ratio).
class PathChain {
 public:
  /// Throws std::invalid_argument if p < 2 or the initial path has zero weight.
  PathChain(const PathWeights& w, std::vector<Index> path);

  bool step(std::mt19937_64& rng);
  void assign(int r, Index y) { path_[static_cast<std::size_t>(r)] = y; }  // move without a proposal
  const std::vector<Index>& path() const { return path_; }
  std::uint64_t steps() const { return steps_; }
  std::uint64_t oracle_calls() const { return 4 * steps_; }

  std::vector<Index> candidates(int r) const;
  double ratio(int r, Index y) const;  // w(path with z(r) = y) / w(path)

 private:
  const PathWeights* w_;
  std::vector<Index> path_;
  std::uint64_t steps_ = 0;
};

/// Exact transition matrix of PathChain over all positive-weight paths
/// (enumerated in lexicographic order; M^p <= 4096).
struct ChainMatrix {
  std::vector<std::vector<Index>> states;
  std::vector<double> weights;
  DenseMatrix P;
};
ChainMatrix chain_transition_matrix(const PathWeights& w);

struct MixStats {
  Index M = 0;
  double beta = 0.0;
  double eta = 0.0;
  int p = 0;
  std::uint64_t seed = 0;
  std::uint64_t hitting_time = 0;  // chain steps until some slice equals x
  std::uint64_t oracle_calls = 0;
  std::uint64_t moves = 0;         // accepted proposals
  bool hit = false;                // false: censored at max_steps
};

/// Hitting time of "some slice equals x" for PathChain started from a constant
/// path at a uniformly random vertex. With rejection_free the same chain is
/// simulated by drawing the number of rejected proposals geometrically and the
/// accepted move from the exact move probabilities, so the step count has
/// the same distribution at a fraction of the cost.
MixStats metropolis_mix(const PerturbedSearchHam& ham, const PathSchedule& sched, std::uint64_t seed,
                        std::uint64_t max_steps, bool rejection_free = true);

}  // namespace gapamp

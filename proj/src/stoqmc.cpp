#include "gapamp/stoqmc.hpp"

#include "gapamp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gapamp {

namespace {

constexpr double kNormSlack = 1e-9;
constexpr double kScale = 1.0 - 1e-6;

double operator_norm(const SparseSymOperator& op) {
  const SpectrumReport spec = eig_full(op);
  return spec.norm();
}

// Sum tree over slice rates. Parents are recomputed from their children on
// every update, so no floating-point drift accumulates.
class RateTree {
 public:
  explicit RateTree(int n) : n_(n) {
    size_ = 1;
    while (size_ < n) size_ *= 2;
    tree_.assign(static_cast<std::size_t>(2 * size_), 0.0);
  }

  void set(int i, double v) {
    std::size_t k = static_cast<std::size_t>(i + size_);
    tree_[k] = v;
    for (k /= 2; k >= 1; k /= 2) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
  }

  double total() const { return tree_[1]; }

  int find(double u) const {
    std::size_t k = 1;
    while (k < static_cast<std::size_t>(size_)) {
      if (u < tree_[2 * k] || tree_[2 * k + 1] <= 0.0) {
        k = 2 * k;
      } else {
        u -= tree_[2 * k];
        k = 2 * k + 1;
      }
    }
    return std::min(static_cast<int>(k) - size_, n_ - 1);
  }

 private:
  int n_;
  int size_;
  std::vector<double> tree_;
};

}  // namespace

bool is_irreducible(const SparseSymOperator& F) {
  std::vector<Edge> edges;
  const SparseMatrix& m = F.matrix();
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      if (it.row() < c && it.value() != 0.0) edges.emplace_back(it.row(), c);
  return is_connected(F.dim(), edges);
}

PerturbedSearchHam build_perturbed(const SparseSymOperator& F, Index x) {
  const Index M = F.dim();
  if (x < 0 || x >= M) throw std::invalid_argument("build_perturbed: marked index out of range");
  const SparseMatrix& m = F.matrix();
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      if (it.row() != c && it.value() > 0.0) throw std::invalid_argument("build_perturbed: F has a positive off-diagonal entry");
  if (M > 1 && !is_irreducible(F)) throw std::invalid_argument("build_perturbed: F is reducible");
  const double norm = operator_norm(F);
  if (norm > 1.0 + kNormSlack) throw std::invalid_argument("build_perturbed: ‖F‖ = " + std::to_string(norm) + " > 1");

  SparseMatrix h = 0.25 * m;
  h.coeffRef(x, x) -= 1.0;
  return PerturbedSearchHam{F, x, SparseSymOperator(std::move(h), 0.0)};
}

SparseSymOperator random_stoquastic_F(Index M, double extra_degree, std::mt19937_64& rng) {
  if (M < 2) throw std::invalid_argument("random_stoquastic_F: need M >= 2");
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Index> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  DenseMatrix w = DenseMatrix::Zero(M, M);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double v = 1.0 - weight(rng) + 0.1;  // (0.1, 1]
    w(order[i], order[i + 1]) = w(order[i + 1], order[i]) = v;
  }
  const double q = std::min(1.0, extra_degree / static_cast<double>(M - 1));
  for (Index a = 0; a < M; ++a)
    for (Index b = a + 1; b < M; ++b)
      if (w(a, b) == 0.0 && unit(rng) < q) w(a, b) = w(b, a) = 1.0 - weight(rng) + 0.1;

  const double norm = eig_full(w).norm();
  DenseMatrix f = -(kScale / norm) * w;
  return SparseSymOperator(SparseMatrix(f.sparseView()), 0.0);
}

SparseSymOperator expander_F(const RegularGraph& g) {
  return SparseSymOperator(SparseMatrix(-(kScale / g.d) * g.adjacency), 0.0);
}

GroundStateCheck ground_state_check(const PerturbedSearchHam& ham) {
  EigOptions opts;
  opts.vectors = true;
  const SpectrumReport spec = eig_full(ham.H, opts);
  GroundStateCheck c;
  c.e0 = spec.eigenvalues[0];
  c.gap = spec.size() > 1 ? spec.eigenvalues[1] - spec.eigenvalues[0] : std::numeric_limits<double>::infinity();
  DenseVector g = spec.eigenvectors->col(0);
  if (g.sum() < 0) g = -g;
  c.p_x = g(ham.x) * g(ham.x);
  c.min_component = g.minCoeff();
  c.e0_ok = c.e0 <= -0.75 + 1e-9;
  c.gap_ok = c.gap >= 0.5 - 1e-9;
  c.positive = c.min_component > 0.0;
  return c;
}

PathSchedule default_schedule(const PerturbedSearchHam& ham, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("default_schedule: beta must be positive");
  const DenseVector diag = ham.H.matrix().diagonal();
  const double hmax = diag.maxCoeff();
  const double bound = hmax > 0.0 ? 1.0 / hmax : std::numeric_limits<double>::infinity();
  const double eta0 = std::min(1.0 / (4.0 * beta), bound / 2.0);
  PathSchedule s;
  s.beta = beta;
  s.p = static_cast<int>(std::ceil(beta / eta0));
  s.eta = beta / s.p;
  return s;
}

PathWeights::PathWeights(const PerturbedSearchHam& ham, double eta, int p) : eta_(eta), p_(p), x_(ham.x) {
  if (p < 1) throw std::invalid_argument("PathWeights: p must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("PathWeights: eta must be positive");
  const Index M = ham.dim();
  transfer_ = sparse_identity(M) - eta * ham.H.matrix();
  transfer_.prune(0.0);
  transfer_.makeCompressed();
  rows_.resize(static_cast<std::size_t>(M));
  vals_.resize(static_cast<std::size_t>(M));
  for (Index c = 0; c < transfer_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(transfer_, c); it; ++it) {
      if (it.value() < 0.0) throw std::invalid_argument("PathWeights: 1 − ηH has a negative entry; reduce eta");
      // Symmetric, so column c lists row c.
      rows_[static_cast<std::size_t>(c)].push_back(it.row());
      vals_[static_cast<std::size_t>(c)].push_back(it.value());
    }
  }
}

double PathWeights::f(Index y, Index z) const {
  const auto& r = rows_[static_cast<std::size_t>(y)];
  const auto it = std::lower_bound(r.begin(), r.end(), z);
  if (it == r.end() || *it != z) return 0.0;
  return vals_[static_cast<std::size_t>(y)][static_cast<std::size_t>(it - r.begin())];
}

double PathWeights::weight(const std::vector<Index>& path) const {
  if (static_cast<int>(path.size()) != p_) throw std::invalid_argument("PathWeights::weight: path length != p");
  double w = 1.0;
  for (int r = 0; r < p_; ++r) w *= f(path[static_cast<std::size_t>(r)], path[static_cast<std::size_t>((r + 1) % p_)]);
  return w;
}

double PathWeights::transfer_trace() const {
  const SpectrumReport spec = eig_full(SparseSymOperator(transfer_, 0.0));
  double tr = 0.0;
  for (double ev : spec.eigenvalues) tr += std::pow(ev, p_);
  return tr;
}

PathChain::PathChain(const PathWeights& w, std::vector<Index> path) : w_(&w), path_(std::move(path)) {
  if (w.p() < 2) throw std::invalid_argument("PathChain: p must be >= 2");
  if (!(w.weight(path_) > 0.0)) throw std::invalid_argument("PathChain: initial path has zero weight");
}

std::vector<Index> PathChain::candidates(int r) const {
  const int p = w_->p();
  const Index a = path_[static_cast<std::size_t>((r + p - 1) % p)];
  const Index b = path_[static_cast<std::size_t>((r + 1) % p)];
  const auto& ra = w_->support(a);
  const auto& rb = w_->support(b);
  std::vector<Index> out;
  std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(out));
  return out;
}

double PathChain::ratio(int r, Index y) const {
  const int p = w_->p();
  const Index a = path_[static_cast<std::size_t>((r + p - 1) % p)];
  const Index b = path_[static_cast<std::size_t>((r + 1) % p)];
  const Index z = path_[static_cast<std::size_t>(r)];
  return (w_->f(a, y) * w_->f(y, b)) / (w_->f(a, z) * w_->f(z, b));
}

bool PathChain::step(std::mt19937_64& rng) {
  ++steps_;
  const int r = std::uniform_int_distribution<int>(0, w_->p() - 1)(rng);
  const std::vector<Index> c = candidates(r);
  const Index y = c[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)];
  if (y == path_[static_cast<std::size_t>(r)]) return false;
  const double acc = std::min(1.0, ratio(r, y));
  if (acc < 1.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= acc) return false;
  path_[static_cast<std::size_t>(r)] = y;
  return true;
}

ChainMatrix chain_transition_matrix(const PathWeights& w) {
  const Index M = w.dim();
  const int p = w.p();
  if (p < 2) throw std::invalid_argument("chain_transition_matrix: p must be >= 2");
  double total = 1.0;
  for (int i = 0; i < p; ++i) total *= static_cast<double>(M);
  if (total > 4096.0) throw std::invalid_argument("chain_transition_matrix: too many paths to enumerate");

  ChainMatrix cm;
  std::vector<Index> code(static_cast<std::size_t>(total), -1);
  auto encode = [&](const std::vector<Index>& z) {
    Index k = 0;
    for (Index v : z) k = k * M + v;
    return k;
  };
  std::vector<Index> z(static_cast<std::size_t>(p), 0);
  for (Index k = 0; k < static_cast<Index>(total); ++k) {
    Index rem = k;
    for (int r = p - 1; r >= 0; --r) {
      z[static_cast<std::size_t>(r)] = rem % M;
      rem /= M;
    }
    const double wt = w.weight(z);
    if (wt > 0.0) {
      code[static_cast<std::size_t>(k)] = static_cast<Index>(cm.states.size());
      cm.states.push_back(z);
      cm.weights.push_back(wt);
    }
  }
  const Index n = static_cast<Index>(cm.states.size());
  cm.P = DenseMatrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    PathChain chain(w, cm.states[static_cast<std::size_t>(s)]);
    for (int r = 0; r < p; ++r) {
      const std::vector<Index> c = chain.candidates(r);
      for (Index y : c) {
        if (y == chain.path()[static_cast<std::size_t>(r)]) continue;
        std::vector<Index> next = chain.path();
        next[static_cast<std::size_t>(r)] = y;
        const Index t = code[static_cast<std::size_t>(encode(next))];
        cm.P(s, t) += std::min(1.0, chain.ratio(r, y)) / (static_cast<double>(p) * static_cast<double>(c.size()));
      }
    }
    cm.P(s, s) = 1.0 - (cm.P.row(s).sum() - cm.P(s, s));
  }
  return cm;
}

MixStats metropolis_mix(const PerturbedSearchHam& ham, const PathSchedule& sched, std::uint64_t seed,
                        std::uint64_t max_steps, bool rejection_free) {
  const PathWeights w(ham, sched.eta, sched.p);
  const Index M = ham.dim();
  const Index x = ham.x;
  std::mt19937_64 rng(seed);
  const Index start = std::uniform_int_distribution<Index>(0, M - 1)(rng);

  MixStats st;
  st.M = M;
  st.beta = sched.beta;
  st.eta = sched.eta;
  st.p = sched.p;
  st.seed = seed;
  if (start == x) {
    st.hit = true;
    return st;
  }

  PathChain chain(w, std::vector<Index>(static_cast<std::size_t>(sched.p), start));
  const int p = sched.p;

  if (!rejection_free) {
    while (chain.steps() < max_steps) {
      const std::vector<Index> before = chain.path();
      if (!chain.step(rng)) continue;
      ++st.moves;
      for (int r = 0; r < p; ++r) {
        if (chain.path()[static_cast<std::size_t>(r)] != before[static_cast<std::size_t>(r)] &&
            chain.path()[static_cast<std::size_t>(r)] == x) {
          st.hit = true;
        }
      }
      if (st.hit) break;
    }
    st.hitting_time = chain.steps();
    st.oracle_calls = chain.oracle_calls();
    return st;
  }

  // Per-slice move probability: (1/|C|) Σ_{y ∈ C, y ≠ z(r)} min(1, ratio).
  auto slice_rate = [&](const PathChain& ch, int r) {
    const std::vector<Index> c = ch.candidates(r);
    double acc = 0.0;
    for (Index y : c)
      if (y != ch.path()[static_cast<std::size_t>(r)]) acc += std::min(1.0, ch.ratio(r, y));
    return acc / static_cast<double>(c.size());
  };
  RateTree tree(p);
  for (int r = 0; r < p; ++r) tree.set(r, slice_rate(chain, r));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uint64_t steps = 0;
  while (true) {
    const double move_prob = tree.total() / p;
    if (!(move_prob > 0.0)) break;
    std::geometric_distribution<std::uint64_t> rejections(std::min(1.0, move_prob));
    const std::uint64_t k = rejections(rng) + 1;
    if (k > max_steps - steps) {
      steps = max_steps;
      break;
    }
    steps += k;

    const int r = tree.find(unit(rng) * tree.total());
    const std::vector<Index> c = chain.candidates(r);
    std::vector<double> acc;
    std::vector<Index> ys;
    for (Index y : c) {
      if (y == chain.path()[static_cast<std::size_t>(r)]) continue;
      ys.push_back(y);
      acc.push_back(std::min(1.0, chain.ratio(r, y)));
    }
    const Index y = ys[std::discrete_distribution<std::size_t>(acc.begin(), acc.end())(rng)];
    chain.assign(r, y);
    ++st.moves;
    if (y == x) {
      st.hit = true;
      break;
    }
    for (int dr : {-1, 0, 1}) {
      const int s = (r + dr + p) % p;
      tree.set(s, slice_rate(chain, s));
    }
  }
  st.hitting_time = steps;
  st.oracle_calls = 4 * steps;
  return st;
}

}  // namespace gapamp

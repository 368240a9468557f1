#include "gapamp/searchlab.hpp"

#include "gapamp/spectra.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

namespace gapamp {

double search_weight(Index y, Index x, Index M, int d) {
  return y == x ? 1.0 / std::sqrt(static_cast<double>(d) * static_cast<double>(M - 1))
                : 1.0 / std::sqrt(static_cast<double>(d));
}

DenseVector search_ground_state(Index M, Index x) {
  DenseVector psi = DenseVector::Constant(M, 1.0 / std::sqrt(2.0 * static_cast<double>(M - 1)));
  psi(x) = 1.0 / std::sqrt(2.0);
  return psi;
}

namespace {

FFHamiltonian build_terms(const RegularGraph& g, const EdgeColoring& col, Index x, std::uint64_t& calls) {
  std::vector<std::vector<Triplet>> per(static_cast<std::size_t>(col.chi));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto [y, z] = g.edges[i];
    calls += 2;  // is y = x, is z = x
    const double cy = search_weight(y, x, g.M, g.d);
    const double cz = search_weight(z, x, g.M, g.d);
    const double n2 = cy * cy + cz * cz;
    auto& t = per[static_cast<std::size_t>(col.color[i])];
    t.emplace_back(y, y, cy * cy / n2);
    t.emplace_back(z, z, cz * cz / n2);
    t.emplace_back(y, z, -cy * cz / n2);
    t.emplace_back(z, y, -cy * cz / n2);
  }
  std::vector<ProjectorTerm> terms;
  for (auto& t : per) {
    ProjectorTerm p;
    p.matrix = SparseMatrix(g.M, g.M);
    p.matrix.setFromTriplets(t.begin(), t.end());
    terms.push_back(std::move(p));
  }
  return FFHamiltonian(std::move(terms));
}

}  // namespace

SearchInstance build_search_ff(const RegularGraph& graph, const EdgeColoring& coloring, Index x) {
  if (x < 0 || x >= graph.M) throw std::invalid_argument("build_search_ff: marked vertex out of range");
  if (!is_proper(graph.M, graph.edges, coloring)) throw std::invalid_argument("build_search_ff: improper coloring");
  std::uint64_t calls = 0;
  FFHamiltonian ham = build_terms(graph, coloring, x, calls);
  return SearchInstance{graph, coloring, x, std::move(ham), calls};
}

SparseSymOperator unnormalized_search_hamiltonian(const SearchInstance& inst) {
  const RegularGraph& g = inst.graph;
  std::vector<Triplet> t;
  for (const auto& [y, z] : g.edges) {
    const double cy = search_weight(y, inst.marked, g.M, g.d);
    const double cz = search_weight(z, inst.marked, g.M, g.d);
    t.emplace_back(y, y, cy * cy);
    t.emplace_back(z, z, cz * cz);
    t.emplace_back(y, z, -cy * cz);
    t.emplace_back(z, y, -cy * cz);
  }
  SparseMatrix h(g.M, g.M);
  h.setFromTriplets(t.begin(), t.end());
  return SparseSymOperator(std::move(h));
}

GapCertificate gap_certificate(const SearchInstance& inst) {
  GapCertificate c;
  c.M = inst.graph.M;
  c.d = inst.graph.d;
  c.lambda = inst.graph.lambda;
  c.chi = inst.coloring.chi;
  c.bound = 1.0 / (4.0 * static_cast<double>(c.M - 1));
  const SpectrumReport spec = eig_full(assemble(inst.ham));
  c.unique_ground_state = spec.null_dim == 1;
  c.gap = spec.null_dim >= 1 ? spectral_gap(spec, 0.0) : 0.0;
  c.pass = c.unique_ground_state && c.gap >= c.bound;
  return c;
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SearchStats measurement_search(const DenseVector& psi, Index x, std::uint64_t seed, std::uint64_t trials) {
  const Index M = psi.size();
  if (x < 0 || x >= M) throw std::invalid_argument("measurement_search: marked index out of range");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw std::invalid_argument("measurement_search: psi must be a unit vector");

  const DenseVector s = DenseVector::Constant(M, 1.0 / std::sqrt(static_cast<double>(M)));
  const double overlap = s.dot(psi);
  SearchStats st;
  st.M = M;
  st.trials = trials;
  st.p_x = psi(x) * psi(x);
  st.p_s = overlap * overlap;
  st.analytic = st.p_x * st.p_s;

  // Post-measurement state on the failed branch: (1 − |ψ><ψ|)|s>, normalized.
  DenseVector rest = s - overlap * psi;
  const double rest_norm2 = rest.squaredNorm();
  if (rest_norm2 > 0.0) rest /= std::sqrt(rest_norm2);
  st.exact_success = st.analytic + (rest_norm2 > 0.0 ? (1.0 - st.p_s) * rest(x) * rest(x) : 0.0);

  std::vector<double> w_psi(static_cast<std::size_t>(M)), w_rest(static_cast<std::size_t>(M));
  for (Index i = 0; i < M; ++i) {
    w_psi[static_cast<std::size_t>(i)] = psi(i) * psi(i);
    w_rest[static_cast<std::size_t>(i)] = rest(i) * rest(i);
  }
  std::discrete_distribution<Index> from_psi(w_psi.begin(), w_psi.end());
  std::discrete_distribution<Index> from_rest(w_rest.begin(), w_rest.end());
  std::bernoulli_distribution projected(st.p_s);
  std::mt19937_64 rng(seed);

  for (std::uint64_t t = 0; t < trials; ++t) {
    const Index y = projected(rng) || rest_norm2 == 0.0 ? from_psi(rng) : from_rest(rng);
    if (y == x) ++st.successes;
  }
  st.rate = trials ? static_cast<double>(st.successes) / static_cast<double>(trials) : 0.0;
  std::tie(st.p_lower, st.p_upper) = wilson_interval(st.successes, trials, 3.0);
  st.pass = st.analytic <= st.p_upper;
  return st;
}

DenseVector unique_ground_state(const SparseSymOperator& op, double degeneracy_tol) {
  EigOptions opts;
  opts.vectors = true;
  const SpectrumReport spec = eig_full(op, opts);
  if (spec.size() > 1 && spec.eigenvalues[1] - spec.eigenvalues[0] <= degeneracy_tol) {
    throw std::invalid_argument("ground state is degenerate");
  }
  DenseVector v = spec.eigenvectors->col(0);
  if (v.sum() < 0) v = -v;
  return v;
}

SearchStats measurement_search(const SearchInstance& inst, std::uint64_t seed, std::uint64_t trials) {
  return measurement_search(unique_ground_state(assemble(inst.ham)), inst.marked, seed, trials);
}

}  // namespace gapamp

#include "gapamp/graph.hpp"

#include "gapamp/spectra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

namespace gapamp {

namespace {

constexpr double kLambdaSlack = 1e-9;

SparseMatrix adjacency_from(Index M, const std::vector<Edge>& edges) {
  std::vector<Triplet> t;
  t.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) {
    t.emplace_back(u, v, 1.0);
    t.emplace_back(v, u, 1.0);
  }
  SparseMatrix a(M, M);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

std::vector<Edge> normalized(std::vector<Edge> edges) {
  for (auto& e : edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Spectrum of a Z_2^k Cayley graph from its characters, descending.
std::vector<double> cayley_spectrum(int k, const std::vector<std::uint32_t>& gens) {
  std::vector<double> ev(std::size_t{1} << k);
  for (std::uint32_t chi = 0; chi < ev.size(); ++chi) {
    int s = 0;
    for (auto g : gens) s += (std::popcount(chi & g) % 2 == 0) ? 1 : -1;
    ev[chi] = s;
  }
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

std::optional<RegularGraph> try_cayley(Index M, int d, double lambda_max, std::mt19937_64& rng, int tries) {
  if (M < 2 || (M & (M - 1)) != 0) return std::nullopt;
  const int k = std::countr_zero(static_cast<std::uint64_t>(M));
  if (k >= d || k > 20) return std::nullopt;
  const std::uint32_t top = std::uint32_t{1} << k;
  if (static_cast<std::uint32_t>(d - k) > top - 1 - static_cast<std::uint32_t>(k)) return std::nullopt;

  std::vector<std::uint32_t> best;
  double best_l2 = 2.0 * d;
  std::uniform_int_distribution<std::uint32_t> pick(1, top - 1);
  for (int t = 0; t < tries; ++t) {
    std::vector<std::uint32_t> gens;
    for (int i = 0; i < k; ++i) gens.push_back(std::uint32_t{1} << i);
    while (static_cast<int>(gens.size()) < d) {
      const std::uint32_t g = pick(rng);
      if (std::find(gens.begin(), gens.end(), g) == gens.end()) gens.push_back(g);
    }
    const double l2 = cayley_spectrum(k, gens)[1];
    if (l2 < best_l2) {
      best_l2 = l2;
      best = gens;
    }
  }
  if (best.empty() || best_l2 / d > lambda_max + kLambdaSlack) return std::nullopt;
  return cayley_z2_graph(k, best);
}

std::optional<RegularGraph> try_lift(const RegularGraph& base, double lambda_max, std::mt19937_64& rng,
                                     int iterations) {
  const Index n = base.M;
  const std::size_t E = base.edges.size();
  const double target = lambda_max * base.d + kLambdaSlack * base.d;
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<int> s(E);
  for (auto& x : s) x = coin(rng) ? 1 : -1;
  std::vector<int> best_s = s;
  double best_top = std::numeric_limits<double>::infinity();
  EigOptions opts;
  opts.vectors = true;
  opts.null_tol = 1e-12;

  for (int it = 0; it < iterations; ++it) {
    DenseMatrix a = DenseMatrix::Zero(n, n);
    for (std::size_t e = 0; e < E; ++e) {
      a(base.edges[e].first, base.edges[e].second) = s[e];
      a(base.edges[e].second, base.edges[e].first) = s[e];
    }
    const SpectrumReport spec = eig_full(a, opts);
    const double top = spec.max();
    if (top < best_top) {
      best_top = top;
      best_s = s;
    }
    if (best_top <= target) break;

    // Soft-max over the top of the spectrum; flipping edge e moves the
    // weighted top eigenvalues by about -4 s_e v_a v_b.
    const DenseMatrix& v = *spec.eigenvectors;
    std::vector<double> w;
    std::vector<Index> cols;
    for (Index j = n - 1; j >= 0; --j) {
      const double p = std::exp(4.0 * (spec.eigenvalues[static_cast<std::size_t>(j)] - top));
      if (p < 1e-8) break;
      w.push_back(p);
      cols.push_back(j);
    }
    std::vector<std::pair<double, std::size_t>> score(E);
    for (std::size_t e = 0; e < E; ++e) {
      double g = 0.0;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        g += w[c] * v(base.edges[e].first, cols[c]) * v(base.edges[e].second, cols[c]);
      }
      score[e] = {-g * s[e], e};
    }
    std::partial_sort(score.begin(), score.begin() + std::min<std::size_t>(5, E), score.end());
    std::size_t choice = 0;
    if (unit(rng) >= 0.7) choice = std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(5, E) - 1)(rng);
    s[score[choice].second] *= -1;
  }
  if (best_top > target) return std::nullopt;
  return two_lift(base, best_s);
}

}  // namespace

bool is_connected(Index M, const std::vector<Edge>& edges) {
  if (M == 0) return true;
  std::vector<Index> parent(static_cast<std::size_t>(M));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  Index comps = M;
  for (const auto& [u, v] : edges) {
    const Index a = find(u), b = find(v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --comps;
    }
  }
  return comps == 1;
}

double second_eigenvalue(const SparseMatrix& adjacency, int d) {
  if (adjacency.rows() < 2) throw std::invalid_argument("second_eigenvalue: need at least two vertices");
  const SpectrumReport spec = eig_full(SparseSymOperator(adjacency, 0.0));
  return spec.eigenvalues[spec.eigenvalues.size() - 2] / d;
}

RegularGraph make_regular_graph(Index M, std::vector<Edge> edges, std::string source) {
  edges = normalized(std::move(edges));
  if (M < 2) throw std::invalid_argument("graph needs at least two vertices");
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("graph has a repeated edge");
  }
  std::vector<int> deg(static_cast<std::size_t>(M), 0);
  for (const auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("graph has a self-loop");
    if (u < 0 || v >= M) throw std::invalid_argument("edge endpoint out of range");
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  const int d = deg.front();
  if (std::any_of(deg.begin(), deg.end(), [d](int x) { return x != d; })) {
    throw std::invalid_argument("graph is not regular");
  }
  if (!is_connected(M, edges)) throw std::invalid_argument("graph is not connected");
  RegularGraph g;
  g.M = M;
  g.d = d;
  g.adjacency = adjacency_from(M, edges);
  g.edges = std::move(edges);
  g.lambda = second_eigenvalue(g.adjacency, d);
  g.source = std::move(source);
  return g;
}

RegularGraph complete_graph(Index M) {
  std::vector<Edge> e;
  for (Index u = 0; u < M; ++u)
    for (Index v = u + 1; v < M; ++v) e.emplace_back(u, v);
  return make_regular_graph(M, std::move(e), "complete");
}

RegularGraph cayley_z2_graph(int k, const std::vector<std::uint32_t>& generators) {
  if (k < 1 || k > 20) throw std::invalid_argument("cayley_z2_graph: k out of range");
  const std::uint32_t top = std::uint32_t{1} << k;
  std::vector<std::uint32_t> g = generators;
  std::sort(g.begin(), g.end());
  if (std::adjacent_find(g.begin(), g.end()) != g.end()) throw std::invalid_argument("cayley_z2_graph: repeated generator");
  for (auto x : g)
    if (x == 0 || x >= top) throw std::invalid_argument("cayley_z2_graph: bad generator");
  std::vector<Edge> e;
  for (std::uint32_t y = 0; y < top; ++y)
    for (auto x : g)
      if (y < (y ^ x)) e.emplace_back(y, y ^ x);
  return make_regular_graph(top, std::move(e), "cayley-z2");
}

RegularGraph two_lift(const RegularGraph& base, const std::vector<int>& signs) {
  if (signs.size() != base.edges.size()) throw std::invalid_argument("two_lift: one sign per edge");
  const Index n = base.M;
  std::vector<Edge> e;
  e.reserve(2 * signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const auto [u, v] = base.edges[i];
    if (signs[i] > 0) {
      e.emplace_back(u, v);
      e.emplace_back(u + n, v + n);
    } else {
      e.emplace_back(u, v + n);
      e.emplace_back(v, u + n);
    }
  }
  return make_regular_graph(2 * n, std::move(e), "lift");
}

std::vector<Edge> random_regular_edges(Index M, int d, std::uint64_t seed) {
  if (d < 1 || d >= M || (M * d) % 2 != 0) throw std::invalid_argument("random_regular_edges: bad (M, d)");
  std::mt19937_64 rng(seed);
  for (;;) {
    std::vector<Index> stubs;
    stubs.reserve(static_cast<std::size_t>(M * d));
    for (Index v = 0; v < M; ++v)
      for (int i = 0; i < d; ++i) stubs.push_back(v);
    std::vector<std::vector<Index>> nbr(static_cast<std::size_t>(M));
    auto linked = [&](Index u, Index v) {
      const auto& a = nbr[static_cast<std::size_t>(u)];
      return std::find(a.begin(), a.end(), v) != a.end();
    };
    std::vector<Edge> edges;
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
      bool placed = false;
      for (std::size_t attempt = 0; attempt < 50 * stubs.size() && !placed; ++attempt) {
        std::size_t i = pick(rng), j = pick(rng);
        const Index u = stubs[i], v = stubs[j];
        if (i == j || u == v || linked(u, v)) continue;
        nbr[static_cast<std::size_t>(u)].push_back(v);
        nbr[static_cast<std::size_t>(v)].push_back(u);
        edges.emplace_back(std::min(u, v), std::max(u, v));
        if (i < j) std::swap(i, j);
        stubs[i] = stubs.back();
        stubs.pop_back();
        stubs[j] = stubs.back();
        stubs.pop_back();
        placed = true;
      }
      stuck = !placed;
    }
    if (!stuck) return normalized(std::move(edges));
  }
}

RegularGraph random_regular_expander(Index M, int d, double lambda_max, std::uint64_t seed,
                                     const ExpanderOptions& opts) {
  if (d < 1 || d >= M || (M * d) % 2 != 0) {
    throw std::invalid_argument("random_regular_expander: need 1 <= d < M and M·d even");
  }
  if (!(lambda_max > 0.0 && lambda_max < 1.0)) throw std::invalid_argument("lambda_max must lie in (0, 1)");
  if (d == M - 1) {
    RegularGraph g = complete_graph(M);
    if (g.lambda <= lambda_max + kLambdaSlack) return g;
    throw ExpanderNotFound("complete graph exceeds lambda_max", g.lambda);
  }

  double best = 1.0;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < opts.retry_cap; ++t) {
    std::vector<Edge> e = random_regular_edges(M, d, rng());
    if (!is_connected(M, e)) continue;
    RegularGraph g = make_regular_graph(M, std::move(e), "pairing");
    if (g.lambda <= lambda_max + kLambdaSlack) return g;
    best = std::min(best, g.lambda);
  }
  if (opts.allow_structured) {
    if (auto g = try_cayley(M, d, lambda_max, rng, 20 * opts.retry_cap)) return *g;
    if (M % 2 == 0 && M / 2 > d) {
      try {
        const RegularGraph base = random_regular_expander(M / 2, d, lambda_max, rng(), opts);
        for (int attempt = 0; attempt < 3; ++attempt) {
          if (auto g = try_lift(base, lambda_max, rng, opts.lift_iterations)) return *g;
        }
      } catch (const ExpanderNotFound&) {
      }
    }
  }
  throw ExpanderNotFound("no d-regular graph with lambda <= " + std::to_string(lambda_max) + " for M = " +
                             std::to_string(M) + "; best lambda " + std::to_string(best),
                         best);
}

std::string to_edge_list(const RegularGraph& g) {
  std::ostringstream os;
  os << g.M << ' ' << g.d << '\n';
  for (const auto& [u, v] : g.edges) os << u << ' ' << v << '\n';
  return os.str();
}

RegularGraph from_edge_list(const std::string& text) {
  std::istringstream is(text);
  Index M = 0;
  int d = 0;
  if (!(is >> M >> d)) throw std::invalid_argument("edge list: missing header");
  std::vector<Edge> e;
  Index u = 0, v = 0;
  while (is >> u >> v) e.emplace_back(u, v);
  RegularGraph g = make_regular_graph(M, std::move(e), "file");
  if (g.d != d) throw std::invalid_argument("edge list: degree does not match header");
  return g;
}

}  // namespace gapamp

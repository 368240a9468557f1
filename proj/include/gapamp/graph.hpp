#pragma once

#include "gapamp/operator.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gapamp {

using Edge = std::pair<Index, Index>;  // always first < second

/// Simple undirected d-regular graph. `lambda` is the second-largest
/// eigenvalue of A/d (signed, not in absolute value).
struct RegularGraph {
  Index M = 0;
  int d = 0;
  std::vector<Edge> edges;  // sorted
  SparseMatrix adjacency;
  double lambda = 0.0;
  std::string source;  // "pairing", "complete", "cayley-z2", "lift"
};

/// Validates the edge list (simple, d-regular, connected) and measures λ.
/// Throws std::invalid_argument when any of those fail.
RegularGraph make_regular_graph(Index M, std::vector<Edge> edges, std::string source);

bool is_connected(Index M, const std::vector<Edge>& edges);

/// Second-largest eigenvalue of A/d.
double second_eigenvalue(const SparseMatrix& adjacency, int d);

RegularGraph complete_graph(Index M);

/// Cayley graph of Z_2^k: y ~ y xor g for every generator g. Generators must
/// be distinct, nonzero and span Z_2^k.
RegularGraph cayley_z2_graph(int k, const std::vector<std::uint32_t>& generators);

/// 2-lift by a ±1 edge signing: vertex v becomes (v, 0) and (v, 1) = v and v + M.
/// A positive edge keeps the two layers apart, a negative one crosses them.
/// The spectrum of the lift is that of the base graph plus that of the signed adjacency.
RegularGraph two_lift(const RegularGraph& base, const std::vector<int>& signs);

class ExpanderNotFound : public std::runtime_error {
 public:
  ExpanderNotFound(const std::string& what, double best) : std::runtime_error(what), best_lambda(best) {}
  double best_lambda;
};

struct ExpanderOptions {
  int retry_cap = 50;
  int lift_iterations = 4000;
  bool allow_structured = true;  // Cayley and lift fallbacks after the pairing model
};

/// Random simple connected d-regular graph with λ <= lambda_max.
///
/// Sources are tried in order: the pairing model with rejection on λ
/// (retry_cap draws); for M = 2^k with k < d a Cayley graph of Z_2^k with the
/// unit vectors plus random extra generators; for even M a 2-lift of a
/// recursively built expander on M/2 vertices with a signing found by greedy
/// descent on the largest signed eigenvalue. Throws ExpanderNotFound with the
/// best λ seen, and std::invalid_argument on M·d odd, d < 1 or d >= M.
RegularGraph random_regular_expander(Index M, int d, double lambda_max, std::uint64_t seed,
                                     const ExpanderOptions& opts = {});

/// Uniformly paired random d-regular simple graph (may be disconnected).
std::vector<Edge> random_regular_edges(Index M, int d, std::uint64_t seed);

/// Edge list text: first line "M d", then one "u v" per line.
std::string to_edge_list(const RegularGraph& g);
RegularGraph from_edge_list(const std::string& text);

}  // namespace gapamp

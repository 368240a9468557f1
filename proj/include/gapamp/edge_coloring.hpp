#pragma once

#include "gapamp/graph.hpp"

#include <vector>

namespace gapamp {

/// color[i] is the color (0-based) of edges[i]; chi counts the colors used.
struct EdgeColoring {
  std::vector<int> color;
  int chi = 0;
};

/// Misra–Gries: a proper coloring with at most Δ+1 colors, Δ the max degree.
/// Edges are processed in the given order, so the result is deterministic.
EdgeColoring misra_gries_coloring(Index M, const std::vector<Edge>& edges);
EdgeColoring edge_coloring(const RegularGraph& g);

/// True when no two edges sharing a vertex have the same color.
bool is_proper(Index M, const std::vector<Edge>& edges, const EdgeColoring& c);

}  // namespace gapamp

#include "gapamp/edge_coloring.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace gapamp {

namespace {

// at[v][c] = the neighbor joined to v by the edge of color c, or -1.
class Palette {
 public:
  Palette(Index M, int colors)
      : colors_(colors), at_(static_cast<std::size_t>(M), std::vector<Index>(static_cast<std::size_t>(colors), -1)) {}

  Index at(Index v, int c) const { return at_[idx(v)][static_cast<std::size_t>(c)]; }
  bool is_free(Index v, int c) const { return at(v, c) < 0; }

  int free_color(Index v) const {
    for (int c = 0; c < colors_; ++c)
      if (is_free(v, c)) return c;
    throw std::logic_error("misra_gries: no free color");
  }

  int color_of(Index u, Index v) const {
    for (int c = 0; c < colors_; ++c)
      if (at(u, c) == v) return c;
    return -1;
  }

  void set(Index u, Index v, int c) {
    at_[idx(u)][static_cast<std::size_t>(c)] = v;
    at_[idx(v)][static_cast<std::size_t>(c)] = u;
  }

  void clear(Index u, Index v) {
    const int c = color_of(u, v);
    if (c < 0) return;
    at_[idx(u)][static_cast<std::size_t>(c)] = -1;
    at_[idx(v)][static_cast<std::size_t>(c)] = -1;
  }

 private:
  static std::size_t idx(Index v) { return static_cast<std::size_t>(v); }
  int colors_;
  std::vector<std::vector<Index>> at_;
};

}  // namespace

EdgeColoring misra_gries_coloring(Index M, const std::vector<Edge>& edges) {
  std::vector<std::vector<Index>> nbr(static_cast<std::size_t>(M));
  for (const auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("edge_coloring: self-loop");
    nbr[static_cast<std::size_t>(u)].push_back(v);
    nbr[static_cast<std::size_t>(v)].push_back(u);
  }
  int max_deg = 0;
  for (const auto& n : nbr) max_deg = std::max<int>(max_deg, static_cast<int>(n.size()));
  const int colors = max_deg + 1;
  Palette pal(M, colors);

  for (const auto& [u, v0] : edges) {
    // Maximal fan of u starting at v0.
    std::vector<Index> fan{v0};
    for (bool grown = true; grown;) {
      grown = false;
      for (Index w : nbr[static_cast<std::size_t>(u)]) {
        const int cw = pal.color_of(u, w);
        if (cw < 0 || std::find(fan.begin(), fan.end(), w) != fan.end()) continue;
        if (pal.is_free(fan.back(), cw)) {
          fan.push_back(w);
          grown = true;
          break;
        }
      }
    }
    const int c = pal.free_color(u);
    const int d = pal.free_color(fan.back());

    // Invert the cd-path through u (it starts with the d-colored edge at u).
    if (c != d) {
      std::vector<Index> path{u};
      int want = d;
      for (Index x = u;;) {
        const Index y = pal.at(x, want);
        if (y < 0) break;
        path.push_back(y);
        x = y;
        want = (want == d) ? c : d;
      }
      std::vector<int> old;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) old.push_back(pal.color_of(path[i], path[i + 1]));
      for (std::size_t i = 0; i + 1 < path.size(); ++i) pal.clear(path[i], path[i + 1]);
      for (std::size_t i = 0; i + 1 < path.size(); ++i) pal.set(path[i], path[i + 1], old[i] == c ? d : c);
    }

    // First w such that fan[0..w] is still a fan and d is free on fan[w].
    std::size_t w = 0;
    for (;; ++w) {
      if (w == fan.size()) throw std::logic_error("misra_gries: no rotatable fan prefix");
      if (w > 0 && !pal.is_free(fan[w - 1], pal.color_of(u, fan[w]))) {
        throw std::logic_error("misra_gries: fan broken by path inversion");
      }
      if (pal.is_free(fan[w], d)) break;
    }
    for (std::size_t i = 0; i < w; ++i) {
      const int next = pal.color_of(u, fan[i + 1]);
      pal.clear(u, fan[i + 1]);
      pal.clear(u, fan[i]);
      pal.set(u, fan[i], next);
    }
    pal.clear(u, fan[w]);
    pal.set(u, fan[w], d);
  }

  EdgeColoring out;
  out.color.reserve(edges.size());
  std::vector<bool> used(static_cast<std::size_t>(colors), false);
  for (const auto& [u, v] : edges) {
    const int c = pal.color_of(u, v);
    out.color.push_back(c);
    used[static_cast<std::size_t>(c)] = true;
  }
  // Compact to 0..chi-1.
  std::vector<int> remap(static_cast<std::size_t>(colors), -1);
  for (int c = 0; c < colors; ++c)
    if (used[static_cast<std::size_t>(c)]) remap[static_cast<std::size_t>(c)] = out.chi++;
  for (auto& c : out.color) c = remap[static_cast<std::size_t>(c)];
  return out;
}

EdgeColoring edge_coloring(const RegularGraph& g) { return misra_gries_coloring(g.M, g.edges); }

bool is_proper(Index M, const std::vector<Edge>& edges, const EdgeColoring& c) {
  if (c.color.size() != edges.size()) return false;
  std::map<std::pair<Index, int>, int> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const int col = c.color[i];
    if (col < 0 || col >= c.chi) return false;
    for (Index v : {edges[i].first, edges[i].second}) {
      if (v < 0 || v >= M) return false;
      if (++seen[{v, col}] > 1) return false;
    }
  }
  return true;
}

}  // namespace gapamp

#pragma once

#include "gapamp/operator.hpp"

#include <vector>

namespace gapamp {

/// Adjacency of the periodic hypercubic lattice with `side`^`dims` sites.
/// For side = 2 the two neighbors along an axis coincide and appear once.
SparseSymOperator torus_adjacency(int side, int dims = 5);

struct LatticePoint {
  Index M = 0;
  double c = 0.0;
  double gap = 0.0;   // E_1 − E_0
  double e0 = 0.0;
  double p_x = 0.0;   // |<x|ψ_0>|²
  double p_s = 0.0;   // |<s|ψ_0>|²
};

/// H_x = −|x><x| − c A. Dense diagonalization up to the dense cap, Lanczos above.
LatticePoint lattice_point(const SparseSymOperator& adjacency, Index x, double c);

struct LatticeScan {
  std::vector<LatticePoint> grid;
  LatticePoint best;          // at the refined c*
  bool interior_minimum = false;
};

/// Gap over an even grid on (0, c_max], then golden-section refinement of the
/// smallest grid point's bracket to `tol`.
LatticeScan lattice_scan(const SparseSymOperator& adjacency, Index x, int grid_points = 40, double c_max = 2.0,
                         double tol = 1e-3);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gapamp

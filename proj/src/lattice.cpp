#include "gapamp/lattice.hpp"

#include "gapamp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gapamp {

SparseSymOperator torus_adjacency(int side, int dims) {
  if (side < 2 || dims < 1) throw std::invalid_argument("torus_adjacency: need side >= 2 and dims >= 1");
  Index M = 1;
  for (int i = 0; i < dims; ++i) M *= side;
  std::vector<Triplet> t;
  std::vector<int> coord(static_cast<std::size_t>(dims));
  for (Index site = 0; site < M; ++site) {
    Index rem = site;
    for (int k = 0; k < dims; ++k) {
      coord[static_cast<std::size_t>(k)] = static_cast<int>(rem % side);
      rem /= side;
    }
    std::set<Index> nbrs;
    Index stride = 1;
    for (int k = 0; k < dims; ++k) {
      const int ck = coord[static_cast<std::size_t>(k)];
      for (int step : {1, side - 1}) {
        const int nk = (ck + step) % side;
        nbrs.insert(site + (nk - ck) * stride);
      }
      stride *= side;
    }
    for (Index n : nbrs) t.emplace_back(site, n, 1.0);
  }
  SparseMatrix a(M, M);
  a.setFromTriplets(t.begin(), t.end());
  return SparseSymOperator(std::move(a), 0.0);
}

LatticePoint lattice_point(const SparseSymOperator& adjacency, Index x, double c) {
  const Index M = adjacency.dim();
  if (x < 0 || x >= M) throw std::invalid_argument("lattice_point: marked site out of range");
  SparseMatrix h = -c * adjacency.matrix();
  h.coeffRef(x, x) -= 1.0;
  const SparseSymOperator op(std::move(h), 0.0);

  LatticePoint p;
  p.M = M;
  p.c = c;
  DenseVector g;
  if (M <= kDefaultDenseCap) {
    EigOptions opts;
    opts.vectors = true;
    const SpectrumReport spec = eig_full(op, opts);
    p.e0 = spec.eigenvalues[0];
    p.gap = spec.eigenvalues[1] - spec.eigenvalues[0];
    g = spec.eigenvectors->col(0);
  } else {
    const LanczosResult r = lanczos_lowest(op, 2);
    if (!r.converged) throw std::runtime_error("lattice_point: Lanczos did not converge");
    p.e0 = r.values[0];
    p.gap = r.values[1] - r.values[0];
    g = r.vectors.col(0);
  }
  p.p_x = g(x) * g(x);
  const double s = g.sum() / std::sqrt(static_cast<double>(M));
  p.p_s = s * s;
  return p;
}

LatticeScan lattice_scan(const SparseSymOperator& adjacency, Index x, int grid_points, double c_max, double tol) {
  if (grid_points < 3 || !(c_max > 0.0) || !(tol > 0.0)) throw std::invalid_argument("lattice_scan: bad parameters");
  LatticeScan scan;
  const double h = c_max / grid_points;
  for (int i = 1; i <= grid_points; ++i) scan.grid.push_back(lattice_point(adjacency, x, i * h));
  const auto it = std::min_element(scan.grid.begin(), scan.grid.end(),
                                   [](const LatticePoint& a, const LatticePoint& b) { return a.gap < b.gap; });
  const std::size_t k = static_cast<std::size_t>(it - scan.grid.begin());
  scan.interior_minimum = k > 0 && k + 1 < scan.grid.size();

  double lo = k == 0 ? 0.0 : scan.grid[k - 1].c;
  double hi = k + 1 < scan.grid.size() ? scan.grid[k + 1].c : c_max;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  LatticePoint pa = lattice_point(adjacency, x, a), pb = lattice_point(adjacency, x, b);
  while (hi - lo > tol) {
    if (pa.gap < pb.gap) {
      hi = b;
      b = a;
      pb = pa;
      a = hi - phi * (hi - lo);
      pa = lattice_point(adjacency, x, a);
    } else {
      lo = a;
      a = b;
      pa = pb;
      b = lo + phi * (hi - lo);
      pb = lattice_point(adjacency, x, b);
    }
  }
  scan.best = pa.gap < pb.gap ? pa : pb;
  if (it->gap < scan.best.gap) scan.best = *it;
  return scan;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace gapamp

#include "gapamp/spectra.hpp"

#include <algorithm>
#include <random>

namespace gapamp {

LanczosResult lanczos_lowest(const SparseSymOperator& op, int k, const LanczosOptions& opts) {
  const Index n = op.dim();
  if (k < 1 || k > n) throw std::invalid_argument("lanczos_lowest: k out of range");
  const int max_it = static_cast<int>(std::min<Index>(opts.max_iterations, n));

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  DenseMatrix basis(n, max_it + 1);
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
  basis.col(0) = v.normalized();

  std::vector<double> alpha, beta;
  LanczosResult res;
  std::vector<double> previous;
  for (int it = 0; it < max_it; ++it) {
    DenseVector w = op.matrix() * basis.col(it);
    const double a = basis.col(it).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(it);
    if (it > 0) w -= beta.back() * basis.col(it - 1);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(it + 1);
      w -= q * (q.transpose() * w);
    }
    const double b = w.norm();
    const int m = it + 1;

    DenseMatrix t = DenseMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(t);
    res.iterations = m;

    const bool exhausted = b < 1e-12 * std::max(1.0, std::abs(a));
    if (m >= k) {
      // Residual of Ritz pair i is |b * last component of its eigenvector|.
      bool done = true;
      for (int i = 0; i < k; ++i) {
        if (std::abs(b * es.eigenvectors()(m - 1, i)) > opts.tolerance * std::max(1.0, std::abs(es.eigenvalues()(i)))) {
          done = false;
        }
      }
      if (done || exhausted || it + 1 == max_it) {
        const int kk = std::min(k, m);
        res.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + kk);
        res.vectors = basis.leftCols(m) * es.eigenvectors().leftCols(kk);
        res.converged = done || exhausted;
        return res;
      }
    }
    if (exhausted) {
      // Invariant subspace smaller than k: restart direction orthogonal to the basis.
      for (Index i = 0; i < n; ++i) w(i) = gauss(rng);
      const auto q = basis.leftCols(it + 1);
      w -= q * (q.transpose() * w);
      beta.push_back(0.0);
      basis.col(it + 1) = w.normalized();
      continue;
    }
    beta.push_back(b);
    basis.col(it + 1) = w / b;
  }
  return res;
}

}  // namespace gapamp

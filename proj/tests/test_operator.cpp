#include "doctest.h"
#include "oracles.hpp"

#include "gapamp/operator.hpp"

#include <random>

using namespace gapamp;

namespace {

SparseMatrix random_sparse(Index r, Index c, double fill, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  DenseMatrix m = DenseMatrix::Zero(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j)
      if (coin(rng) < fill) m(i, j) = u(rng);
  return m.sparseView();
}

}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("kron matches the dense block formula") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const SparseMatrix a = random_sparse(3 + trial, 2 + trial, 0.5, rng);
      const SparseMatrix b = random_sparse(4, 3, 0.4, rng);
      const DenseMatrix expect = oracle::kron(DenseMatrix(a), DenseMatrix(b));
      CHECK(max_abs(DenseMatrix(DenseMatrix(kron(a, b)) - expect)) == 0.0);
    }
  }

  TEST_CASE("symmetric operator construction") {
    DenseMatrix m(2, 2);
    m << 1.0, 2.0, 2.0 + 1e-14, 3.0;
    const SparseSymOperator op = SparseSymOperator::from_dense(m);
    CHECK(op.matrix().coeff(0, 1) == op.matrix().coeff(1, 0));
    m(1, 0) = 2.5;
    CHECK_THROWS_AS(SparseSymOperator::from_dense(m), std::invalid_argument);
    CHECK_THROWS_AS(SparseSymOperator(SparseMatrix(2, 3)), std::invalid_argument);

    const SparseSymOperator id = SparseSymOperator::identity(4);
    CHECK(max_abs(DenseMatrix((id * 2.0 - id).dense() - DenseMatrix::Identity(4, 4))) == 0.0);
    CHECK(SparseSymOperator::zero(3).nonzeros() == 0);
    CHECK_THROWS(id + SparseSymOperator::identity(3));
  }

  TEST_CASE("spectral norm of known matrices") {
    DenseMatrix d = DenseMatrix::Zero(3, 3);
    d.diagonal() << 0.5, -2.0, 1.0;
    CHECK(spectral_norm(d) == doctest::Approx(2.0).epsilon(1e-14));
    const double th = 0.3;
    DenseMatrix rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    CHECK(spectral_norm(rot) == doctest::Approx(1.0).epsilon(1e-14));
    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    z(0, 1) = Complex(0.0, 3.0);
    CHECK(spectral_norm(z) == doctest::Approx(3.0).epsilon(1e-14));
  }

  TEST_CASE("outer product") {
    DenseVector u(2), v(3);
    u << 1, 2;
    v << 3, 0, -1;
    const DenseMatrix o = DenseMatrix(outer(u, v));
    CHECK(o(1, 0) == 6.0);
    CHECK(o(0, 2) == -1.0);
    CHECK(o(1, 1) == 0.0);
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tqkd/linalg.hpp"
#include "tqkd/mub.hpp"

namespace {

using namespace tqkd;
using tqkd::testing::random_hermitian;
using tqkd::testing::random_matrix;
using tqkd::testing::random_vector;

TEST(TensorProduct, BasisVectors) {
  const CVector e0{1.0, 0.0};
  const CVector e1{0.0, 1.0};
  EXPECT_EQ(tensor_product(e0, e1), (CVector{0.0, 1.0, 0.0, 0.0}));
}

TEST(TensorProduct, IdentityTimesIdentity) {
  EXPECT_EQ(max_abs_diff(tensor_product(CMatrix::identity(2), CMatrix::identity(3)), CMatrix::identity(6)), 0.0);
}

TEST(TensorProduct, SuperpositionTimesBasis) {
  const double s = 1.0 / std::sqrt(2.0);
  const auto v = tensor_product(CVector{s, s}, CVector{1.0, 0.0});
  EXPECT_LT(max_abs_diff(v, CVector{s, 0.0, s, 0.0}), 1e-15);
}

TEST(TensorProduct, Associative) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_matrix(2, 3, rng);
    const auto b = random_matrix(3, 2, rng);
    const auto c = random_matrix(2, 2, rng);
    EXPECT_LT(max_abs_diff(tensor_product(tensor_product(a, b), c), tensor_product(a, tensor_product(b, c))), 1e-12);
    const auto u = random_vector(2, rng), v = random_vector(3, rng), w = random_vector(4, rng);
    EXPECT_LT(max_abs_diff(tensor_product(tensor_product(u, v), w), tensor_product(u, tensor_product(v, w))), 1e-12);
  }
}

TEST(PartialTrace, ProductState) {
  std::mt19937_64 rng(3);
  const auto ra = tqkd::testing::random_state(2, rng);
  const auto rb = random_hermitian(3, rng);
  const auto reduced = partial_trace(tensor_product(ra, rb), {2, 3}, {0});
  EXPECT_LT(max_abs_diff(reduced, ra * trace(rb)), 1e-12);
  const auto other = partial_trace(tensor_product(ra, rb), {2, 3}, {1});
  EXPECT_LT(max_abs_diff(other, rb * trace(ra)), 1e-12);
}

TEST(PartialTrace, MaximallyEntangledQubits) {
  const auto f = build_basis_family(2);
  const auto psi = entangled_state(f).psi;
  const auto reduced = partial_trace(projector(psi), {2, 2}, {0});
  EXPECT_LT(max_abs_diff(reduced, CMatrix::identity(2) * complex(0.5)), 1e-15);
}

TEST(PartialTrace, PreservesTrace) {
  std::mt19937_64 rng(5);
  const std::vector<std::size_t> dims{3, 3, 10};
  const std::vector<std::vector<std::size_t>> keeps{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}, {}};
  for (int trial = 0; trial < 3; ++trial) {
    const auto m = random_hermitian(90, rng);
    for (const auto& keep : keeps) {
      const auto r = partial_trace(m, std::span<const std::size_t>(dims), std::span<const std::size_t>(keep));
      EXPECT_LT(std::abs(trace(r) - trace(m)), 1e-12 * 90);
    }
  }
}

TEST(PartialTrace, PureStateOverloadMatchesProjector) {
  std::mt19937_64 rng(9);
  const std::vector<std::size_t> dims{2, 3, 4};
  const auto v = random_vector(24, rng);
  for (const auto& keep : std::vector<std::vector<std::size_t>>{{0}, {1, 2}, {0, 2}}) {
    const auto a = partial_trace(v, std::span<const std::size_t>(dims), std::span<const std::size_t>(keep));
    const auto b = partial_trace(projector(v), std::span<const std::size_t>(dims), std::span<const std::size_t>(keep));
    EXPECT_LT(max_abs_diff(a, b), 1e-12);
  }
}

TEST(PartialTrace, DimensionMismatch) {
  EXPECT_THROW(partial_trace(CMatrix::identity(5), {2, 3}, {0}), dimension_mismatch);
  EXPECT_THROW(partial_trace(CMatrix::identity(6), {2, 3}, {2}), dimension_mismatch);
}

TEST(HermitianEigen, Diagonal) {
  CMatrix m(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  const auto e = hermitian_eigen(m);
  EXPECT_EQ(e.values, (RVector{3.0, 2.0, 1.0}));
}

TEST(HermitianEigen, PauliX) {
  const CMatrix x(2, 2, {0.0, 1.0, 1.0, 0.0});
  const auto e = hermitian_eigen(x);
  EXPECT_NEAR(e.values[0], 1.0, 1e-15);
  EXPECT_NEAR(e.values[1], -1.0, 1e-15);
}

TEST(HermitianEigen, PauliYHasComplexEigenvectors) {
  const CMatrix y(2, 2, {0.0, complex(0, -1), complex(0, 1), 0.0});
  const auto e = hermitian_eigen(y);
  EXPECT_NEAR(e.values[0], 1.0, 1e-15);
  const auto v = e.vectors.column(0);
  EXPECT_LT(max_abs_diff(y * v, v), 1e-14);
}

TEST(HermitianEigen, RandomResidualTraceUnitarity) {
  std::mt19937_64 rng(21);
  for (std::size_t dim : {1u, 2u, 5u, 10u, 26u, 32u}) {
    const auto m = random_hermitian(dim, rng);
    const auto e = hermitian_eigen(m);
    CMatrix d(dim, dim);
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      d(i, i) = e.values[i];
      sum += e.values[i];
      if (i > 0) {
        EXPECT_GE(e.values[i - 1], e.values[i]);
      }
    }
    EXPECT_LE(max_abs_diff(m * e.vectors, e.vectors * d), 1e-9) << "dim " << dim;
    EXPECT_NEAR(sum, trace(m).real(), 1e-10);
    EXPECT_TRUE(is_unitary(e.vectors, 1e-9));
  }
}

TEST(HermitianEigen, DegenerateSpectrum) {
  std::mt19937_64 rng(4);
  const auto q = hermitian_eigen(random_hermitian(6, rng)).vectors;
  CMatrix d(6, 6);
  for (std::size_t i = 0; i < 6; ++i) d(i, i) = i < 3 ? 2.0 : -1.0;
  const auto m = q * d * adjoint(q);
  const auto e = hermitian_eigen(m);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(e.values[i], i < 3 ? 2.0 : -1.0, 1e-12);
}

TEST(HermitianEigen, RejectsNonHermitian) {
  const CMatrix m(2, 2, {1.0, 2.0, 0.0, 1.0});
  EXPECT_THROW(hermitian_eigen(m), std::invalid_argument);
}

TEST(Lstsq, IdentitySystem) {
  const RVector b{1.5, -2.0, 3.25};
  const auto r = lstsq_real(RMatrix::identity(3), b);
  EXPECT_LT(max_abs_diff(r.x, b), 1e-15);
  EXPECT_LT(r.residual, 1e-15);
}

TEST(Lstsq, ConsistentOverdetermined) {
  const RMatrix a(4, 2, {1, 0, 0, 1, 1, 1, 1, -1});
  const RVector x{2.0, -3.0};
  const auto r = lstsq_real(a, a * x);
  EXPECT_LT(max_abs_diff(r.x, x), 1e-14);
  EXPECT_LT(r.residual, 1e-13);
}

// Normal equations (A^T A) x = A^T b solved by Gauss-Jordan with partial pivoting.
RVector normal_equations(const RMatrix& a, const RVector& b) {
  const std::size_t n = a.cols();
  RMatrix m(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < a.rows(); ++r) m(i, j) += a(r, i) * a(r, j);
    for (std::size_t r = 0; r < a.rows(); ++r) m(i, n) += a(r, i) * b[r];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    for (std::size_t j = 0; j <= n; ++j) std::swap(m(c, j), m(piv, j));
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m(r, c) / m(c, c);
      for (std::size_t j = c; j <= n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  RVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m(i, n) / m(i, i);
  return x;
}

TEST(Lstsq, RandomAgainstNormalEquations) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  RMatrix a(20, 10);
  for (auto& v : a.data()) v = g(rng);
  RVector b(20);
  for (auto& v : b) v = g(rng);
  const auto r = lstsq_real(a, b);
  EXPECT_LT(max_abs_diff(r.x, normal_equations(a, b)), 1e-8);
  const auto fitted = a * r.x;
  double res = 0.0;
  for (std::size_t i = 0; i < 20; ++i) res += (fitted[i] - b[i]) * (fitted[i] - b[i]);
  EXPECT_NEAR(r.residual, std::sqrt(res), 1e-12);
  EXPECT_GT(r.residual, 0.0);
}

TEST(Lstsq, RankDeficientReportsCondition) {
  const RMatrix a(3, 2, {1, 2, 2, 4, 3, 6});
  try {
    lstsq_real(a, RVector{1, 2, 3});
    FAIL() << "expected rank_deficient";
  } catch (const rank_deficient& e) {
    EXPECT_GT(e.condition(), 1e10);
  }
}

TEST(Lstsq, ShapeErrors) {
  EXPECT_THROW(lstsq_real(RMatrix(2, 3), RVector(2)), dimension_mismatch);
  EXPECT_THROW(lstsq_real(RMatrix(3, 2), RVector(2)), dimension_mismatch);
}

}  // namespace

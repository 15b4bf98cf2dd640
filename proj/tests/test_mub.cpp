#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "test_support.hpp"
#include "tqkd/channel.hpp"
#include "tqkd/mub.hpp"

namespace {

using namespace tqkd;

class PrimeBases : public ::testing::TestWithParam<int> {};

TEST_P(PrimeBases, OrthonormalAndUnbiased) {
  const int n = GetParam();
  const auto f = build_basis_family(n);
  ASSERT_EQ(f.basis_count(), n + 1);
  for (int m = 0; m <= n; ++m) {
    ASSERT_EQ(static_cast<int>(f.alice[m].size()), n);
    for (int mp = 0; mp <= n; ++mp)
      for (int k = 0; k < n; ++k)
        for (int kp = 0; kp < n; ++kp) {
          const double overlap = std::norm(inner(f.alice[m][k], f.alice[mp][kp]));
          const double expected = m == mp ? (k == kp ? 1.0 : 0.0) : 1.0 / n;
          EXPECT_NEAR(overlap, expected, 1e-12) << "m=" << m << " m'=" << mp << " k=" << k << " k'=" << kp;
        }
  }
}

TEST_P(PrimeBases, BobKetsAreConjugates) {
  const int n = GetParam();
  const auto f = build_basis_family(n);
  for (int m = 0; m <= n; ++m)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) EXPECT_EQ(f.bob[m][k][j], std::conj(f.alice[m][k][j]));
}

// |<m_k|m'_k'>|^2 = 1/n + delta_mm' (delta_kk' - 1/n), and the conjugate
// kets have the same overlaps.
TEST_P(PrimeBases, OverlapIdentity) {
  const int n = GetParam();
  const auto f = build_basis_family(n);
  for (int m = 0; m <= n; ++m)
    for (int mp = 0; mp <= n; ++mp)
      for (int k = 0; k < n; ++k)
        for (int kp = 0; kp < n; ++kp) {
          const double rhs = 1.0 / n + (m == mp ? (k == kp ? 1.0 : 0.0) - 1.0 / n : 0.0);
          EXPECT_NEAR(std::norm(inner(f.bob[m][k], f.bob[mp][kp])), rhs, 1e-12);
        }
}

TEST_P(PrimeBases, BasisMatricesUnitary) {
  const int n = GetParam();
  const auto f = build_basis_family(n);
  for (const auto& basis : f.alice) EXPECT_TRUE(is_unitary(basis_matrix(basis)));
}

// The entangled state has the same form in every basis pair.
TEST_P(PrimeBases, EntangledStateBasisIndependent) {
  const int n = GetParam();
  const auto f = build_basis_family(n);
  const auto ref = maximally_entangled(n);
  for (int m = 0; m <= n; ++m) EXPECT_LT(max_abs_diff(entangled_state(f, m).psi, ref), 1e-12) << "m=" << m;
}

TEST_P(PrimeBases, MismatchedBornProbabilitiesUniform) {
  const int n = GetParam();
  const auto f = build_basis_family(n);
  for (double beta0 : {1.0 / n, 0.5, 0.7, 0.9, 1.0}) {
    if (beta0 < 1.0 / n) continue;
    const auto rho = family_state(ChannelParams::from_beta0(n, beta0));
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        if (a == b) continue;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            EXPECT_NEAR(tqkd::testing::born_cell(rho, f, a, b, k, l), 1.0 / (n * n), 1e-12);
      }
  }
}

INSTANTIATE_TEST_SUITE_P(Primes, PrimeBases, ::testing::Values(2, 3, 5, 7));

TEST(Bases, QubitExamples) {
  const auto f = build_basis_family(2);
  const double s = 1.0 / std::sqrt(2.0);
  const complex i{0.0, 1.0};
  EXPECT_LT(max_abs_diff(f.alice[1][0], CVector{s, s}), 1e-15);
  EXPECT_LT(max_abs_diff(f.alice[1][1], CVector{s, -s}), 1e-15);
  EXPECT_LT(max_abs_diff(f.alice[2][0], CVector{s, i * s}), 1e-15);
  EXPECT_LT(max_abs_diff(f.bob[2][0], CVector{s, -i * s}), 1e-15);
  EXPECT_LT(max_abs_diff(f.bob[1][0], f.alice[1][0]), 1e-15);
}

// Projectors of all n(n+1) kets span the n^2-dimensional operator space.
TEST(Bases, QutritProjectorsInformationallyComplete) {
  const auto f = build_basis_family(3);
  std::vector<CMatrix> ps;
  for (const auto& basis : f.alice)
    for (const auto& ket : basis) ps.push_back(projector(ket));
  CMatrix g(ps.size(), ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j) g(i, j) = trace(adjoint(ps[i]) * ps[j]);
  const auto e = hermitian_eigen(g);
  int rank = 0;
  for (double v : e.values) rank += v > 1e-9;
  EXPECT_EQ(rank, 9);
}

TEST(Bases, NonPrimeUnsupported) {
  for (int n : {1, 4, 6, 9}) {
    try {
      build_basis_family(n);
      FAIL() << "n=" << n;
    } catch (const unsupported_dimension& e) {
      EXPECT_EQ(e.dimension(), n);
    }
  }
}

TEST(Bases, BobBasisFromAlice) {
  const complex i{0.0, 1.0};
  const Basis a{CVector{1.0, i}, CVector{i, 2.0}};
  const auto b = bob_basis_from_alice(a);
  EXPECT_EQ(b[0], (CVector{1.0, -i}));
  EXPECT_EQ(b[1], (CVector{-i, 2.0}));
}

TEST(Bases, MaximallyEntangledAnyDimension) {
  for (int n : {2, 4, 6}) {
    const auto psi = maximally_entangled(n);
    EXPECT_NEAR(norm(psi), 1.0, 1e-15);
    const auto dn = static_cast<std::size_t>(n);
    EXPECT_LT(max_abs_diff(partial_trace(psi, {dn, dn}, {1}), CMatrix::identity(dn) * complex(1.0 / n)), 1e-15);
  }
  EXPECT_THROW(maximally_entangled(1), invalid_params);
}

TEST(Bases, EntangledStateIndexChecked) {
  const auto f = build_basis_family(3);
  EXPECT_THROW(entangled_state(f, 4), std::out_of_range);
  EXPECT_THROW(entangled_state(f, -1), std::out_of_range);
}

}  // namespace

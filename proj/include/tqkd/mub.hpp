// Tomographically complete basis sets for a single qunit.
//
// Basis m = 0 is the computational basis. For n = 2 the remaining bases are
// the sigma_x and sigma_y eigenbases, in that order. For an odd prime n,
// basis m = b + 1 (b = 0..n-1) has kets
//
//     <j | m_k> = omega^(b j^2 + k j) / sqrt(n),   omega = exp(2 pi i / n).
//
// Bob's kets are the entrywise complex conjugates of Alice's, which makes
// <0_j|m_k> = <mbar_k|0bar_j> hold for every m.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "tqkd/errors.hpp"
#include "tqkd/linalg.hpp"

namespace tqkd {

constexpr bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

using Basis = std::vector<CVector>;

struct BasisFamily {
  int n = 0;
  std::vector<Basis> alice;  // alice[m][k] = |m_k>
  std::vector<Basis> bob;    // bob[m][k]   = |mbar_k>

  int basis_count() const noexcept { return n + 1; }
};

inline Basis bob_basis_from_alice(const Basis& alice_basis) {
  Basis out;
  out.reserve(alice_basis.size());
  for (const auto& ket : alice_basis) {
    CVector c(ket.size());
    for (std::size_t j = 0; j < ket.size(); ++j) c[j] = std::conj(ket[j]);
    out.push_back(std::move(c));
  }
  return out;
}

inline BasisFamily build_basis_family(int n) {
  if (!is_prime(n)) throw unsupported_dimension(n);
  const auto dim = static_cast<std::size_t>(n);
  BasisFamily f;
  f.n = n;

  Basis computational(dim, CVector(dim));
  for (std::size_t k = 0; k < dim; ++k) computational[k][k] = 1.0;
  f.alice.push_back(std::move(computational));

  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  if (n == 2) {
    const complex i{0.0, 1.0};
    f.alice.push_back({CVector{s, s}, CVector{s, -s}});
    f.alice.push_back({CVector{s, i * s}, CVector{s, -i * s}});
  } else {
    for (int b = 0; b < n; ++b) {
      Basis basis(dim, CVector(dim));
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          const int exponent = (b * j * j + k * j) % n;
          basis[k][j] = std::polar(s, 2.0 * std::numbers::pi * exponent / n);
        }
      f.alice.push_back(std::move(basis));
    }
  }
  for (const auto& basis : f.alice) f.bob.push_back(bob_basis_from_alice(basis));
  return f;
}

// Columns are the kets of the basis.
inline CMatrix basis_matrix(const Basis& basis) {
  const std::size_t d = basis.size();
  CMatrix u(d, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < d; ++j) u(j, k) = basis[k][j];
  return u;
}

struct EntangledState {
  CVector psi;
};

// (1/sqrt n) sum_k |m_k> (x) |mbar_k> for a chosen basis pair m.
inline EntangledState entangled_state(const BasisFamily& f, int m) {
  if (m < 0 || m > f.n) throw std::out_of_range("entangled_state: basis index out of range");
  const auto dim = static_cast<std::size_t>(f.n);
  CVector psi(dim * dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(f.n));
  for (std::size_t k = 0; k < dim; ++k) axpy(complex(s), tensor_product(f.alice[m][k], f.bob[m][k]), psi);
  return {std::move(psi)};
}

inline EntangledState entangled_state(const BasisFamily& f) { return entangled_state(f, 0); }

// Same state in the reference basis, for any n >= 2 (no explicit bases needed).
inline CVector maximally_entangled(int n) {
  if (n < 2) throw invalid_params("maximally_entangled: n must be at least 2");
  const auto dim = static_cast<std::size_t>(n);
  CVector psi(dim * dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < dim; ++k) psi[k * dim + k] = s;
  return psi;
}

}  // namespace tqkd

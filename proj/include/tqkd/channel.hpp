// The accepted two-qunit state family, Eve's purification of it, and the
// conditional ancilla states that her attack works with.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tqkd/errors.hpp"
#include "tqkd/linalg.hpp"
#include "tqkd/mub.hpp"

namespace tqkd {

inline constexpr double kParamTolerance = 1e-12;

// beta0: probability that matched-basis nit values agree.
// beta1: probability of one particular disagreeing value.
struct ChannelParams {
  int n = 2;
  double beta0 = 1.0;
  double beta1 = 0.0;

  static ChannelParams from_beta0(int n, double beta0) {
    ChannelParams p{n, beta0, (1.0 - beta0) / (n - 1)};
    p.validate();
    return p;
  }

  double ratio() const noexcept { return beta0 > 0 ? beta1 / beta0 : 0.0; }

  void validate() const {
    if (n < 2) throw invalid_params("channel params: n must be at least 2");
    if (!std::isfinite(beta0) || !std::isfinite(beta1) || beta0 <= 0 || beta1 < 0)
      throw invalid_params("channel params: beta0 must be positive and beta1 non-negative");
    if (std::abs(beta0 + (n - 1) * beta1 - 1.0) > kParamTolerance)
      throw invalid_params("channel params: beta0 + (n-1) beta1 must equal 1");
    if (beta1 / beta0 > 1.0 + kParamTolerance)
      throw invalid_params("channel params: beta1/beta0 must lie in [0, 1]");
  }
};

inline ChannelParams params_from_ratio(int n, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw invalid_params("params_from_ratio: ratio must lie in [0, 1]");
  if (n < 2) throw invalid_params("params_from_ratio: n must be at least 2");
  const double beta0 = 1.0 / (1.0 + (n - 1) * ratio);
  ChannelParams p{n, beta0, ratio * beta0};
  p.validate();
  return p;
}

// (beta0 - beta1)|psi><psi| + beta1/n. Only the trace condition is enforced,
// so states up to the positivity boundary beta1/beta0 = n/(n-1) can be built.
inline CMatrix family_state(int n, double beta0, double beta1) {
  if (n < 2 || std::abs(beta0 + (n - 1) * beta1 - 1.0) > kParamTolerance)
    throw invalid_params("family_state: beta0 + (n-1) beta1 must equal 1");
  const auto psi = maximally_entangled(n);
  CMatrix rho = projector(psi) * complex(beta0 - beta1);
  const double noise = beta1 / n;
  for (std::size_t i = 0; i < rho.rows(); ++i) rho(i, i) += noise;
  return rho;
}

inline CMatrix family_state(const ChannelParams& p) {
  p.validate();
  return family_state(p.n, p.beta0, p.beta1);
}

// Ancilla coordinates: w, then f_k (k = 0..n-1), then g_kl for k != l in
// lexicographic order. Dimension n^2 + 1.
struct AncillaLayout {
  int n = 2;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(n * n + 1); }
  std::size_t w() const noexcept { return 0; }
  std::size_t f(int k) const noexcept { return static_cast<std::size_t>(1 + k); }
  std::size_t g(int k, int l) const noexcept {
    return static_cast<std::size_t>(1 + n + k * (n - 1) + (l < k ? l : l - 1));
  }
};

struct Purification {
  ChannelParams params;
  AncillaLayout layout;
  double overlap = 0.0;                // <E_kk|E_ll> for k != l
  CVector state;                       // |Psi>, factors (Alice, Bob, ancilla)
  std::vector<CVector> ancillas;       // |E_kl>, index k*n + l
  std::vector<CVector> ancillas_tilde; // unnormalized, index k*n + l

  std::array<std::size_t, 3> dims() const {
    return {static_cast<std::size_t>(params.n), static_cast<std::size_t>(params.n), layout.dim()};
  }
};

// Gram matrix of the unnormalized ancilla kets required by the family:
// <E~_kl|E~_k'l'> = (beta0-beta1)/n d_kl d_k'l' + beta1/n d_kk' d_ll'.
inline CMatrix ancilla_gram(const ChannelParams& p) {
  const int n = p.n;
  CMatrix g(static_cast<std::size_t>(n * n), static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int kp = 0; kp < n; ++kp)
        for (int lp = 0; lp < n; ++lp) {
          double v = 0.0;
          if (k == l && kp == lp) v += (p.beta0 - p.beta1) / n;
          if (k == kp && l == lp) v += p.beta1 / n;
          g(static_cast<std::size_t>(k * n + l), static_cast<std::size_t>(kp * n + lp)) = v;
        }
  return g;
}

inline CMatrix gram(const std::vector<CVector>& vs) {
  CMatrix g(vs.size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) g(i, j) = inner(vs[i], vs[j]);
  return g;
}

// E_kk = sqrt(c) w + sqrt(1-c) f_k with c = 1 - beta1/beta0, E_kl = g_kl.
// For beta1 = 0 this degenerates to E_kk = w: the ancilla factors out.
inline Purification build_purification(const ChannelParams& p) {
  p.validate();
  const int n = p.n;
  const auto dn = static_cast<std::size_t>(n);
  Purification pur;
  pur.params = p;
  pur.layout = AncillaLayout{n};
  pur.overlap = std::clamp(1.0 - p.beta1 / p.beta0, 0.0, 1.0);
  const std::size_t d = pur.layout.dim();
  const double c = pur.overlap;

  pur.ancillas.assign(dn * dn, CVector(d));
  pur.ancillas_tilde.assign(dn * dn, CVector(d));
  const double amp_same = std::sqrt(p.beta0 / n);
  const double amp_diff = std::sqrt(p.beta1 / n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      auto& e = pur.ancillas[static_cast<std::size_t>(k * n + l)];
      if (k == l) {
        e[pur.layout.w()] = std::sqrt(c);
        e[pur.layout.f(k)] = std::sqrt(std::max(0.0, 1.0 - c));
      } else {
        e[pur.layout.g(k, l)] = 1.0;
      }
      pur.ancillas_tilde[static_cast<std::size_t>(k * n + l)] = scaled(e, complex(k == l ? amp_same : amp_diff));
    }

  pur.state.assign(dn * dn * d, 0.0);
  for (std::size_t kl = 0; kl < dn * dn; ++kl)
    for (std::size_t a = 0; a < d; ++a) pur.state[kl * d + a] = pur.ancillas_tilde[kl][a];
  return pur;
}

// Re-expresses an unnormalized ancilla set from basis pair m_from to m_to:
// E~(to)_kl = sum_k'l' E~(from)_k'l' <to_k|from_k'> <from_l'|to_l>.
inline std::vector<CVector> transport_ancillas(const std::vector<CVector>& from, const BasisFamily& f, int m_from,
                                               int m_to) {
  if (m_from < 0 || m_from > f.n || m_to < 0 || m_to > f.n)
    throw std::out_of_range("transport_ancillas: basis index out of range");
  const int n = f.n;
  if (from.size() != static_cast<std::size_t>(n * n))
    throw dimension_mismatch("transport_ancillas: expected n^2 ancilla kets");
  if (m_from == m_to) return from;
  const auto& a_from = f.alice[m_from];
  const auto& a_to = f.alice[m_to];
  std::vector<complex> overlap(static_cast<std::size_t>(n * n));  // <to_k|from_k'>
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp) overlap[static_cast<std::size_t>(k * n + kp)] = inner(a_to[k], a_from[kp]);

  const std::size_t d = from.front().size();
  std::vector<CVector> out(from.size(), CVector(d));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      auto& target = out[static_cast<std::size_t>(k * n + l)];
      for (int kp = 0; kp < n; ++kp)
        for (int lp = 0; lp < n; ++lp) {
          const complex coeff =
              overlap[static_cast<std::size_t>(k * n + kp)] * std::conj(overlap[static_cast<std::size_t>(l * n + lp)]);
          axpy(coeff, from[static_cast<std::size_t>(kp * n + lp)], target);
        }
    }
  return out;
}

// Unnormalized ancilla kets of basis pair m_prime, obtained from those of pair
// m (themselves transported from the stored m = 0 set).
inline std::vector<CVector> basis_change_ancilla(const Purification& pur, const BasisFamily& f, int m, int m_prime) {
  if (f.n != pur.params.n) throw dimension_mismatch("basis_change_ancilla: dimension mismatch");
  return transport_ancillas(transport_ancillas(pur.ancillas_tilde, f, 0, m), f, m, m_prime);
}

struct ConditionalStates {
  CMatrix same;         // rho^(=), first subspace
  CMatrix differ;       // rho^(!=), second subspace
  double weight_same;   // beta0
};

inline ConditionalStates eve_conditional_states(const Purification& pur) {
  const int n = pur.params.n;
  const std::size_t d = pur.layout.dim();
  CMatrix same(d, d);
  CMatrix differ(d, d);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const auto& e = pur.ancillas[static_cast<std::size_t>(k * n + l)];
      if (k == l) {
        same += projector(e);
      } else {
        differ += projector(e);
      }
    }
  same *= complex(1.0 / n);
  differ *= complex(1.0 / (n * (n - 1)));
  return {std::move(same), std::move(differ), pur.params.beta0};
}

// Bob's qunit after Alice finds |m_k>: (beta0 - beta1)|mbar_k><mbar_k| + beta1.
inline CMatrix reduced_bob_state(const ChannelParams& p, const BasisFamily& f, int m, int k) {
  p.validate();
  if (f.n != p.n) throw dimension_mismatch("reduced_bob_state: dimension mismatch");
  if (m < 0 || m > f.n || k < 0 || k >= f.n) throw std::out_of_range("reduced_bob_state: index out of range");
  CMatrix rho = projector(f.bob[m][k]) * complex(p.beta0 - p.beta1);
  for (std::size_t i = 0; i < rho.rows(); ++i) rho(i, i) += p.beta1;
  return rho;
}

}  // namespace tqkd

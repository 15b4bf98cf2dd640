// Eve's incoherent attack: square-root measurement on the k = l ancilla
// subspace, orthonormal readout on the k != l subspace, and the resulting
// matched-basis probability tables.
#pragma once

#include <cmath>
#include <string_view>
#include <vector>

#include "tqkd/channel.hpp"
#include "tqkd/linalg.hpp"

namespace tqkd {

struct SrmParameters {
  double r0 = 1.0;    // nondegenerate eigenvalue of rho^(=)
  double r1 = 0.0;    // (n-1)-fold eigenvalue
  double eta0 = 1.0;  // probability Eve's k = l guess is right
  double eta1 = 0.0;  // probability of each particular wrong guess
};

inline SrmParameters srm_parameters(const ChannelParams& p) {
  p.validate();
  const double n = p.n;
  const double ratio = p.beta1 / p.beta0;
  SrmParameters s;
  s.r0 = 1.0 - (n - 1.0) / n * ratio;
  s.r1 = ratio / n;
  const double sr0 = std::sqrt(std::max(0.0, s.r0));
  const double sr1 = std::sqrt(std::max(0.0, s.r1));
  const double root_eta0 = (sr0 + (n - 1.0) * sr1) / std::sqrt(n);
  const double root_eta1 = std::max(0.0, sr0 - sr1) / std::sqrt(n);
  s.eta0 = root_eta0 * root_eta0;
  s.eta1 = root_eta1 * root_eta1;
  return s;
}

// Measurement kets |e_kl>, index k*n + l. For k = l:
//   |e_kk> = (|E_kk> - (1 - sqrt(r1/r0))/n sum_j |E_jj>) / sqrt(n r1)
// and |e_kl> = |E_kl> otherwise.
inline std::vector<CVector> srm_vectors(const Purification& pur) {
  const auto& p = pur.params;
  if (p.beta1 <= 0.0) throw invalid_params("srm_vectors: undefined for beta1 = 0 (ancilla decoupled)");
  const int n = p.n;
  const auto s = srm_parameters(p);
  const std::size_t d = pur.layout.dim();
  CVector sum(d);
  for (int j = 0; j < n; ++j) axpy(complex(1.0), pur.ancillas[static_cast<std::size_t>(j * n + j)], sum);
  const double shrink = (1.0 - std::sqrt(s.r1 / s.r0)) / n;
  const double norm_factor = 1.0 / std::sqrt(n * s.r1);

  std::vector<CVector> out(pur.ancillas.size());
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const auto idx = static_cast<std::size_t>(k * n + l);
      if (k != l) {
        out[idx] = pur.ancillas[idx];
        continue;
      }
      CVector e = pur.ancillas[idx];
      axpy(complex(-shrink), sum, e);
      out[idx] = scaled(std::move(e), complex(norm_factor));
    }
  return out;
}

// (rho^(=))^(-1/2) on the first subspace from the two eigenvalues alone:
// (r0 + sqrt(r0 r1) + r1 - rho) / (sqrt(r0 r1) (sqrt r0 + sqrt r1)).
// Only meaningful on the span of the |E_kk>.
inline CMatrix srm_inverse_sqrt(const CMatrix& rho_same, const SrmParameters& s) {
  const double g = std::sqrt(s.r0 * s.r1);
  const double denom = g * (std::sqrt(s.r0) + std::sqrt(s.r1));
  CMatrix out = CMatrix::identity(rho_same.rows()) * complex(s.r0 + g + s.r1);
  out -= rho_same;
  out *= complex(1.0 / denom);
  return out;
}

struct AttackModel {
  ChannelParams params;
  SrmParameters srm;
  std::vector<CVector> vectors;
};

inline AttackModel build_attack_model(const Purification& pur) {
  return {pur.params, srm_parameters(pur.params), srm_vectors(pur)};
}

// p[k][l][k'][l']: Alice gets k, Bob l, Eve detects |e_k'l'>, matched bases.
class JointTable {
 public:
  JointTable() = default;
  explicit JointTable(int n) : n_(n), p_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int n() const noexcept { return n_; }
  double& operator()(int k, int l, int kp, int lp) { return p_[index(k, l, kp, lp)]; }
  double operator()(int k, int l, int kp, int lp) const { return p_[index(k, l, kp, lp)]; }
  const std::vector<double>& data() const noexcept { return p_; }

  double total() const {
    double s = 0.0;
    for (double x : p_) s += x;
    return s;
  }

  // p^(A&B)_kl, index k*n + l
  std::vector<double> alice_bob() const {
    std::vector<double> m(static_cast<std::size_t>(n_ * n_), 0.0);
    for_each([&](int k, int l, int, int, double v) { m[static_cast<std::size_t>(k * n_ + l)] += v; });
    return m;
  }
  // p^(A&E)_{k;k'l'}, index (k*n + k')*n + l'
  std::vector<double> alice_eve() const {
    std::vector<double> m(static_cast<std::size_t>(n_ * n_ * n_), 0.0);
    for_each([&](int k, int, int kp, int lp, double v) { m[static_cast<std::size_t>((k * n_ + kp) * n_ + lp)] += v; });
    return m;
  }
  // p^(E)_k'l', index k'*n + l'
  std::vector<double> eve() const {
    std::vector<double> m(static_cast<std::size_t>(n_ * n_), 0.0);
    for_each([&](int, int, int kp, int lp, double v) { m[static_cast<std::size_t>(kp * n_ + lp)] += v; });
    return m;
  }
  std::vector<double> alice() const {
    std::vector<double> m(static_cast<std::size_t>(n_), 0.0);
    for_each([&](int k, int, int, int, double v) { m[static_cast<std::size_t>(k)] += v; });
    return m;
  }
  std::vector<double> bob() const {
    std::vector<double> m(static_cast<std::size_t>(n_), 0.0);
    for_each([&](int, int l, int, int, double v) { m[static_cast<std::size_t>(l)] += v; });
    return m;
  }

 private:
  std::size_t index(int k, int l, int kp, int lp) const {
    return static_cast<std::size_t>(((k * n_ + l) * n_ + kp) * n_ + lp);
  }
  template <class F>
  void for_each(F&& f) const {
    for (int k = 0; k < n_; ++k)
      for (int l = 0; l < n_; ++l)
        for (int kp = 0; kp < n_; ++kp)
          for (int lp = 0; lp < n_; ++lp) f(k, l, kp, lp, p_[index(k, l, kp, lp)]);
  }

  int n_ = 0;
  std::vector<double> p_;
};

inline JointTable joint_table(const ChannelParams& p) {
  const auto s = srm_parameters(p);
  const int n = p.n;
  JointTable t(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int kp = 0; kp < n; ++kp)
        for (int lp = 0; lp < n; ++lp) {
          double v = 0.0;
          if (k == l && kp == lp) v += p.beta0 / n * ((k == kp ? s.eta0 - s.eta1 : 0.0) + s.eta1);
          if (k != l && k == kp && l == lp) v += p.beta1 / n;
          t(k, l, kp, lp) = v;
        }
  return t;
}

// |<E~_kl|e_k'l'>|^2 from explicit kets.
inline JointTable joint_table_from_amplitudes(const Purification& pur, const std::vector<CVector>& srm) {
  const int n = pur.params.n;
  JointTable t(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int kp = 0; kp < n; ++kp)
        for (int lp = 0; lp < n; ++lp)
          t(k, l, kp, lp) = std::norm(inner(pur.ancillas_tilde[static_cast<std::size_t>(k * n + l)],
                                            srm[static_cast<std::size_t>(kp * n + lp)]));
  return t;
}

enum class Verdict { bob, eve, even };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::bob: return "bob";
    case Verdict::eve: return "eve";
    case Verdict::even: return "even";
  }
  return "even";
}

inline constexpr double kVerdictBand = 1e-12;

struct BettingComparison {
  double bob_odds = 0.0;
  double eve_odds = 0.0;
  Verdict verdict = Verdict::even;
};

// Who guesses Alice's matched-basis nit value more often: Bob, by echoing his
// own value, or Eve, from her measurement outcome.
inline BettingComparison betting_comparison(const ChannelParams& p) {
  const auto s = srm_parameters(p);
  BettingComparison b;
  b.bob_odds = p.beta0;
  b.eve_odds = 1.0 - p.beta0 + p.beta0 * s.eta0;
  const double margin = p.beta0 - (p.n + 3) * p.beta1;
  if (std::abs(margin) <= kVerdictBand) {
    b.verdict = Verdict::even;
  } else {
    b.verdict = margin > 0 ? Verdict::bob : Verdict::eve;
  }
  return b;
}

}  // namespace tqkd

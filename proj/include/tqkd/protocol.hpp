// Monte Carlo simulation of the tomographic protocol: emission, random basis
// choices, outcomes for Alice, Bob and (optionally) Eve, sifting, raw key.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tqkd/attack.hpp"
#include "tqkd/channel.hpp"
#include "tqkd/errors.hpp"
#include "tqkd/linalg.hpp"
#include "tqkd/mub.hpp"
#include "tqkd/rng.hpp"

namespace tqkd {

// Values per (Alice basis a, Bob basis b, Alice nit k, Bob nit l).
template <class T>
class BasisPairTable {
 public:
  BasisPairTable() = default;
  explicit BasisPairTable(int n) : n_(n), data_(static_cast<std::size_t>((n + 1) * (n + 1) * n * n), T{}) {}

  int n() const noexcept { return n_; }
  int basis_count() const noexcept { return n_ + 1; }
  std::size_t pair_index(int a, int b) const noexcept { return static_cast<std::size_t>(a * (n_ + 1) + b); }
  std::size_t cells_per_pair() const noexcept { return static_cast<std::size_t>(n_ * n_); }

  T& operator()(int a, int b, int k, int l) { return data_[index(a, b, k, l)]; }
  const T& operator()(int a, int b, int k, int l) const { return data_[index(a, b, k, l)]; }

  T pair_total(int a, int b) const {
    T s{};
    for (int k = 0; k < n_; ++k)
      for (int l = 0; l < n_; ++l) s += (*this)(a, b, k, l);
    return s;
  }

  T total() const {
    T s{};
    for (const auto& x : data_) s += x;
    return s;
  }

  const std::vector<T>& data() const noexcept { return data_; }

 private:
  std::size_t index(int a, int b, int k, int l) const noexcept {
    return pair_index(a, b) * cells_per_pair() + static_cast<std::size_t>(k * n_ + l);
  }

  int n_ = 0;
  std::vector<T> data_;
};

using CountTensor = BasisPairTable<std::uint64_t>;
using ProbabilityTable = BasisPairTable<double>;

// Born-rule table Tr[rho (|a_k><a_k| (x) |bbar_l><bbar_l|)] for every basis pair.
inline ProbabilityTable born_probabilities(const CMatrix& rho, const BasisFamily& f) {
  const auto dim = static_cast<std::size_t>(f.n * f.n);
  if (!rho.square() || rho.rows() != dim) throw dimension_mismatch("born_probabilities: state is not n^2 x n^2");
  ProbabilityTable t(f.n);
  for (int a = 0; a <= f.n; ++a)
    for (int b = 0; b <= f.n; ++b)
      for (int k = 0; k < f.n; ++k)
        for (int l = 0; l < f.n; ++l) {
          const auto u = tensor_product(f.alice[a][k], f.bob[b][l]);
          t(a, b, k, l) = inner(u, rho * u).real();
        }
  return t;
}

inline ProbabilityTable frequencies(const CountTensor& counts) {
  ProbabilityTable p(counts.n());
  const int n = counts.n();
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      const auto total = counts.pair_total(a, b);
      if (total == 0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) p(a, b, k, l) = static_cast<double>(counts(a, b, k, l)) / static_cast<double>(total);
    }
  return p;
}

inline constexpr int kMaxSimulationDimension = 7;
inline constexpr double kDefaultSacrificeFraction = 0.1;

struct SimConfig {
  int n = 3;
  double beta0 = 1.0;
  std::uint64_t pairs = 1;
  std::uint64_t seed = 0;
  bool eve_enabled = true;
  double sacrifice = kDefaultSacrificeFraction;  // matched rounds diverted to tomography
  std::optional<CMatrix> state_override;        // rounds then carry no Eve outcome
  unsigned threads = 1;                          // 0 = hardware concurrency
  int max_n = kMaxSimulationDimension;

  ChannelParams params() const { return ChannelParams::from_beta0(n, beta0); }

  bool eve_active() const noexcept { return eve_enabled && !state_override.has_value(); }

  void validate() const {
    if (!is_prime(n) || n > max_n) throw unsupported_dimension(n);
    if (pairs < 1) throw invalid_params("sim config: pairs must be at least 1");
    if (!(sacrifice >= 0.0 && sacrifice <= 1.0)) throw invalid_params("sim config: sacrifice must lie in [0, 1]");
    if (state_override) {
      const auto dim = static_cast<std::size_t>(n * n);
      if (!state_override->square() || state_override->rows() != dim)
        throw invalid_params("sim config: override state must be n^2 x n^2");
      if (!is_hermitian(*state_override, 1e-8)) throw invalid_params("sim config: override state is not Hermitian");
      if (std::abs(trace(*state_override) - complex(1.0)) > 1e-8)
        throw invalid_params("sim config: override state must have unit trace");
    } else {
      params();
    }
  }
};

inline constexpr std::uint8_t kNoEveOutcome = 0xFF;

struct RoundRecord {
  std::uint8_t alice_m = 0;
  std::uint8_t bob_m = 0;
  std::uint8_t alice_k = 0;
  std::uint8_t bob_l = 0;
  std::uint8_t eve_k = kNoEveOutcome;
  std::uint8_t eve_l = kNoEveOutcome;
  bool sacrificed = false;

  bool matched() const noexcept { return alice_m == bob_m; }
  bool has_eve() const noexcept { return eve_k != kNoEveOutcome; }
  bool operator==(const RoundRecord&) const = default;
};

struct ProtocolTranscript {
  SimConfig config;
  std::vector<RoundRecord> rounds;
  std::vector<std::uint64_t> sifted_rounds;  // indices with alice_m == bob_m
  std::vector<std::uint8_t> sifted_key_alice;
  std::vector<std::uint8_t> sifted_key_bob;
  std::vector<std::uint8_t> eve_guess;       // Eve's guess of Alice's value, per sifted round
  CountTensor counts;                        // every round
  CountTensor tomography_counts;             // mismatched + sacrificed matched rounds

  std::uint64_t sifted() const noexcept { return sifted_rounds.size(); }
  std::uint64_t sacrificed() const {
    std::uint64_t s = 0;
    for (auto i : sifted_rounds) s += rounds[i].sacrificed ? 1 : 0;
    return s;
  }
  std::uint64_t net_raw_key() const { return sifted() - sacrificed(); }
};

namespace detail {

inline std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += std::max(0.0, p[i]);
    c[i] = s;
  }
  if (s <= 0.0) throw invalid_params("sampling table has no positive mass");
  for (auto& x : c) x /= s;
  c.back() = 1.0;
  return c;
}

inline std::size_t sample(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

struct Samplers {
  int n = 0;
  std::vector<std::vector<double>> born;  // per basis pair, over k*n + l
  std::vector<double> eve;                // over ((k*n + l)*n + k')*n + l'
};

inline Samplers make_samplers(const SimConfig& cfg, const BasisFamily& f) {
  Samplers s;
  s.n = cfg.n;
  const CMatrix rho = cfg.state_override ? *cfg.state_override : family_state(cfg.params());
  const auto born = born_probabilities(rho, f);
  const std::size_t cells = born.cells_per_pair();
  for (int a = 0; a <= cfg.n; ++a)
    for (int b = 0; b <= cfg.n; ++b) {
      const auto first = born.data().begin() + static_cast<std::ptrdiff_t>(born.pair_index(a, b) * cells);
      s.born.push_back(cumulative(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(cells))));
    }
  if (cfg.eve_active()) s.eve = cumulative(joint_table(cfg.params()).data());
  return s;
}

inline RoundRecord simulate_round(const SimConfig& cfg, const Samplers& s, std::uint64_t round) {
  CounterRng rng(cfg.seed, round);
  const auto bases = static_cast<std::uint32_t>(cfg.n + 1);
  const auto n = static_cast<std::size_t>(cfg.n);
  RoundRecord r;
  r.alice_m = static_cast<std::uint8_t>(rng.below(bases));
  r.bob_m = static_cast<std::uint8_t>(rng.below(bases));
  if (r.matched()) {
    r.sacrificed = rng.uniform() < cfg.sacrifice;
    if (!s.eve.empty()) {
      std::size_t idx = sample(s.eve, rng.uniform());
      r.eve_l = static_cast<std::uint8_t>(idx % n);
      idx /= n;
      r.eve_k = static_cast<std::uint8_t>(idx % n);
      idx /= n;
      r.bob_l = static_cast<std::uint8_t>(idx % n);
      r.alice_k = static_cast<std::uint8_t>(idx / n);
      return r;
    }
  }
  const auto& cdf = s.born[static_cast<std::size_t>(r.alice_m) * bases + r.bob_m];
  const std::size_t idx = sample(cdf, rng.uniform());
  r.alice_k = static_cast<std::uint8_t>(idx / n);
  r.bob_l = static_cast<std::uint8_t>(idx % n);
  return r;
}

}  // namespace detail

// Matched rounds come from the analytic attack table when Eve is active and
// from the Born rule otherwise; mismatched rounds always from the Born rule.
inline ProtocolTranscript run_protocol(const SimConfig& cfg, const BasisFamily& f) {
  cfg.validate();
  if (f.n != cfg.n) throw dimension_mismatch("run_protocol: basis family has the wrong dimension");
  const auto samplers = detail::make_samplers(cfg, f);

  ProtocolTranscript t;
  t.config = cfg;
  t.rounds.resize(cfg.pairs);

  unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, cfg.pairs));
  const std::uint64_t chunk = (cfg.pairs + workers - 1) / workers;
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) t.rounds[i] = detail::simulate_round(cfg, samplers, i);
  };
  if (workers == 1) {
    fill(0, cfg.pairs);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(cfg.pairs, begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
  }

  t.counts = CountTensor(cfg.n);
  t.tomography_counts = CountTensor(cfg.n);
  for (std::uint64_t i = 0; i < cfg.pairs; ++i) {
    const auto& r = t.rounds[i];
    ++t.counts(r.alice_m, r.bob_m, r.alice_k, r.bob_l);
    if (!r.matched() || r.sacrificed) ++t.tomography_counts(r.alice_m, r.bob_m, r.alice_k, r.bob_l);
    if (r.matched()) {
      t.sifted_rounds.push_back(i);
      t.sifted_key_alice.push_back(r.alice_k);
      t.sifted_key_bob.push_back(r.bob_l);
      t.eve_guess.push_back(r.eve_k);
    }
  }
  return t;
}

inline ProtocolTranscript run_protocol(const SimConfig& cfg) { return run_protocol(cfg, build_basis_family(cfg.n)); }

struct EveAccuracy {
  double overall = 0.0;        // P(Eve's guess = Alice's value), sifted rounds
  double given_equal = 0.0;    // same, restricted to rounds with k = l
  double given_unequal = 0.0;  // P(Eve names both values), rounds with k != l
  std::uint64_t sifted = 0;
  std::uint64_t equal_rounds = 0;
};

inline EveAccuracy eve_accuracy(const ProtocolTranscript& t) {
  if (!t.config.eve_active()) throw std::invalid_argument("eve_accuracy: transcript has no Eve outcomes");
  if (t.sifted_rounds.empty()) throw std::runtime_error("eve_accuracy: no sifted rounds");
  std::uint64_t right = 0, equal = 0, right_equal = 0, unequal = 0, right_unequal = 0;
  for (auto i : t.sifted_rounds) {
    const auto& r = t.rounds[i];
    const bool hit = r.eve_k == r.alice_k;
    right += hit;
    if (r.alice_k == r.bob_l) {
      ++equal;
      right_equal += hit;
    } else {
      ++unequal;
      right_unequal += (hit && r.eve_l == r.bob_l);
    }
  }
  EveAccuracy a;
  a.sifted = t.sifted_rounds.size();
  a.equal_rounds = equal;
  a.overall = static_cast<double>(right) / static_cast<double>(a.sifted);
  a.given_equal = equal ? static_cast<double>(right_equal) / static_cast<double>(equal) : 0.0;
  a.given_unequal = unequal ? static_cast<double>(right_unequal) / static_cast<double>(unequal) : 1.0;
  return a;
}

inline constexpr std::uint64_t kRecommendedSiftedRounds = 10000;

struct EmpiricalInfo {
  double i_ab_hat = 0.0;
  double i_ae_hat = std::numeric_limits<double>::quiet_NaN();  // NaN without Eve outcomes
  double nu_hat = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t sifted = 0;
  bool low_statistics = false;
};

namespace detail {

// Plug-in estimate of I(X;Y) = 1 - H(X|Y) in base n, where X is Alice's nit
// value (uniform by construction, so H(X) = 1). Rows index X.
inline double plugin_mutual_info(const std::vector<std::uint64_t>& joint, std::size_t rows, std::size_t cols, int n) {
  double total = 0.0;
  std::vector<double> pc(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = static_cast<double>(joint[i * cols + j]);
      pc[j] += c;
      total += c;
    }
  if (total <= 0.0) return 0.0;
  double conditional = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = static_cast<double>(joint[i * cols + j]);
      if (c == 0.0) continue;
      conditional -= c / total * std::log(c / pc[j]);
    }
  return 1.0 - conditional / std::log(static_cast<double>(n));
}

}  // namespace detail

inline EmpiricalInfo empirical_mutual_info(const ProtocolTranscript& t) {
  const auto n = static_cast<std::size_t>(t.config.n);
  EmpiricalInfo e;
  e.sifted = t.sifted_rounds.size();
  e.low_statistics = e.sifted < kRecommendedSiftedRounds;
  std::vector<std::uint64_t> ab(n * n, 0);
  std::vector<std::uint64_t> ae(n * n * n, 0);
  const bool with_eve = t.config.eve_active();
  for (auto i : t.sifted_rounds) {
    const auto& r = t.rounds[i];
    ++ab[r.alice_k * n + r.bob_l];
    if (with_eve) ++ae[r.alice_k * n * n + r.eve_k * n + r.eve_l];
  }
  e.i_ab_hat = detail::plugin_mutual_info(ab, n, n, t.config.n);
  if (with_eve) {
    e.i_ae_hat = detail::plugin_mutual_info(ae, n, n * n, t.config.n);
    e.nu_hat = e.i_ab_hat - e.i_ae_hat;
  }
  return e;
}

}  // namespace tqkd

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "test_support.hpp"
#include "tqkd/attack.hpp"
#include "tqkd/protocol.hpp"
#include "tqkd/rng.hpp"
#include "tqkd/security.hpp"

namespace {

using namespace tqkd;
using tqkd::testing::four_sigma;

SimConfig config(int n, double beta0, std::uint64_t pairs, std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.beta0 = beta0;
  c.pairs = pairs;
  c.seed = seed;
  return c;
}

TEST(Rng, DeterministicPerCounter) {
  CounterRng a(42, 7), b(42, 7), c(42, 8);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
}

TEST(Rng, UniformMoments) {
  CounterRng r(1, 0);
  double sum = 0.0, sq = 0.0;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / trials, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / trials));
  EXPECT_NEAR(sq / trials, 1.0 / 3.0, 0.005);
}

TEST(Rng, BelowIsUniform) {
  CounterRng r(3, 0);
  std::vector<int> hist(5, 0);
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) ++hist[r.below(5)];
  for (int h : hist) EXPECT_NEAR(h / double(trials), 0.2, four_sigma(0.2, trials));
}

TEST(BornProbabilities, MatchIndependentOracle) {
  std::mt19937_64 rng(8);
  for (int n : {2, 3}) {
    const auto f = build_basis_family(n);
    const auto rho = tqkd::testing::random_state(static_cast<std::size_t>(n * n), rng);
    const auto lib = born_probabilities(rho, f);
    const auto oracle = tqkd::testing::exact_probabilities(rho, f);
    for (std::size_t i = 0; i < lib.data().size(); ++i) EXPECT_NEAR(lib.data()[i], oracle.data()[i], 1e-12);
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) EXPECT_NEAR(lib.pair_total(a, b), 1.0, 1e-12);
  }
}

TEST(Simulation, DeterministicAcrossThreadCounts) {
  auto c = config(3, 0.8, 50000, 99);
  const auto one = run_protocol(c);
  for (unsigned threads : {2u, 3u, 8u}) {
    c.threads = threads;
    const auto many = run_protocol(c);
    ASSERT_EQ(one.rounds.size(), many.rounds.size());
    EXPECT_TRUE(one.rounds == many.rounds) << threads << " threads";
    EXPECT_EQ(one.counts.data(), many.counts.data());
  }
}

TEST(Simulation, SeedChangesTranscript) {
  const auto a = run_protocol(config(3, 0.8, 1000, 1));
  const auto b = run_protocol(config(3, 0.8, 1000, 2));
  EXPECT_FALSE(a.rounds == b.rounds);
}

TEST(Simulation, BookkeepingConsistent) {
  const auto t = run_protocol(config(5, 0.9, 20000, 4));
  EXPECT_EQ(t.counts.total(), 20000u);
  EXPECT_EQ(t.sifted_key_alice.size(), t.sifted());
  EXPECT_EQ(t.sifted_key_bob.size(), t.sifted());
  EXPECT_EQ(t.eve_guess.size(), t.sifted());
  std::uint64_t matched = 0, tomo = 0;
  for (const auto& r : t.rounds) {
    matched += r.matched();
    tomo += !r.matched() || r.sacrificed;
    EXPECT_TRUE(r.has_eve() == r.matched());
    if (!r.matched()) {
      EXPECT_FALSE(r.sacrificed);
    }
  }
  EXPECT_EQ(matched, t.sifted());
  EXPECT_EQ(tomo, t.tomography_counts.total());
  EXPECT_EQ(t.net_raw_key() + t.sacrificed(), t.sifted());
}

// The statistics at n = 3, beta0 = 0.8 with 10^6 rounds.
class QutritRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto start = std::chrono::steady_clock::now();
    transcript_ = new ProtocolTranscript(run_protocol(config(3, 0.8, 1000000, 2024)));
    seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  static void TearDownTestSuite() {
    delete transcript_;
    transcript_ = nullptr;
  }
  static const ProtocolTranscript& t() { return *transcript_; }

  static ProtocolTranscript* transcript_;
  static double seconds_;
};

ProtocolTranscript* QutritRun::transcript_ = nullptr;
double QutritRun::seconds_ = 0.0;

TEST_F(QutritRun, FastSingleThreaded) { EXPECT_LT(seconds_, 30.0); }

TEST_F(QutritRun, MatchedFraction) {
  const double pairs = 1e6;
  EXPECT_NEAR(t().sifted() / pairs, 0.25, four_sigma(0.25, pairs));
}

TEST_F(QutritRun, SameValueRate) {
  std::uint64_t same = 0;
  for (std::size_t i = 0; i < t().sifted(); ++i) same += t().sifted_key_alice[i] == t().sifted_key_bob[i];
  const double s = static_cast<double>(t().sifted());
  EXPECT_NEAR(same / s, 0.8, four_sigma(0.8, s));
}

TEST_F(QutritRun, EveAccuracy) {
  const auto p = ChannelParams::from_beta0(3, 0.8);
  const auto srm = srm_parameters(p);
  const auto acc = eve_accuracy(t());
  const double s = static_cast<double>(acc.sifted);
  const double expected = 1.0 - p.beta0 + p.beta0 * srm.eta0;
  EXPECT_NEAR(acc.overall, expected, four_sigma(expected, s));
  EXPECT_NEAR(acc.given_equal, srm.eta0, four_sigma(srm.eta0, static_cast<double>(acc.equal_rounds)));
  EXPECT_DOUBLE_EQ(acc.given_unequal, 1.0);
}

TEST_F(QutritRun, MismatchedCellsUniform) {
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      if (a == b) continue;
      const double total = static_cast<double>(t().counts.pair_total(a, b));
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          EXPECT_NEAR(t().counts(a, b, k, l) / total, 1.0 / 9.0, four_sigma(1.0 / 9.0, total));
    }
}

TEST_F(QutritRun, SacrificedFraction) {
  const double s = static_cast<double>(t().sifted());
  EXPECT_NEAR(t().sacrificed() / s, kDefaultSacrificeFraction, four_sigma(kDefaultSacrificeFraction, s));
}

TEST_F(QutritRun, PluginInformationNearAnalytic) {
  const auto p = ChannelParams::from_beta0(3, 0.8);
  const auto e = empirical_mutual_info(t());
  EXPECT_FALSE(e.low_statistics);
  EXPECT_NEAR(e.i_ab_hat, mutual_info_ab(p), 0.01);
  EXPECT_NEAR(e.i_ae_hat, mutual_info_ae(p), 0.01);
  EXPECT_NEAR(e.nu_hat, e.i_ab_hat - e.i_ae_hat, 1e-15);
}

TEST(Simulation, NoiselessKeysAgree) {
  auto c = config(3, 1.0, 20000, 5);
  const auto t = run_protocol(c);
  EXPECT_EQ(t.sifted_key_alice, t.sifted_key_bob);
  const auto e = empirical_mutual_info(t);
  EXPECT_DOUBLE_EQ(e.i_ab_hat, 1.0);
  EXPECT_NEAR(e.i_ae_hat, 0.0, 0.01);
}

TEST(Simulation, QubitThresholdEstimates) {
  const auto t = run_protocol(config(2, 0.8436, 1000000, 11));
  const auto e = empirical_mutual_info(t);
  EXPECT_NEAR(e.i_ab_hat, 0.3743, 0.01);
  EXPECT_NEAR(e.i_ae_hat, 0.3743, 0.01);
}

// Estimated yield changes sign across the zero-yield threshold.
TEST(Simulation, YieldSignBrackets) {
  const double b0 = threshold_beta0(3, 0.0).beta0;
  const auto below = empirical_mutual_info(run_protocol(config(3, b0 - 0.05, 400000, 3)));
  const auto above = empirical_mutual_info(run_protocol(config(3, b0 + 0.05, 400000, 3)));
  EXPECT_LT(below.nu_hat, 0.0);
  EXPECT_GT(above.nu_hat, 0.0);
}

TEST(Simulation, EveOffMatchesBornRule) {
  auto c = config(3, 0.8, 400000, 6);
  c.eve_enabled = false;
  const auto t = run_protocol(c);
  for (const auto& r : t.rounds) ASSERT_FALSE(r.has_eve());
  const auto e = empirical_mutual_info(t);
  EXPECT_TRUE(std::isnan(e.i_ae_hat));
  EXPECT_TRUE(std::isnan(e.nu_hat));
  EXPECT_THROW(eve_accuracy(t), std::invalid_argument);
  std::uint64_t same = 0;
  for (std::size_t i = 0; i < t.sifted(); ++i) same += t.sifted_key_alice[i] == t.sifted_key_bob[i];
  const double s = static_cast<double>(t.sifted());
  EXPECT_NEAR(same / s, 0.8, four_sigma(0.8, s));
}

TEST(Simulation, OverrideStateFollowsBornRule) {
  const int n = 3;
  const auto f = build_basis_family(n);
  std::mt19937_64 rng(12);
  auto c = config(n, 0.8, 300000, 8);
  c.state_override = tqkd::testing::random_state(9, rng);
  const auto t = run_protocol(c, f);
  EXPECT_FALSE(c.eve_active());
  const auto exact = tqkd::testing::exact_probabilities(*c.state_override, f);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      const double total = static_cast<double>(t.counts.pair_total(a, b));
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double p = exact(a, b, k, l);
          EXPECT_NEAR(t.counts(a, b, k, l) / total, p, four_sigma(p, total) + 1e-12);
        }
    }
}

TEST(Simulation, SmallRunFlagsLowStatistics) {
  const auto e = empirical_mutual_info(run_protocol(config(3, 0.8, 1000, 1)));
  EXPECT_TRUE(e.low_statistics);
}

TEST(SimConfig, Errors) {
  EXPECT_THROW(run_protocol(config(4, 0.8, 10, 1)), unsupported_dimension);
  EXPECT_THROW(run_protocol(config(11, 0.8, 10, 1)), unsupported_dimension);
  EXPECT_THROW(run_protocol(config(3, 0.2, 10, 1)), invalid_params);
  EXPECT_THROW(run_protocol(config(3, 0.8, 0, 1)), invalid_params);
  auto c = config(3, 0.8, 10, 1);
  c.sacrifice = 1.5;
  EXPECT_THROW(run_protocol(c), invalid_params);
  c.sacrifice = 0.1;
  c.state_override = CMatrix::identity(4);
  EXPECT_THROW(run_protocol(c), invalid_params);
  c.state_override = CMatrix::identity(9);
  EXPECT_THROW(run_protocol(c), invalid_params);  // trace 9
  EXPECT_THROW(run_protocol(config(3, 0.8, 10, 1), build_basis_family(2)), dimension_mismatch);
}

TEST(EveAccuracy, RequiresSiftedRounds) {
  std::uint64_t seed = 0;
  while (run_protocol(config(2, 0.9, 1, seed)).sifted() != 0) ++seed;
  EXPECT_THROW(eve_accuracy(run_protocol(config(2, 0.9, 1, seed))), std::runtime_error);
}

}  // namespace

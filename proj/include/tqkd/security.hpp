// Mutual informations, the Csiszar-Korner yield, and threshold solving.
// All information quantities are in base-n units ("nits"); 0 log 0 = 0.
#pragma once

#include <cmath>
#include <stdexcept>

#include "tqkd/attack.hpp"
#include "tqkd/channel.hpp"

namespace tqkd {

// x log_n x with the 0 log 0 = 0 convention.
inline double xlogx(double x, int n) {
  if (x <= 0.0) return 0.0;
  return x * std::log(x) / std::log(static_cast<double>(n));
}

// x log_n y with 0 log 0 = 0; x > 0, y = 0 is -infinity.
inline double xlogy(double x, double y, int n) {
  if (x <= 0.0) return 0.0;
  return x * std::log(y) / std::log(static_cast<double>(n));
}

inline double nits_to_bits(double nits, int n) { return nits * std::log2(static_cast<double>(n)); }

// 1 + beta0 log beta0 + (1 - beta0) log beta1
inline double mutual_info_ab(const ChannelParams& p) {
  p.validate();
  return 1.0 + xlogx(p.beta0, p.n) + xlogy((p.n - 1) * p.beta1, p.beta1, p.n);
}

// 1 + beta0 [eta0 log eta0 + (1 - eta0) log eta1]
// (1 - eta0) is evaluated as (n-1) eta1, which is equal but stays
// non-negative near the pure-noise end.
inline double mutual_info_ae(const ChannelParams& p) {
  const auto s = srm_parameters(p);
  return 1.0 + p.beta0 * (xlogx(s.eta0, p.n) + xlogy((p.n - 1) * s.eta1, s.eta1, p.n));
}

inline double channel_capacity_ab(const ChannelParams& p) { return mutual_info_ab(p); }
inline double channel_capacity_ae(const ChannelParams& p) { return mutual_info_ae(p); }

inline bool distillable(const ChannelParams& p) {
  p.validate();
  return p.beta0 > 2.0 * p.beta1;
}

struct SecurityReport {
  int n = 2;
  double beta0 = 1.0;
  double i_ab = 0.0;
  double i_ae = 0.0;
  double nu = 0.0;
  double ck_yield = 0.0;
  bool distillable = false;
  Verdict betting_verdict = Verdict::even;
};

inline SecurityReport ck_yield(const ChannelParams& p) {
  SecurityReport r;
  r.n = p.n;
  r.beta0 = p.beta0;
  r.i_ab = mutual_info_ab(p);
  r.i_ae = mutual_info_ae(p);
  r.nu = r.i_ab - r.i_ae;
  r.ck_yield = std::max(0.0, r.nu);
  r.distillable = distillable(p);
  r.betting_verdict = betting_comparison(p).verdict;
  return r;
}

inline double yield_difference(int n, double beta0) {
  const auto p = ChannelParams::from_beta0(n, beta0);
  return mutual_info_ab(p) - mutual_info_ae(p);
}

struct ThresholdPoint {
  int n = 2;
  double nu = 0.0;
  double beta0 = 0.0;
  double n_beta1_over_beta0 = 0.0;
  double eta1_over_eta0 = 0.0;
};

inline constexpr double kThresholdTolerance = 1e-10;
inline constexpr int kThresholdMaxIterations = 200;

// beta0 at which nu(beta0) reaches nu_target, by bisection on [1/n, 1].
inline ThresholdPoint threshold_beta0(int n, double nu_target) {
  if (n < 2) throw invalid_params("threshold_beta0: n must be at least 2");
  if (!(nu_target >= 0.0 && nu_target < 1.0)) throw invalid_params("threshold_beta0: nu must lie in [0, 1)");
  double lo = 1.0 / n;
  double hi = 1.0;
  const double f_lo = yield_difference(n, lo) - nu_target;
  const double f_hi = yield_difference(n, hi) - nu_target;
  if (f_lo > 0.0 || f_hi < 0.0) throw std::runtime_error("threshold_beta0: no sign change on [1/n, 1]");
  for (int it = 0; it < kThresholdMaxIterations && hi - lo > kThresholdTolerance * 0.5; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (yield_difference(n, mid) < nu_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  ThresholdPoint t;
  t.n = n;
  t.nu = nu_target;
  t.beta0 = 0.5 * (lo + hi);
  const auto p = ChannelParams::from_beta0(n, t.beta0);
  const auto s = srm_parameters(p);
  t.n_beta1_over_beta0 = n * p.beta1 / p.beta0;
  t.eta1_over_eta0 = s.eta1 / s.eta0;
  return t;
}

// Large-n closed-form estimate of the threshold beta0 for yield nu.
inline double beta0_approx(int n, double nu) {
  if (n < 2) throw invalid_params("beta0_approx: n must be at least 2");
  if (!(nu >= 0.0 && nu < 1.0)) throw invalid_params("beta0_approx: nu must lie in [0, 1)");
  const double ln = std::log(static_cast<double>(n));
  return (1.0 + nu + std::log(2.0 / (1.0 - nu)) / ln) / (2.0 + std::log((1.0 + nu) / (1.0 - nu)) / ln);
}

}  // namespace tqkd

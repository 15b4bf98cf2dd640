// JSON and CSV export, and the override-state file reader.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tqkd/attack.hpp"
#include "tqkd/linalg.hpp"
#include "tqkd/mub.hpp"
#include "tqkd/protocol.hpp"
#include "tqkd/security.hpp"
#include "tqkd/tomography.hpp"

namespace tqkd::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kDefaultPrecision = 6;
inline constexpr std::uint64_t kMaxRoundDump = 100000;

// Rounds to `digits` significant digits; non-finite values pass through.
inline double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0 || digits >= 17) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

// NaN and infinities have no JSON literal; emit null.
inline json number(double x, int digits) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig(x, digits);
}

inline json complex_entries(std::span<const complex> values) {
  json arr = json::array();
  for (const auto& z : values) arr.push_back({z.real(), z.imag()});
  return arr;
}

inline json basis_family_json(const BasisFamily& f) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = f.n;
  auto dump = [](const std::vector<Basis>& bases) {
    json out = json::array();
    for (const auto& basis : bases) {
      json kets = json::array();
      for (const auto& ket : basis) kets.push_back(complex_entries(ket));
      out.push_back(std::move(kets));
    }
    return out;
  };
  j["alice"] = dump(f.alice);
  j["bob"] = dump(f.bob);
  return j;
}

// Override-state files hold a flat JSON list of [re, im] pairs, row-major,
// n^2 x n^2 entries.
inline CMatrix parse_state(const json& j, int n) {
  if (!j.is_array()) throw invalid_params("override state: expected a JSON list of [re, im] pairs");
  const auto dim = static_cast<std::size_t>(n * n);
  if (j.size() != dim * dim)
    throw invalid_params("override state: expected " + std::to_string(dim * dim) + " entries, got " +
                         std::to_string(j.size()));
  std::vector<complex> data;
  data.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw invalid_params("override state: every entry must be a [re, im] pair");
    data.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return CMatrix(dim, dim, std::move(data));
}

inline CMatrix read_state_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw invalid_params("override state: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw invalid_params("override state: " + std::string(e.what()));
  }
  return parse_state(j, n);
}

inline json state_json(const CMatrix& rho) { return complex_entries(rho.data()); }

struct Units {
  int n = 2;
  bool bits = false;
  double operator()(double nits) const { return bits ? nits_to_bits(nits, n) : nits; }
  const char* name() const { return bits ? "bits" : "nits"; }
};

inline json security_json(const SecurityReport& r, int digits, Units u) {
  return {{"n", r.n},
          {"beta0", number(r.beta0, digits)},
          {"units", u.name()},
          {"i_ab", number(u(r.i_ab), digits)},
          {"i_ae", number(u(r.i_ae), digits)},
          {"nu", number(u(r.nu), digits)},
          {"ck_yield", number(r.ck_yield, digits)},
          {"distillable", r.distillable},
          {"betting_verdict", std::string(to_string(r.betting_verdict))}};
}

inline json tomography_json(const TomographyResult& r, int n, int digits) {
  json pairs = json::array();
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      pairs.push_back({{"alice_basis", a},
                       {"bob_basis", b},
                       {"max_deviation", number(r.pair_max_deviation[static_cast<std::size_t>(a * (n + 1) + b)], digits)}});
  return {{"beta0_hat", number(r.beta0_hat, digits)},
          {"residual", number(r.residual, digits)},
          {"max_deviation_sigma", number(r.max_deviation_z, digits)},
          {"sigma_scale", number(r.sigma_scale, digits)},
          {"accepted", r.accepted},
          {"acceptance_rule",
           {{"statistic", "max over cells of |observed - family| / sigma_cell"},
            {"k_sigma", r.options.k_sigma},
            {"abs_floor", r.options.abs_floor},
            {"design_choice", true}}},
          {"pair_deviation", std::move(pairs)}};
}

inline json config_json(const SimConfig& c) {
  json j{{"n", c.n},
         {"pairs", c.pairs},
         {"seed", c.seed},
         {"eve", c.eve_active()},
         {"sacrifice", c.sacrifice},
         {"override_state", c.state_override.has_value()}};
  if (!c.state_override) j["beta0"] = c.beta0;
  return j;
}

inline json transcript_summary_json(const ProtocolTranscript& t, int digits, Units u) {
  const double pairs = static_cast<double>(t.config.pairs);
  std::uint64_t same = 0;
  for (std::size_t i = 0; i < t.sifted_key_alice.size(); ++i) same += t.sifted_key_alice[i] == t.sifted_key_bob[i];
  json j{{"pairs", t.config.pairs},
         {"sifted", t.sifted()},
         {"sacrificed", t.sacrificed()},
         {"matched_fraction", number(static_cast<double>(t.sifted()) / pairs, digits)},
         {"same_value_rate",
          number(t.sifted() ? static_cast<double>(same) / static_cast<double>(t.sifted()) : 0.0, digits)}};
  const auto info = empirical_mutual_info(t);
  j["units"] = u.name();
  j["i_ab_hat"] = number(u(info.i_ab_hat), digits);
  j["i_ae_hat"] = number(u(info.i_ae_hat), digits);
  j["nu_hat"] = number(u(info.nu_hat), digits);
  j["low_statistics"] = info.low_statistics;
  if (t.config.eve_active() && t.sifted() > 0) {
    const auto acc = eve_accuracy(t);
    j["eve_accuracy"] = {{"overall", number(acc.overall, digits)},
                         {"given_equal", number(acc.given_equal, digits)},
                         {"given_unequal", number(acc.given_unequal, digits)}};
  }
  return j;
}

// Per-round dump; refused above kMaxRoundDump rounds.
inline json rounds_json(const ProtocolTranscript& t) {
  if (t.rounds.size() > kMaxRoundDump) throw invalid_params("round dump is limited to 100000 rounds");
  json arr = json::array();
  for (const auto& r : t.rounds) {
    json e{{"alice_m", r.alice_m}, {"bob_m", r.bob_m}, {"alice_k", r.alice_k}, {"bob_l", r.bob_l}};
    if (r.has_eve()) e["eve"] = {r.eve_k, r.eve_l};
    if (r.matched()) e["sacrificed"] = r.sacrificed;
    arr.push_back(std::move(e));
  }
  return arr;
}

inline void write_counts_csv(std::ostream& out, const CountTensor& counts) {
  out << "alice_basis,bob_basis,alice_nit,bob_nit,count\n";
  const int n = counts.n();
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out << a << ',' << b << ',' << k << ',' << l << ',' << counts(a, b, k, l) << '\n';
}

}  // namespace tqkd::io

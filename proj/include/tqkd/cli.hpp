// Command-line front end: threshold tables, yield curves, bases export and
// end-to-end protocol simulation.
//
// Exit codes: 0 success / key accepted, 1 usage or configuration error,
// 2 tomography rejected the source.
#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tqkd/io.hpp"
#include "tqkd/mub.hpp"
#include "tqkd/protocol.hpp"
#include "tqkd/security.hpp"
#include "tqkd/tomography.hpp"

namespace tqkd::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "TQKD_OUTPUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRejected = 2 };

using nlohmann::json;

struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline json manifest(const std::string& command, json config, std::uint64_t seed, const std::vector<std::string>& outputs) {
  return {{"tool", "tqkd"},
          {"version", kVersion},
          {"command", command},
          {"config", std::move(config)},
          {"seed", seed},
          {"outputs", outputs}};
}

inline std::string default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

// Writes `body` to `path` or to `out` when no path is given. CSV files get a
// sidecar <path>.manifest.json.
inline void emit(const std::string& body, const std::string& path, const json& manifest_json, bool csv,
                 std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(path);
  if (!f) throw usage_error("cannot write " + path);
  f << body;
  if (csv) {
    std::ofstream m(path + ".manifest.json");
    if (!m) throw usage_error("cannot write " + path + ".manifest.json");
    m << manifest_json.dump(2) << '\n';
  }
}

struct ThresholdOptions {
  std::vector<int> n{2, 3, 4, 5, 10, 30, 50, 100};
  std::vector<double> nu{0.0, 0.5};
  std::string format = "csv";
  int precision = io::kDefaultPrecision;
  std::string output;
};

inline int cmd_thresholds(const ThresholdOptions& o, std::ostream& out) {
  for (int n : o.n)
    if (n < 2) throw usage_error("--n values must be at least 2");
  for (double nu : o.nu)
    if (!(nu >= 0.0 && nu < 1.0)) throw usage_error("--nu values must lie in [0, 1)");

  json rows = json::array();
  std::ostringstream csv;
  csv << std::setprecision(o.precision);
  csv << "n,nu,beta0,n_beta1_over_beta0,eta1_over_eta0,beta0_approx,approx_rel_error\n";
  for (int n : o.n)
    for (double nu : o.nu) {
      const auto t = threshold_beta0(n, nu);
      const double approx = beta0_approx(n, nu);
      const double rel = std::abs(approx - t.beta0) / t.beta0;
      csv << n << ',' << nu << ',' << t.beta0 << ',' << t.n_beta1_over_beta0 << ',' << t.eta1_over_eta0 << ','
          << approx << ',' << rel << '\n';
      rows.push_back({{"n", n},
                      {"nu", nu},
                      {"beta0", io::number(t.beta0, o.precision)},
                      {"n_beta1_over_beta0", io::number(t.n_beta1_over_beta0, o.precision)},
                      {"eta1_over_eta0", io::number(t.eta1_over_eta0, o.precision)},
                      {"beta0_approx", io::number(approx, o.precision)},
                      {"approx_rel_error", io::number(rel, o.precision)}});
    }
  const auto m = manifest("thresholds", {{"n", o.n}, {"nu", o.nu}, {"format", o.format}, {"precision", o.precision}}, 0,
                          o.output.empty() ? std::vector<std::string>{} : std::vector<std::string>{o.output});
  if (o.format == "json") {
    json doc{{"schema_version", io::kSchemaVersion}, {"manifest", m}, {"rows", std::move(rows)}};
    emit(doc.dump(2) + "\n", o.output, m, false, out);
  } else {
    emit(csv.str(), o.output, m, true, out);
  }
  return kExitOk;
}

struct CurveOptions {
  std::vector<int> n{2, 3, 5, 10, 100};
  int points = 201;
  std::string format = "csv";
  bool bits = false;
  int precision = io::kDefaultPrecision;
  std::string output;
};

// nu(beta0) sampled uniformly on [1/n, 1], endpoints included.
inline int cmd_yield_curve(const CurveOptions& o, std::ostream& out) {
  if (o.points < 2) throw usage_error("--points must be at least 2");
  for (int n : o.n)
    if (n < 2) throw usage_error("--n values must be at least 2");

  std::ostringstream csv;
  csv << std::setprecision(o.precision);
  csv << "n,beta0,i_ab,i_ae,nu\n";
  json rows = json::array();
  for (int n : o.n) {
    const io::Units u{n, o.bits};
    for (int i = 0; i < o.points; ++i) {
      const double lo = 1.0 / n;
      const double beta0 = i + 1 == o.points ? 1.0 : lo + (1.0 - lo) * i / (o.points - 1);
      const auto r = ck_yield(ChannelParams::from_beta0(n, beta0));
      csv << n << ',' << beta0 << ',' << u(r.i_ab) << ',' << u(r.i_ae) << ',' << u(r.nu) << '\n';
      rows.push_back({{"n", n},
                      {"beta0", io::number(beta0, o.precision)},
                      {"i_ab", io::number(u(r.i_ab), o.precision)},
                      {"i_ae", io::number(u(r.i_ae), o.precision)},
                      {"nu", io::number(u(r.nu), o.precision)}});
    }
  }
  const auto m = manifest("yield-curve",
                          {{"n", o.n}, {"points", o.points}, {"bits", o.bits}, {"format", o.format}, {"precision", o.precision}},
                          0, o.output.empty() ? std::vector<std::string>{} : std::vector<std::string>{o.output});
  if (o.format == "json") {
    json doc{{"schema_version", io::kSchemaVersion}, {"manifest", m}, {"units", o.bits ? "bits" : "nits"}, {"rows", std::move(rows)}};
    emit(doc.dump(2) + "\n", o.output, m, false, out);
  } else {
    emit(csv.str(), o.output, m, true, out);
  }
  return kExitOk;
}

struct SimulateOptions {
  int n = 3;
  std::optional<double> beta0;
  std::optional<double> ratio;
  std::uint64_t pairs = 1000000;
  std::uint64_t seed = 0;
  double sacrifice = kDefaultSacrificeFraction;
  std::string eve = "on";
  std::string override_state;
  unsigned threads = 1;
  double k_sigma = 5.0;
  std::string out_dir;
  std::string report = "simulate_report.json";
  bool counts_csv = false;
  bool dump_rounds = false;
  bool bits = false;
  int precision = io::kDefaultPrecision;
};

inline SimConfig make_config(const SimulateOptions& o) {
  if (o.beta0 && o.ratio) throw usage_error("give either --beta0 or --ratio, not both");
  if (o.eve != "on" && o.eve != "off") throw usage_error("--eve must be 'on' or 'off'");
  SimConfig c;
  c.n = o.n;
  c.pairs = o.pairs;
  c.seed = o.seed;
  c.sacrifice = o.sacrifice;
  c.threads = o.threads;
  c.eve_enabled = o.eve == "on";
  if (!o.override_state.empty()) {
    c.state_override = io::read_state_file(o.override_state, o.n);
    c.beta0 = o.beta0.value_or(1.0);
  } else if (o.beta0) {
    c.beta0 = *o.beta0;
  } else if (o.ratio) {
    if (o.n < 2) throw unsupported_dimension(o.n);
    c.beta0 = params_from_ratio(o.n, *o.ratio).beta0;
  } else {
    throw usage_error("one of --beta0, --ratio or --override-state is required");
  }
  c.validate();
  return c;
}

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const SimConfig cfg = make_config(o);
  const auto family = build_basis_family(cfg.n);
  const auto transcript = run_protocol(cfg, family);
  const int digits = o.precision;
  const io::Units units{cfg.n, o.bits};

  const std::filesystem::path dir = o.out_dir.empty() ? default_output_dir() : o.out_dir;
  std::filesystem::create_directories(dir);
  std::vector<std::string> outputs{(dir / o.report).string()};
  if (o.counts_csv) outputs.push_back((dir / "counts.csv").string());

  json config = io::config_json(cfg);
  config["threads"] = o.threads;
  config["k_sigma"] = o.k_sigma;
  config["bits"] = o.bits;
  config["precision"] = o.precision;

  json report{{"schema_version", io::kSchemaVersion}, {"manifest", manifest("simulate", config, cfg.seed, outputs)}};
  if (!cfg.state_override) {
    const auto p = cfg.params();
    const auto s = srm_parameters(p);
    report["analytic"] = {{"security", io::security_json(ck_yield(p), digits, units)},
                          {"r0", io::number(s.r0, digits)},
                          {"r1", io::number(s.r1, digits)},
                          {"eta0", io::number(s.eta0, digits)},
                          {"eta1", io::number(s.eta1, digits)},
                          {"matched_fraction", io::number(1.0 / (cfg.n + 1), digits)},
                          {"eve_overall_accuracy", io::number(1.0 - p.beta0 + p.beta0 * s.eta0, digits)}};
  }
  report["empirical"] = io::transcript_summary_json(transcript, digits, units);
  if (o.dump_rounds) report["rounds"] = io::rounds_json(transcript);

  const auto outcome = acceptance_pipeline(transcript, family, TomographyOptions{o.k_sigma, 1e-8});
  report["tomography"] = io::tomography_json(outcome.tomography, cfg.n, digits);
  report["verdict"] = outcome.params ? "accepted" : "rejected";
  if (outcome.params) {
    const auto security = ck_yield(*outcome.params);
    report["security"] = io::security_json(security, digits, units);
    const auto info = empirical_mutual_info(transcript);
    const bool plugin = std::isfinite(info.nu_hat);
    const double nu_used = plugin ? info.nu_hat : security.nu;
    const auto net_raw = transcript.net_raw_key();
    report["key"] = {{"sifted", transcript.sifted()},
                     {"sacrificed", transcript.sacrificed()},
                     {"net_raw", net_raw},
                     {"nu_source", plugin ? "empirical" : "tomography"},
                     {"nu", io::number(nu_used, digits)},
                     {"net_key_length", static_cast<std::uint64_t>(std::floor(std::max(0.0, nu_used) * net_raw))}};
  }

  const std::string text = report.dump(2) + "\n";
  {
    std::ofstream f(dir / o.report);
    if (!f) throw usage_error("cannot write " + (dir / o.report).string());
    f << text;
  }
  if (o.counts_csv) {
    std::ofstream f(dir / "counts.csv");
    io::write_counts_csv(f, transcript.counts);
  }
  out << text;
  return outcome.params ? kExitOk : kExitRejected;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Tomographic qunit QKD: security thresholds and protocol simulation", "tqkd"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  detail::ThresholdOptions th;
  auto* thresholds = app.add_subcommand("thresholds", "Threshold beta0 for given CK yields");
  thresholds->add_option("--n", th.n, "Dimensions")->delimiter(',')->capture_default_str();
  thresholds->add_option("--nu", th.nu, "Target yields in [0, 1)")->delimiter(',')->capture_default_str();
  thresholds->add_option("--format", th.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  thresholds->add_option("--precision", th.precision, "Significant digits")->check(CLI::Range(1, 17));
  thresholds->add_option("--output", th.output, "Output file (default stdout)");

  detail::CurveOptions cv;
  auto* curve = app.add_subcommand("yield-curve", "nu as a function of beta0");
  curve->add_option("--n", cv.n, "Dimensions")->delimiter(',')->capture_default_str();
  curve->add_option("--points", cv.points, "Grid points per curve")->capture_default_str();
  curve->add_option("--format", cv.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  curve->add_flag("--bits", cv.bits, "Report information in bits instead of nits");
  curve->add_option("--precision", cv.precision, "Significant digits")->check(CLI::Range(1, 17));
  curve->add_option("--output", cv.output, "Output file (default stdout)");

  int bases_n = 2;
  auto* bases = app.add_subcommand("bases", "Export the basis family as JSON");
  bases->add_option("--n", bases_n, "Prime dimension")->required();

  detail::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the protocol end to end");
  simulate->add_option("--n", sim.n, "Prime dimension (<= 7)")->capture_default_str();
  simulate->add_option("--beta0", sim.beta0, "Matched-basis agreement probability");
  simulate->add_option("--ratio,--beta0-ratio", sim.ratio, "beta1/beta0 in [0, 1]");
  simulate->add_option("--pairs", sim.pairs, "Number of emitted pairs")->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--sacrifice", sim.sacrifice, "Fraction of matched rounds used for tomography")
      ->capture_default_str();
  simulate->add_option("--eve", sim.eve, "on|off")->capture_default_str();
  simulate->add_option("--override-state", sim.override_state, "JSON file with an explicit two-qunit state");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  simulate->add_option("--k-sigma", sim.k_sigma, "Tomography acceptance width")->capture_default_str();
  simulate->add_option("--out", sim.out_dir, std::string("Output directory (default $") + kOutputDirEnv + " or .)");
  simulate->add_option("--report", sim.report, "Report file name")->capture_default_str();
  simulate->add_flag("--counts-csv", sim.counts_csv, "Also write the count tensor as CSV");
  simulate->add_flag("--dump-rounds", sim.dump_rounds, "Include per-round records (<= 100000 rounds)");
  simulate->add_flag("--bits", sim.bits, "Report information in bits instead of nits");
  simulate->add_option("--precision", sim.precision, "Significant digits")->check(CLI::Range(1, 17));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (thresholds->parsed()) return detail::cmd_thresholds(th, out);
    if (curve->parsed()) return detail::cmd_yield_curve(cv, out);
    if (bases->parsed()) {
      out << io::basis_family_json(build_basis_family(bases_n)).dump(2) << '\n';
      return kExitOk;
    }
    if (simulate->parsed()) return detail::cmd_simulate(sim, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"tqkd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tqkd::cli

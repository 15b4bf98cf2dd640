// Linear-inversion state tomography from basis-pair frequencies, and the
// acceptance test against the one-parameter state family.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tqkd/channel.hpp"
#include "tqkd/errors.hpp"
#include "tqkd/linalg.hpp"
#include "tqkd/mub.hpp"
#include "tqkd/protocol.hpp"

namespace tqkd {

// Unknowns: diagonal entries rho_ii for i < N-1 (the last one is fixed by unit
// trace), then Re and Im of rho_ij for every i < j. N = n^2.
inline CMatrix invert_probabilities(const ProbabilityTable& p, const BasisFamily& f) {
  const int n = f.n;
  if (p.n() != n) throw dimension_mismatch("invert_probabilities: table dimension differs from basis family");
  const std::size_t dim = static_cast<std::size_t>(n * n);
  const std::size_t unknowns = dim * dim - 1;
  const std::size_t rows = static_cast<std::size_t>((n + 1) * (n + 1)) * dim;
  RMatrix a(rows, unknowns);
  RVector rhs(rows);

  std::size_t row = 0;
  for (int ai = 0; ai <= n; ++ai)
    for (int bi = 0; bi <= n; ++bi)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l, ++row) {
          const auto u = tensor_product(f.alice[ai][k], f.bob[bi][l]);
          const double last = std::norm(u[dim - 1]);
          for (std::size_t i = 0; i + 1 < dim; ++i) a(row, i) = std::norm(u[i]) - last;
          std::size_t col = dim - 1;
          for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i + 1; j < dim; ++j) {
              const complex c = std::conj(u[i]) * u[j];
              a(row, col++) = 2.0 * c.real();
              a(row, col++) = -2.0 * c.imag();
            }
          rhs[row] = p(ai, bi, k, l) - last;
        }

  const auto sol = lstsq_real(std::move(a), std::move(rhs));
  CMatrix rho(dim, dim);
  double diag_sum = 0.0;
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    rho(i, i) = sol.x[i];
    diag_sum += sol.x[i];
  }
  rho(dim - 1, dim - 1) = 1.0 - diag_sum;
  std::size_t col = dim - 1;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      const complex v{sol.x[col], sol.x[col + 1]};
      col += 2;
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
    }
  return rho;
}

inline CMatrix invert_state(const CountTensor& counts, const BasisFamily& f) {
  const int n = counts.n();
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      if (counts.pair_total(a, b) == 0)
        throw std::invalid_argument("invert_state: basis pair (" + std::to_string(a) + ", " + std::to_string(b) +
                                    ") has no samples");
  return invert_probabilities(frequencies(counts), f);
}

// Clip negative eigenvalues and renormalize.
inline CMatrix nearest_state(const CMatrix& rho) {
  const auto e = hermitian_eigen(rho);
  double total = 0.0;
  for (double v : e.values) total += std::max(0.0, v);
  if (total <= 0.0) throw std::runtime_error("nearest_state: no positive eigenvalue");
  return hermitian_function(e, [total](double v) { return std::max(0.0, v) / total; });
}

struct TomographyOptions {
  double k_sigma = 5.0;    // allowed standardized deviation per cell
  double abs_floor = 1e-8; // allowed absolute deviation when sigma vanishes
};

struct TomographyResult {
  CMatrix rho_hat;
  CMatrix rho_proj;
  double beta0_hat = 0.0;
  double residual = 0.0;         // max |predicted - family| over all cells
  double max_deviation_z = 0.0;  // max |observed - family| / sigma_cell
  double sigma_scale = 0.0;      // largest per-cell standard error
  bool accepted = false;
  TomographyOptions options;
  std::vector<double> pair_max_deviation;  // per basis pair a*(n+1)+b, observed vs family
};

// Family prediction for cell (a, b, k, l) at the given beta0.
inline double family_cell_probability(int n, double beta0, int a, int b, int k, int l) {
  if (a != b) return 1.0 / (static_cast<double>(n) * n);
  const double beta1 = (1.0 - beta0) / (n - 1);
  return (k == l ? beta0 : beta1) / n;
}

// beta0_hat minimizes the squared deviation between rho_hat's predictions and
// the family; with unit trace this is the mean matched-basis agreement rate.
// Acceptance compares observed frequencies with the fitted family cell by cell.
inline TomographyResult fit_family(const CMatrix& rho_hat, const BasisFamily& f, const ProbabilityTable& observed,
                                   const std::vector<double>& sample_sizes, const TomographyOptions& opt = {}) {
  const int n = f.n;
  if (observed.n() != n) throw dimension_mismatch("fit_family: table dimension differs from basis family");
  if (sample_sizes.size() != static_cast<std::size_t>((n + 1) * (n + 1)))
    throw dimension_mismatch("fit_family: need one sample size per basis pair");

  TomographyResult r;
  r.options = opt;
  r.rho_hat = rho_hat;
  r.rho_proj = nearest_state(rho_hat);
  const auto predicted = born_probabilities(rho_hat, f);

  double agree = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int k = 0; k < n; ++k) agree += predicted(a, a, k, k);
  r.beta0_hat = std::clamp(agree / (n + 1), 1.0 / n, 1.0);

  r.accepted = true;
  r.pair_max_deviation.assign(sample_sizes.size(), 0.0);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      const std::size_t pair = observed.pair_index(a, b);
      const double samples = sample_sizes[pair];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double fam = family_cell_probability(n, r.beta0_hat, a, b, k, l);
          r.residual = std::max(r.residual, std::abs(predicted(a, b, k, l) - fam));
          const double dev = std::abs(observed(a, b, k, l) - fam);
          const double sigma = samples > 0 ? std::sqrt(fam * (1.0 - fam) / samples) : 0.0;
          r.sigma_scale = std::max(r.sigma_scale, sigma);
          r.pair_max_deviation[pair] = std::max(r.pair_max_deviation[pair], dev);
          if (sigma > 0.0) {
            r.max_deviation_z = std::max(r.max_deviation_z, dev / sigma);
          } else if (dev > opt.abs_floor) {
            r.max_deviation_z = std::numeric_limits<double>::infinity();
          }
          if (dev > std::max(opt.k_sigma * sigma, opt.abs_floor)) r.accepted = false;
        }
    }
  return r;
}

struct PipelineOutcome {
  TomographyResult tomography;
  std::optional<ChannelParams> params;  // set only when accepted
};

inline PipelineOutcome acceptance_pipeline(const ProtocolTranscript& t, const BasisFamily& f,
                                           const TomographyOptions& opt = {}) {
  const auto& counts = t.tomography_counts;
  const int n = counts.n();
  std::vector<double> sizes;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) sizes.push_back(static_cast<double>(counts.pair_total(a, b)));
  PipelineOutcome out;
  out.tomography = fit_family(invert_state(counts, f), f, frequencies(counts), sizes, opt);
  if (out.tomography.accepted) out.params = ChannelParams::from_beta0(n, out.tomography.beta0_hat);
  return out;
}

}  // namespace tqkd

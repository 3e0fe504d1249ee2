// Validation statistics: Gaussian KDE, the kernel-smoothed true pdf (two
// independent routes), Kolmogorov-Smirnov wrappers, and the repeated
// acceptance-count experiment.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "templev/density.hpp"
#include "templev/ks.hpp"
#include "templev/sampler.hpp"

namespace templev {

struct KdeResult {
  double bandwidth = 0.0;
  std::vector<double> eval_grid;
  std::vector<double> density_estimates;
};

// Gaussian-kernel density estimate on an evaluation grid.
inline KdeResult kde(const std::vector<double>& sample, double bandwidth,
                     const std::vector<double>& grid) {
  if (sample.empty()) throw EmptySample("kde: empty sample");
  if (!(bandwidth > 0.0)) throw Error("kde: bandwidth must be positive");
  KdeResult out;
  out.bandwidth = bandwidth;
  out.eval_grid = grid;
  out.density_estimates.resize(grid.size(), 0.0);
  const double norm = 1.0 / (sample.size() * bandwidth * std::sqrt(2.0 * pi));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0.0;
    for (double s : sample) {
      const double u = (grid[i] - s) / bandwidth;
      acc += std::exp(-0.5 * u * u);
    }
    out.density_estimates[i] = acc * norm;
  }
  return out;
}

// Silverman's rule for runs where no bandwidth is prescribed.
inline double silverman_bandwidth(std::vector<double> sample) {
  if (sample.empty()) throw EmptySample("silverman_bandwidth: empty sample");
  const double n = static_cast<double>(sample.size());
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : sample) var += (v - mean) * (v - mean);
  var /= std::max(n - 1.0, 1.0);
  std::sort(sample.begin(), sample.end());
  const double iqr = sample[std::size_t(0.75 * (n - 1))] - sample[std::size_t(0.25 * (n - 1))];
  const double spread = std::min(std::sqrt(var), iqr / 1.34898);
  return 0.9 * (spread > 0.0 ? spread : std::sqrt(var)) * std::pow(n, -0.2);
}

// True pdf smoothed by the Gaussian kernel, via the characteristic function:
// multiply exp(t C(z)) by exp(-(h z)^2 / 2) before inversion.
inline std::vector<double> smooth_pdf(const Exponent& e, double t, double bandwidth,
                                      const std::vector<double>& grid) {
  const Exponent base =
      e.expensive_eval
          ? tabulated_exponent(e, detail::cf_cutoff(e, t, 1e-18))
          : e;
  Exponent smoothed = base;
  const auto base_eval = base.eval;
  const double h2_over_t = bandwidth * bandwidth / (2.0 * t);
  smoothed.eval = [base_eval, h2_over_t](double z) {
    return base_eval(z) - std::complex<double>(h2_over_t * z * z, 0.0);
  };
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(pdf(smoothed, t, x));
  return out;
}

// Convolution route for the same quantity, used as the independent check:
// int f_t(y) N(x - y; h) dy by adaptive quadrature over the kernel support.
inline double smooth_pdf_convolution(const Exponent& e, double t, double bandwidth,
                                     double x) {
  const Exponent base =
      e.expensive_eval
          ? tabulated_exponent(e, detail::cf_cutoff(e, t, 1e-18))
          : e;
  auto integrand = [&](double y) {
    const double u = (x - y) / bandwidth;
    return pdf(base, t, y) * std::exp(-0.5 * u * u) /
           (bandwidth * std::sqrt(2.0 * pi));
  };
  QuadOptions opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-9;
  const QuadResult r =
      integrate_adaptive(integrand, x - 8.5 * bandwidth, x + 8.5 * bandwidth, opt);
  if (!r.converged) throw QuadratureFailure("smooth_pdf_convolution did not converge");
  return r.value;
}

// Repeated fixed-proposal screening: distribution of accepted counts.
struct AcceptanceSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  std::vector<std::uint64_t> counts;
};

inline AcceptanceSummary acceptance_summary(std::size_t replications,
                                            std::size_t proposals,
                                            const RejectionContext& ctx,
                                            std::uint64_t seed) {
  AcceptanceSummary out;
  out.counts.reserve(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    Rng derive = Rng::substream(seed, r);
    const SampleBatch batch = rejection_screen(ctx, proposals, derive.next_u64());
    out.counts.push_back(batch.accepted);
  }
  if (out.counts.empty()) return out;
  out.min = *std::min_element(out.counts.begin(), out.counts.end());
  out.max = *std::max_element(out.counts.begin(), out.counts.end());
  double mean = 0.0;
  for (auto c : out.counts) mean += double(c);
  mean /= double(out.counts.size());
  double var = 0.0;
  for (auto c : out.counts) var += (double(c) - mean) * (double(c) - mean);
  var /= std::max<double>(double(out.counts.size()) - 1.0, 1.0);
  out.mean = mean;
  out.sd = std::sqrt(var);
  return out;
}

// Pointwise spread of the KDE over repeated screening runs; the band a
// single run is expected to stay inside.
struct KdeEnvelope {
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> lo;  // 2.5%
  std::vector<double> hi;  // 97.5%
};

inline KdeEnvelope kde_envelope(const RejectionContext& ctx, std::size_t replications,
                                std::size_t proposals, double bandwidth,
                                const std::vector<double>& grid, std::uint64_t seed) {
  const std::size_t m = grid.size();
  std::vector<std::vector<double>> all(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    Rng derive = Rng::substream(seed, r);
    const SampleBatch batch = rejection_screen(ctx, proposals, derive.next_u64());
    all[r] = kde(batch.values, bandwidth, grid).density_estimates;
  }
  KdeEnvelope env;
  env.mean.assign(m, 0.0);
  env.sd.assign(m, 0.0);
  env.lo.assign(m, 0.0);
  env.hi.assign(m, 0.0);
  std::vector<double> column(replications);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < replications; ++r) column[r] = all[r][j];
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= double(replications);
    double var = 0.0;
    for (double v : column) var += (v - mean) * (v - mean);
    var /= std::max<double>(double(replications) - 1.0, 1.0);
    std::sort(column.begin(), column.end());
    env.mean[j] = mean;
    env.sd[j] = std::sqrt(var);
    env.lo[j] = column[std::size_t(0.025 * (replications - 1))];
    env.hi[j] = column[std::size_t(0.975 * (replications - 1))];
  }
  return env;
}

}  // namespace templev

// Random generation: stable increments by the Chambers-Mallows-Stuck
// transform, rejection sampling of tempered increments from stable
// proposals, time splitting, path assembly, the big-jump compound Poisson
// process, and the quantile-inversion baseline.
//
// Batch determinism: output value i consumes only Rng::substream(seed, i),
// so batches are reproducible and partition freely across workers.
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "templev/charfn.hpp"
#include "templev/common.hpp"
#include "templev/density.hpp"
#include "templev/ks.hpp"
#include "templev/model.hpp"
#include "templev/rng.hpp"

namespace templev {

struct SampleBatch {
  std::uint64_t seed = 0;
  std::vector<double> values;
  std::uint64_t proposals_used = 0;
  std::uint64_t accepted = 0;
};

struct RejectionPlan {
  double t_total = 1.0;
  int n_splits = 1;
  double dt = 1.0;
  double eta = 0.0;
  double expected_iterations = 1.0;
};

// Integer split count near t*eta minimizing n e^{t eta / n}; ties toward
// the smaller n (fewer density evaluations per accepted draw).
inline RejectionPlan optimal_split(double t, double eta_v) {
  if (!(t > 0.0)) throw Error("optimal_split: t must be positive");
  RejectionPlan plan;
  plan.t_total = t;
  plan.eta = eta_v;
  const double target = t * eta_v;
  int n = 1;
  if (target > 1.0) {
    const int lo = static_cast<int>(std::floor(target));
    const int hi = static_cast<int>(std::ceil(target));
    auto cost = [&](int m) { return m * std::exp(target / m); };
    n = (cost(lo) <= cost(hi)) ? lo : hi;
  }
  plan.n_splits = n;
  plan.dt = t / n;
  plan.expected_iterations = n * std::exp(target / n);
  return plan;
}

// One stable draw at time t through the CMS transform. Parameterization
// bridge: gamma^alpha = (sigma_+ + sigma_-) K(alpha), beta = (s+ - s-)/(s+ + s-),
// location b*t; consumes exactly two uniforms. The symmetric alpha = 1 case
// is the Cauchy law with scale t sigma_tot pi/2.
inline double sample_stable_one(const StableParams& p, double t, Rng& rng) {
  const double alpha = p.alpha;
  const double beta = p.beta_skew();
  const double v = pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0 && beta == 0.0) {
    return t * p.sigma_total() * (pi / 2.0) * std::tan(v) + p.b * t;
  }
  const double gamma_t =
      std::pow(p.sigma_total() * stable_cosine_constant(alpha) * t, 1.0 / alpha);
  double x;
  if (beta == 0.0) {
    x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  } else {
    const double tb = beta * std::tan(pi * alpha / 2.0);
    const double b0 = std::atan(tb) / alpha;
    const double s0 = std::pow(1.0 + tb * tb, 0.5 / alpha);
    x = s0 * std::sin(alpha * (v + b0)) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - alpha * (v + b0)) / w, (1.0 - alpha) / alpha);
  }
  return gamma_t * x + p.b * t;
}

inline SampleBatch sample_stable(const StableParams& p, double t, std::size_t n,
                                 std::uint64_t seed) {
  if (p.alpha == 1.0 && !p.symmetric())
    throw UnsupportedAlpha("sample_stable: skewed alpha = 1 not supported");
  SampleBatch batch;
  batch.seed = seed;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    batch.values.push_back(sample_stable_one(p, t, rng));
  }
  batch.accepted = batch.proposals_used = n;
  return batch;
}

// Bound densities + exponents for the Algorithm 1 acceptance test at one t.
// With grids attached density calls interpolate; otherwise they run the
// direct Fourier quadrature.
struct RejectionContext {
  ModelSpec spec;
  double t = 1.0;
  double eta = 0.0;
  Exponent stable_exp;
  Exponent tempered_exp;
  const DensityGrid* stable_grid = nullptr;
  const DensityGrid* tempered_grid = nullptr;

  double f_stable(double x) const {
    return stable_grid ? stable_grid->pdf_at(x) : pdf(stable_exp, t, x);
  }
  double f_tempered(double x) const {
    return tempered_grid ? tempered_grid->pdf_at(x) : pdf(tempered_exp, t, x);
  }

  // e^{-eta t} f~_t(y) / f_t(y); the decomposition bound keeps it <= 1.
  // Breaches beyond the 1e-6 slack signal a density or eta bug when both
  // densities are solidly resolved. Deep in the tails the direct quadrature
  // degrades to its noise floor; there an estimate indistinguishable from
  // zero collapses the ratio, and the remainder clamps into [0, 1].
  double acceptance_ratio(double y) const {
    double fs, ft, es = 0.0, et = 0.0;
    if (stable_grid) {
      fs = stable_grid->pdf_at(y);
    } else {
      const PdfEstimate p = pdf_with_error(stable_exp, t, y);
      fs = p.value;
      es = p.error;
    }
    if (tempered_grid) {
      ft = tempered_grid->pdf_at(y);
    } else {
      const PdfEstimate p = pdf_with_error(tempered_exp, t, y);
      ft = p.value;
      et = p.error;
    }
    const bool solid = fs > 1e-5 && ft > 1e-5 && es < 1e-2 * fs && et < 1e-2 * ft;
    const double scale = std::exp(-eta * t);
    if (solid || (stable_grid && tempered_grid)) {
      const double ratio = fs > 0.0 ? scale * ft / fs : (ft > 0.0 ? 2.0 : 0.0);
      if (ratio > 1.0 + 1e-6) {
        if (fs < 1e-5 && ft < 1e-5) return std::min(ratio, 1.0);
        throw RatioAboveOne("acceptance ratio " + std::to_string(ratio) + " at y = " +
                            std::to_string(y));
      }
      return ratio;
    }
    if (ft <= 4.0 * et) ft = 0.0;  // tempered density lost in the noise
    const double ratio = fs > 0.0 ? scale * ft / fs : 0.0;
    return std::clamp(ratio, 0.0, 1.0);
  }
};

inline RejectionContext make_rejection_context(const ModelSpec& spec, double t,
                                               const DensityGrid* stable_grid = nullptr,
                                               const DensityGrid* tempered_grid = nullptr) {
  RejectionContext ctx;
  ctx.spec = spec;
  ctx.t = t;
  ctx.eta = eta_or_throw(spec);
  ctx.stable_exp = stable_exponent(spec.stable);
  ctx.tempered_exp = tempered_exponent_auto(spec);
  if (!tempered_grid && ctx.tempered_exp.expensive_eval) {
    // direct density calls would otherwise re-run the polar quadrature per
    // CF evaluation
    ctx.tempered_exp =
        tabulated_exponent(ctx.tempered_exp, detail::cf_cutoff(ctx.tempered_exp, t, 1e-18));
  }
  ctx.stable_grid = stable_grid;
  ctx.tempered_grid = tempered_grid;
  return ctx;
}

namespace detail {

// One Algorithm-1 iteration: propose Y ~ f_t, draw U, accept on
// U <= e^{-eta t} f~_t(Y)/f_t(Y). Three uniforms per proposal.
inline bool rejection_step(const RejectionContext& ctx, Rng& rng, double& y_out) {
  const double y = sample_stable_one(ctx.spec.stable, ctx.t, rng);
  const double u = rng.uniform();
  y_out = y;
  return u <= ctx.acceptance_ratio(y);
}

}  // namespace detail

// n accepted tempered increments at time t (value i from substream i; the
// output is identical for any worker count).
inline SampleBatch rejection_sample_tempered(const RejectionContext& ctx, std::size_t n,
                                             std::uint64_t seed, int threads = 1) {
  SampleBatch batch;
  batch.seed = seed;
  batch.values.resize(n);
  std::vector<std::uint64_t> proposals(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng = Rng::substream(seed, i);
    double y = 0.0;
    do {
      ++proposals[i];
    } while (!detail::rejection_step(ctx, rng, y));
    batch.values[i] = y;
  });
  for (std::uint64_t p : proposals) batch.proposals_used += p;
  batch.accepted = n;
  return batch;
}

inline SampleBatch rejection_sample_tempered(const ModelSpec& spec, double t,
                                             std::size_t n, std::uint64_t seed,
                                             const DensityGrid* stable_grid = nullptr,
                                             const DensityGrid* tempered_grid = nullptr) {
  return rejection_sample_tempered(make_rejection_context(spec, t, stable_grid,
                                                          tempered_grid),
                                   n, seed);
}

// Fixed-proposal screening: m proposals, keep whatever is accepted (the
// protocol used by the replication experiments).
inline SampleBatch rejection_screen(const RejectionContext& ctx, std::size_t proposals,
                                    std::uint64_t seed) {
  SampleBatch batch;
  batch.seed = seed;
  for (std::size_t i = 0; i < proposals; ++i) {
    Rng rng = Rng::substream(seed, i);
    double y = 0.0;
    if (detail::rejection_step(ctx, rng, y)) batch.values.push_back(y);
  }
  batch.proposals_used = proposals;
  batch.accepted = batch.values.size();
  return batch;
}

// Tweedie shortcut: acceptance ratio e^{-cY} with no density evaluation.
// On a shared stream this reproduces the generic decisions step for step.
inline SampleBatch tweedie_rejection(const ModelSpec& spec, double t, std::size_t n,
                                     std::uint64_t seed) {
  const auto* tw = std::get_if<TweedieExp>(&spec.tempering);
  if (!tw) throw Error("tweedie_rejection: model is not a Tweedie family");
  SampleBatch batch;
  batch.seed = seed;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    for (;;) {
      ++batch.proposals_used;
      const double y = sample_stable_one(spec.stable, t, rng);
      const double u = rng.uniform();
      if (u <= std::exp(-tw->c * y)) {
        batch.values.push_back(y);
        break;
      }
    }
  }
  batch.accepted = n;
  return batch;
}

// Tweedie draws at time t through splitting, summing e^{-cY}-screened
// increments at dt.
inline SampleBatch tweedie_sample_at_time(const ModelSpec& spec, double t, std::size_t n,
                                          std::uint64_t seed) {
  const auto* tw = std::get_if<TweedieExp>(&spec.tempering);
  if (!tw) throw Error("tweedie_sample_at_time: model is not a Tweedie family");
  const RejectionPlan plan = optimal_split(t, eta_or_throw(spec));
  SampleBatch batch;
  batch.seed = seed;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    double sum = 0.0;
    for (int k = 0; k < plan.n_splits; ++k) {
      for (;;) {
        ++batch.proposals_used;
        const double y = sample_stable_one(spec.stable, plan.dt, rng);
        const double u = rng.uniform();
        if (u <= std::exp(-tw->c * y)) {
          sum += y;
          break;
        }
      }
    }
    batch.values.push_back(sum);
  }
  batch.accepted = n;
  return batch;
}

// One draw of f~_t as a sum of n_splits increments at dt = t/n_splits.
inline SampleBatch sample_tempered_at_time(const ModelSpec& spec, double t, std::size_t n,
                                           std::uint64_t seed,
                                           const DensityGrid* stable_grid_dt = nullptr,
                                           const DensityGrid* tempered_grid_dt = nullptr) {
  const RejectionPlan plan = optimal_split(t, eta_or_throw(spec));
  const RejectionContext ctx =
      make_rejection_context(spec, plan.dt, stable_grid_dt, tempered_grid_dt);
  SampleBatch batch;
  batch.seed = seed;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    double sum = 0.0;
    for (int k = 0; k < plan.n_splits; ++k) {
      double y = 0.0;
      do {
        ++batch.proposals_used;
      } while (!detail::rejection_step(ctx, rng, y));
      sum += y;
    }
    batch.values.push_back(sum);
  }
  batch.accepted = n;
  return batch;
}

// Tempered path on an even mesh: partial sums of iid increments at dt.
inline std::vector<double> sample_path(const ModelSpec& spec, double dt,
                                       std::size_t n_steps, std::uint64_t seed,
                                       const DensityGrid* stable_grid_dt = nullptr,
                                       const DensityGrid* tempered_grid_dt = nullptr) {
  const SampleBatch increments =
      rejection_sample_tempered(spec, dt, n_steps, seed, stable_grid_dt, tempered_grid_dt);
  std::vector<double> path(increments.values);
  for (std::size_t k = 1; k < path.size(); ++k) path[k] += path[k - 1];
  return path;
}

// ---------------------------------------------------------------------------
// Big-jump compound Poisson process

// Tabulated inverse cdf of the normalized removed-jump law rho_1: log-spaced
// nodes per direction, linear-in-mass inversion within segments.
class JumpSampler {
 public:
  explicit JumpSampler(const ModelSpec& spec, int nodes_per_direction = 4096) {
    const RadialJumpMeasure m = big_jump_measure(spec);
    const double p = family_p(spec.tempering);
    const double alpha = spec.stable.alpha;
    for (int side = 0; side < 2; ++side) {
      const double sigma_xi =
          side == 0 ? spec.stable.sigma_plus : spec.stable.sigma_minus;
      Direction& dir = dirs_[side];
      if (sigma_xi <= 0.0 || m.total_mass() <= 0.0) continue;
      const auto& dens = side == 0 ? m.density_pos : m.density_neg;
      const double mass = side == 0 ? m.mass_pos : m.mass_neg;
      if (mass <= 0.0) continue;
      // truncation below: density ~ sigma c r^{p-1-alpha}; above: <= sigma r^{-1-alpha}
      const double c0 = std::max(one_minus_q_over_rp(spec, 1e-6, side == 0 ? 1 : -1),
                                 1e-300);
      const double eps = 1e-10 * mass;
      double r_lo = std::pow(eps * (p - alpha) / (sigma_xi * c0), 1.0 / (p - alpha));
      double r_hi = std::pow(sigma_xi / (alpha * eps), 1.0 / alpha);
      r_lo = std::min(r_lo, 1e-3);
      r_hi = std::max(r_hi, 1e3);
      const int n = nodes_per_direction;
      dir.log_r.resize(n + 1);
      dir.cum.resize(n + 1);
      std::vector<double> g(n + 1);  // r * density(r), trapezoid in log r
      const double llo = std::log(r_lo), lhi = std::log(r_hi);
      for (int i = 0; i <= n; ++i) {
        dir.log_r[i] = llo + (lhi - llo) * i / n;
        const double r = std::exp(dir.log_r[i]);
        g[i] = r * dens(r);
      }
      dir.cum[0] = 0.0;
      for (int i = 1; i <= n; ++i) {
        const double h = dir.log_r[i] - dir.log_r[i - 1];
        dir.cum[i] = dir.cum[i - 1] + 0.5 * (g[i - 1] + g[i]) * h;
      }
      dir.total = dir.cum[n];
    }
  }

  double total_mass() const { return dirs_[0].total + dirs_[1].total; }

  // one jump from rho_1
  double sample(Rng& rng) const {
    const double total = total_mass();
    const double u = rng.uniform_open() * total;
    const bool positive = u <= dirs_[0].total;
    const Direction& dir = positive ? dirs_[0] : dirs_[1];
    const double target = positive ? u : u - dirs_[0].total;
    const auto it = std::upper_bound(dir.cum.begin(), dir.cum.end(), target);
    std::size_t i = std::max<std::ptrdiff_t>(std::distance(dir.cum.begin(), it) - 1, 0);
    i = std::min(i, dir.cum.size() - 2);
    const double seg = dir.cum[i + 1] - dir.cum[i];
    const double frac = seg > 0.0 ? (target - dir.cum[i]) / seg : 0.5;
    const double lr = dir.log_r[i] + frac * (dir.log_r[i + 1] - dir.log_r[i]);
    const double r = std::exp(lr);
    return positive ? r : -r;
  }

 private:
  struct Direction {
    std::vector<double> log_r;
    std::vector<double> cum;
    double total = 0.0;
  };
  Direction dirs_[2];
};

// V_t: N ~ Poisson(eta t) jumps drawn iid from rho_1.
inline std::pair<std::uint64_t, std::vector<double>> compound_poisson_sample(
    const JumpSampler& jumps, double eta_v, double t, Rng& rng) {
  const std::uint64_t n = rng.poisson(eta_v * t);
  std::vector<double> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(jumps.sample(rng));
  return {n, out};
}

inline std::pair<std::uint64_t, std::vector<double>> compound_poisson_sample(
    const ModelSpec& spec, double t, Rng& rng) {
  const double eta_v = eta_or_throw(spec);
  if (eta_v == 0.0) return {0, {}};
  const JumpSampler jumps(spec);
  return compound_poisson_sample(jumps, eta_v, t, rng);
}

// Draw n pairs (X~_t, V_t), sum them, and return the KS distance of the sums
// from the stable law at t: the decomposition says they recover it exactly.
inline KsResult recompose_check(const ModelSpec& spec, double t, std::size_t n,
                                std::uint64_t seed,
                                const RejectionContext& ctx,
                                const DensityGrid& stable_grid_t) {
  const double eta_v = eta_or_throw(spec);
  const JumpSampler jumps(spec);
  std::vector<double> sums;
  sums.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng_x = Rng::substream(seed, 2 * i);
    Rng rng_v = Rng::substream(seed, 2 * i + 1);
    double y = 0.0;
    while (!detail::rejection_step(ctx, rng_x, y)) {
    }
    double v_sum = 0.0;
    if (eta_v > 0.0) {
      auto [cnt, vjumps] = compound_poisson_sample(jumps, eta_v, t, rng_v);
      for (double j : vjumps) v_sum += j;
    }
    sums.push_back(y + v_sum);
  }
  return ks_statistic(sums, [&](double x) { return stable_grid_t.cdf_at(x); });
}

// Convenience form building its own grids and context.
inline KsResult recompose_check(const ModelSpec& spec, double t, std::size_t n,
                                std::uint64_t seed) {
  const DensityGrid gs = build_grid(stable_exponent(spec.stable), t);
  const DensityGrid gt = build_grid(tempered_exponent_auto(spec), t);
  const RejectionContext ctx = make_rejection_context(spec, t, &gs, &gt);
  return recompose_check(spec, t, n, seed, ctx, gs);
}

// Inversion baseline: quantile transform of substream uniforms.
inline SampleBatch inversion_sample(const DensityGrid& grid, std::size_t n,
                                    std::uint64_t seed) {
  SampleBatch batch;
  batch.seed = seed;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    batch.values.push_back(grid.quantile(rng.uniform_open()));
  }
  batch.accepted = batch.proposals_used = n;
  return batch;
}

}  // namespace templev

// Adaptive Gauss-Kronrod quadrature plus the oscillatory and semi-infinite
// integration helpers the characteristic-function machinery is built on.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "templev/common.hpp"

namespace templev {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1,1] (QUADPACK dqk15 constants).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kGK15KronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGK15GaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k15 = 0.0, g7 = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kGK15Nodes[i];
    const double y = f(c + dx) + f(c - dx);
    k15 += kGK15KronrodW[i] * y;
    if (i % 2 == 1) g7 += kGK15GaussW[i / 2] * y;
  }
  const double y0 = f(c);
  k15 += kGK15KronrodW[7] * y0;
  g7 += kGK15GaussW[3] * y0;
  value = k15 * h;
  const double d = std::fabs(k15 - g7) * std::fabs(h);
  // QUADPACK-style sharpening of the raw |K-G| estimate.
  const double scaled = std::pow(200.0 * d, 1.5);
  err = (scaled < d) ? scaled : d;
}

struct Segment {
  double a, b, value, error;
};

}  // namespace detail

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_segments = 512;
};

// Globally adaptive bisection on [a,b]; handles integrable endpoint
// singularities by geometric refinement (the Kronrod nodes are interior).
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              const QuadOptions& opt = {}) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::vector<detail::Segment> segs;
  segs.reserve(64);
  double v, e;
  detail::gk15(f, a, b, v, e);
  segs.push_back({a, b, v, e});
  res.evaluations = 15;
  double total = v, total_err = e;
  while (static_cast<int>(segs.size()) < opt.max_segments) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
    if (total_err <= tol) break;
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].error > segs[worst].error) worst = i;
    const detail::Segment s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    if (mid <= s.a || mid >= s.b) break;  // ran out of precision
    double v1, e1, v2, e2;
    detail::gk15(f, s.a, mid, v1, e1);
    detail::gk15(f, mid, s.b, v2, e2);
    res.evaluations += 30;
    total += (v1 + v2) - s.value;
    total_err += (e1 + e2) - s.error;
    segs[worst] = {s.a, mid, v1, e1};
    segs.push_back({mid, s.b, v2, e2});
  }
  res.value = total;
  res.error = std::fabs(total_err);
  res.converged =
      res.error <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)) * 1.001 + 1e-300;
  return res;
}

// int_0^b f(z) dz where f(z) ~ z^{gamma-1} near 0 (0 < gamma): the
// substitution z = u^{1/gamma} makes the integrand bounded at the origin.
template <class F>
QuadResult integrate_adaptive_power_sub(const F& f, double b, double gamma,
                                        const QuadOptions& opt = {}) {
  const double inv = 1.0 / gamma;
  auto g = [&](double u) {
    const double z = std::pow(u, inv);
    return f(z) * inv * std::pow(u, inv - 1.0);
  };
  return integrate_adaptive(g, 0.0, std::pow(b, gamma), opt);
}

// int_a^inf f(r) dr for |f| eventually decaying; sums octaves [c*2^k, c*2^{k+1}]
// until the octave contribution and the caller's analytic tail bound both pass
// below tolerance. tail_bound(R) must bound |int_R^inf f|.
template <class F, class TailBound>
QuadResult integrate_upper_decaying(const F& f, double a, const TailBound& tail_bound,
                                    const QuadOptions& opt = {}, int max_octaves = 140) {
  QuadResult res;
  double c = std::max(a, 1.0);
  double total = 0.0, total_err = 0.0;
  int evals = 0;
  if (a < c) {
    QuadResult head = integrate_adaptive(f, a, c, opt);
    total += head.value;
    total_err += head.error;
    evals += head.evaluations;
    if (!head.converged) {
      res = {total, total_err, evals, false};
      return res;
    }
  }
  for (int k = 0; k < max_octaves; ++k) {
    const double lo = c * std::ldexp(1.0, k);
    const double hi = c * std::ldexp(1.0, k + 1);
    QuadResult part = integrate_adaptive(f, lo, hi, opt);
    total += part.value;
    total_err += part.error;
    evals += part.evaluations;
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
    const double tb = tail_bound(hi);
    if (std::fabs(part.value) + tb < 0.5 * tol) {
      res = {total, total_err + tb, evals, true};
      return res;
    }
  }
  res = {total, total_err + tail_bound(c * std::ldexp(1.0, max_octaves)), evals, false};
  return res;
}

namespace detail {

// Averaging (Euler-transform) acceleration for eventually alternating series.
// Returns the extrapolated sum of partial_sums; err_out gets the last delta.
inline double accelerate_alternating(const std::vector<double>& partial_sums,
                                     double& err_out) {
  std::vector<double> row = partial_sums;
  double prev = row.back();
  const int levels = std::min<std::size_t>(row.size() - 1, 16);
  for (int j = 0; j < levels; ++j) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i)
      row[i] = 0.5 * (row[i] + row[i + 1]);
    row.pop_back();
    err_out = std::fabs(row.back() - prev);
    prev = row.back();
  }
  return prev;
}

}  // namespace detail

// int_a^inf g(r) * cos(omega*r + phase) dr for smooth g with decaying envelope.
// Integrates between consecutive zeros of the cosine and accelerates the
// resulting alternating series. envelope(r) must bound |g| on [r, inf).
template <class G, class Envelope>
QuadResult integrate_oscillatory_cos(const G& g, double omega, double phase, double a,
                                     const Envelope& envelope, const QuadOptions& opt = {},
                                     int max_half_periods = 512) {
  QuadResult res;
  omega = std::fabs(omega);
  const double half = pi / omega;
  auto integrand = [&](double r) { return g(r) * std::cos(omega * r + phase); };
  // First zero of cos(omega r + phase) at or after a.
  double k0 = std::ceil((omega * a + phase - pi / 2.0) / pi);
  double z = (pi / 2.0 + k0 * pi - phase) / omega;
  if (z < a) z += half;

  QuadOptions panel_opt = opt;
  panel_opt.abs_tol = opt.abs_tol * 0.1;
  panel_opt.max_segments = 64;

  double total = 0.0, total_err = 0.0;
  int evals = 0;
  QuadResult head = integrate_adaptive(integrand, a, z, panel_opt);
  total = head.value;
  total_err = head.error;
  evals = head.evaluations;

  std::vector<double> partial;
  partial.reserve(64);
  double sum_panels = 0.0;
  double prev_acc = std::numeric_limits<double>::quiet_NaN();
  int stable_runs = 0;
  for (int k = 0; k < max_half_periods; ++k) {
    QuadResult p = integrate_adaptive(integrand, z, z + half, panel_opt);
    evals += p.evaluations;
    total_err += p.error;
    sum_panels += p.value;
    partial.push_back(sum_panels);
    z += half;
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total + sum_panels));
    // For an alternating series the remainder is bounded by the first
    // omitted term, itself bounded by the envelope over one half-period.
    const double omitted_bound = envelope(z) * half;
    if (std::fabs(p.value) < 0.5 * tol && omitted_bound < 0.5 * tol) {
      res.value = total + sum_panels;
      res.error = total_err + omitted_bound;
      res.evaluations = evals;
      res.converged = true;
      return res;
    }
    if (partial.size() >= 8) {
      // accelerate the trailing window, where alternation has set in; demand
      // two consecutive stable extrapolations before trusting the estimate
      const std::size_t w = std::min<std::size_t>(partial.size(), 24);
      std::vector<double> window(partial.end() - w, partial.end());
      double acc_err = 0.0;
      const double acc = detail::accelerate_alternating(window, acc_err);
      const double drift = std::fabs(acc - prev_acc);
      if (!std::isnan(prev_acc) && drift + acc_err < tol) {
        if (stable_runs >= 1) {
          res.value = total + acc;
          res.error = total_err + acc_err + drift;
          res.evaluations = evals;
          res.converged = true;
          return res;
        }
        ++stable_runs;
      } else {
        stable_runs = 0;
      }
      prev_acc = acc;
    }
  }
  double acc_err = 0.0;
  const double acc = partial.empty() ? 0.0 : detail::accelerate_alternating(partial, acc_err);
  res.value = total + acc;
  res.error = total_err + acc_err + envelope(z) * half;
  res.evaluations = evals;
  res.converged = res.error <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(res.value)) * 4.0;
  return res;
}

}  // namespace templev

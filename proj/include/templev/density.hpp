// Fourier inversion of characteristic exponents: pdf/cdf/quantile point
// queries by adaptive oscillatory quadrature, batch grid evaluation through
// a Filon-type panel table of the characteristic function, and density
// grids with monotone interpolation and power-law tail extrapolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "templev/charfn.hpp"
#include "templev/common.hpp"
#include "templev/quadrature.hpp"

namespace templev {

struct InversionOptions {
  double abs_tol = 1e-12;   // below the negative-pdf clamp threshold
  double rel_tol = 1e-8;
  double tail_eps = 1e-16;  // CF magnitude treated as zero
};

namespace detail {

using cplx = std::complex<double>;

// |exp(t C(z))| <= exp(t(eta_pad - decay_coef z^alpha)); smallest Z where the
// envelope reaches eps.
inline double cf_cutoff(const Exponent& e, double t, double eps) {
  if (e.decay_coef <= 0.0 || t <= 0.0) return 1e6;
  const double target = std::log(1.0 / eps) + t * e.eta_pad;
  return 1.2 * std::pow(target / (t * e.decay_coef), 1.0 / e.alpha);
}

inline void verify_integrability(const Exponent& e, double t) {
  if (e.decay_coef > 0.0 && e.alpha > 0.0) return;  // stable-type decay
  double prev = 2.0;
  for (double z : {8.0, 64.0, 512.0}) {
    const double mag = std::exp(t * e.eval(z).real());
    if (mag >= prev)
      throw IntegrabilityUnverified("characteristic function does not appear to decay");
    prev = mag;
  }
  if (prev > 0.7)
    throw IntegrabilityUnverified("characteristic function decays too slowly");
}

// Moments m_k(theta) = int_{-1}^{1} s^k e^{-i theta s} ds, k = 0..3.
inline void filon_moments(double theta, cplx out[4]) {
  const double at = std::fabs(theta);
  if (at < 0.8) {
    // series: m_k = sum_j (-i theta)^j / j! * (1+(-1)^{k+j}) / (k+j+1)
    for (int k = 0; k < 4; ++k) {
      cplx term(1.0, 0.0), sum(0.0, 0.0);
      for (int j = 0; j < 26; ++j) {
        if ((k + j) % 2 == 0) sum += term * (2.0 / (k + j + 1.0));
        term *= cplx(0.0, -theta) / double(j + 1);
        if (std::abs(term) < 1e-20) break;
      }
      out[k] = sum;
    }
    return;
  }
  const cplx eim = std::polar(1.0, -theta);  // e^{-i theta}
  const cplx eip = std::conj(eim);
  const cplx i_theta(0.0, theta);
  out[0] = (eim - eip) / (-i_theta);
  for (int k = 1; k < 4; ++k) {
    const double msign = (k % 2 == 0) ? 1.0 : -1.0;
    out[k] = (eim - msign * eip) / (-i_theta) + (double(k) / i_theta) * out[k - 1];
  }
}

struct CFPanel {
  double zc = 0.0;  // center
  double hh = 0.0;  // half width
  cplx c[4];        // cubic coefficients in local s = (z - zc)/hh
};

// Fit a cubic through phi at local nodes {-1,-1/3,1/3,1}.
template <class Phi>
CFPanel fit_panel(const Phi& phi, double a, double b) {
  CFPanel p;
  p.zc = 0.5 * (a + b);
  p.hh = 0.5 * (b - a);
  const cplx g0 = phi(p.zc - p.hh);
  const cplx g1 = phi(p.zc - p.hh / 3.0);
  const cplx g2 = phi(p.zc + p.hh / 3.0);
  const cplx g3 = phi(p.zc + p.hh);
  p.c[0] = (-g0 + 9.0 * g1 + 9.0 * g2 - g3) / 16.0;
  p.c[1] = (g0 - 27.0 * g1 + 27.0 * g2 - g3) / 16.0;
  p.c[2] = 9.0 * (g0 - g1 - g2 + g3) / 16.0;
  p.c[3] = (-9.0 * g0 + 27.0 * g1 - 27.0 * g2 + 9.0 * g3) / 16.0;
  return p;
}

inline cplx eval_panel(const CFPanel& p, double z) {
  const double s = (z - p.zc) / p.hh;
  return ((p.c[3] * s + p.c[2]) * s + p.c[1]) * s + p.c[0];
}

// Adaptive cubic panelization of phi on [lo, hi]: split until the two interior
// probe points interpolate within tol_abs + tol_rel * local scale.
template <class Phi>
void build_panels(const Phi& phi, double lo, double hi, double tol_abs, double tol_rel,
                  int depth, std::vector<CFPanel>& out) {
  const CFPanel p = fit_panel(phi, lo, hi);
  if (depth < 42) {
    const double za = p.zc - 2.0 * p.hh / 3.0;
    const double zb = p.zc + 2.0 * p.hh / 3.0;
    const double scale = std::max(std::abs(p.c[0]), 1e-30);
    const double err = std::max(std::abs(phi(za) - eval_panel(p, za)),
                                std::abs(phi(zb) - eval_panel(p, zb)));
    if (err > tol_abs + tol_rel * scale) {
      const double mid = 0.5 * (lo + hi);
      build_panels(phi, lo, mid, tol_abs, tol_rel, depth + 1, out);
      build_panels(phi, mid, hi, tol_abs, tol_rel, depth + 1, out);
      return;
    }
  }
  out.push_back(p);
}

// int e^{-izx} p(z) dz over one panel, exact for the fitted cubic.
inline cplx filon_panel(const CFPanel& p, double x) {
  cplx m[4];
  filon_moments(x * p.hh, m);
  const cplx rot = std::polar(1.0, -x * p.zc);
  return p.hh * rot * (p.c[0] * m[0] + p.c[1] * m[1] + p.c[2] * m[2] + p.c[3] * m[3]);
}

}  // namespace detail

// Piecewise-cubic table of an expensive exponent on [0, z_max]; eval falls
// back to the base exponent beyond the table. Symmetry C(-z) = conj C(z).
inline Exponent tabulated_exponent(const Exponent& base, double z_max,
                                   double tol_rel = 1e-11) {
  auto panels = std::make_shared<std::vector<detail::CFPanel>>();
  auto f = [&](double z) { return base.eval(z); };
  // log-graded seed panels resolve the small-z kink
  std::vector<double> seeds;
  seeds.push_back(0.0);
  for (double z = z_max * 1e-8; z < z_max * 0.999; z *= 4.0) seeds.push_back(z);
  seeds.push_back(z_max);
  for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
    detail::build_panels(f, seeds[i], seeds[i + 1], 1e-14, tol_rel, 0, *panels);

  Exponent e = base;
  const auto base_eval = base.eval;
  e.eval = [panels, base_eval, z_max](double z) -> std::complex<double> {
    const double az = std::fabs(z);
    if (az > z_max) return base_eval(z);
    // binary search for the covering panel
    std::size_t lo = 0, hi = panels->size();
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if ((*panels)[mid].zc - (*panels)[mid].hh <= az)
        lo = mid;
      else
        hi = mid;
    }
    const std::complex<double> v = detail::eval_panel((*panels)[lo], az);
    return z >= 0.0 ? v : std::conj(v);
  };
  e.expensive_eval = false;
  return e;
}

namespace detail {

// Shared implementation of the inversion integrals. Computes
//   int_0^inf w(z) dz
// where w(z) = Re or Im of e^{-izx} phi_t(z) (optionally divided by z),
// splitting into a kink-aware head and an oscillation-aware tail.
struct InversionIntegrand {
  const Exponent* e;
  double t;
  double x;
  bool gil_pelaez;  // divide by z and take Im; otherwise take Re

  cplx phi(double z) const { return std::exp(t * e->eval(z)); }
  double omega() const { return x - t * e->drift; }

  double raw(double z) const {
    if (z == 0.0) return limit_at_zero();
    const cplx v = std::polar(1.0, -z * x) * phi(z);
    return gil_pelaez ? v.imag() / z : v.real();
  }

  double limit_at_zero() const {
    if (!gil_pelaez) return 1.0;
    // Im(e^{-izx} phi)/z -> -(x - mean-ish drift); kink cases diverge and are
    // handled by the substitution, never evaluated at exactly zero.
    return -omega();
  }
};

struct InversionValue {
  double value = 0.0;
  double error = 0.0;
  bool ok = true;  // every component quadrature met its own tolerance
};

inline InversionValue inversion_integral(const Exponent& e, double t, double x,
                                         bool gil_pelaez, const InversionOptions& opt) {
  InversionIntegrand w{&e, t, x, gil_pelaez};
  const double Z = cf_cutoff(e, t, opt.tail_eps);
  const double om_signed = w.omega();
  const double om = std::fabs(om_signed);

  QuadOptions qopt;
  qopt.abs_tol = opt.abs_tol * 0.5;
  // the pdf target is absolute, so component claims must not ride on loose
  // relative tolerances when the integrals are O(1)
  qopt.rel_tol = std::min(opt.rel_tol, 2e-10);

  // head [0, zc]: resolve the |z|^kink behaviour of the CF
  const double zc = std::min({1.0, Z, om > 1e-12 ? 0.5 * pi / om : 1.0});
  InversionValue out;
  const bool singular_gp = gil_pelaez && e.kink < 1.0;
  {
    QuadResult r = singular_gp
                       ? integrate_adaptive_power_sub([&](double z) { return w.raw(z); },
                                                      zc, e.kink, qopt)
                       : integrate_adaptive([&](double z) { return w.raw(z); }, 0.0, zc,
                                            qopt);
    out.value = r.value;
    out.error = r.error;
    out.ok = out.ok && r.converged;
  }
  if (zc >= Z) return out;

  // tail [zc, Z or infinity)
  if (om * (Z - zc) < 6.0) {
    QuadResult r = integrate_adaptive([&](double z) { return w.raw(z); }, zc, Z, qopt);
    out.value += r.value;
    out.error += r.error;
    out.ok = out.ok && r.converged;
    return out;
  }

  // oscillatory: e^{-izx} phi = e^{-iz om} psi(z), psi = e^{t C(z) - i t drift z}
  auto psi = [&](double z) {
    return std::exp(t * e.eval(z) - cplx(0.0, t * e.drift * z));
  };
  auto env = [&](double z) {
    const double mag = t * (e.eta_pad - e.decay_coef * std::pow(z, e.alpha));
    const double bound = std::exp(std::min(mag, 0.0));
    return gil_pelaez ? bound / z : bound;
  };
  const double sgn = om_signed >= 0.0 ? 1.0 : -1.0;
  if (gil_pelaez) {
    // Im(e^{-iz om} psi)/z = [Im psi cos(om z) - sgn * Re psi sin(om z)] / z
    auto gi = [&](double z) { return psi(z).imag() / z; };
    auto gr = [&](double z) { return psi(z).real() / z; };
    QuadResult r1 = integrate_oscillatory_cos(gi, om, 0.0, zc, env, qopt);
    QuadResult r2 = integrate_oscillatory_cos(gr, om, -0.5 * pi, zc, env, qopt);
    out.value += r1.value - sgn * r2.value;
    out.error += r1.error + r2.error;
    out.ok = out.ok && r1.converged && r2.converged;
  } else {
    // Re(e^{-iz om} psi) = Re psi cos(om z) + sgn * Im psi sin(om z)
    auto gr = [&](double z) { return psi(z).real(); };
    auto gi = [&](double z) { return psi(z).imag(); };
    QuadResult r1 = integrate_oscillatory_cos(gr, om, 0.0, zc, env, qopt);
    out.value += r1.value;
    out.error += r1.error;
    out.ok = out.ok && r1.converged;
    if (!e.real_symmetric) {
      QuadResult r2 = integrate_oscillatory_cos(gi, om, -0.5 * pi, zc, env, qopt);
      out.value += sgn * r2.value;
      out.error += r2.error;
      out.ok = out.ok && r2.converged;
    }
  }
  return out;
}

}  // namespace detail

struct PdfEstimate {
  double value = 0.0;  // clamped nonnegative
  double error = 0.0;  // claimed absolute error
  bool reliable = true;
};

// Best-effort pdf with its claimed error; never throws on tolerance misses.
inline PdfEstimate pdf_with_error(const Exponent& e, double t, double x,
                                  const InversionOptions& opt = {}) {
  detail::verify_integrability(e, t);
  const detail::InversionValue iv = detail::inversion_integral(e, t, x, false, opt);
  PdfEstimate est;
  est.error = iv.error / pi;
  est.reliable = iv.ok;
  est.value = std::max(iv.value / pi, 0.0);
  if (iv.value / pi < -std::max(1e-12, 4.0 * est.error)) est.reliable = false;
  return est;
}

// f_t(x) = (1/pi) int_0^inf Re(e^{-izx} exp(t C(z))) dz, to the 1e-8
// absolute accuracy target. Negative values within the quadrature's own
// noise (never better than 1e-12) clamp to zero; anything more negative, or
// a claimed error beyond the target, is a failure.
inline double pdf(const Exponent& e, double t, double x,
                  const InversionOptions& opt = {}) {
  detail::verify_integrability(e, t);
  const detail::InversionValue iv = detail::inversion_integral(e, t, x, false, opt);
  const double v = iv.value / pi;
  const double err = iv.error / pi;
  if (!iv.ok || err > 1e-8 * std::max(1.0, std::fabs(v)))
    throw QuadratureFailure("pdf quadrature missed tolerance at x=" + std::to_string(x) +
                            " (claimed error " + std::to_string(err) + ")");
  if (v < 0.0) {
    if (v < -std::max(1e-12, 4.0 * err))
      throw QuadratureFailure("pdf quadrature returned " + std::to_string(v) + " at x=" +
                              std::to_string(x));
    return 0.0;
  }
  return v;
}

// Gil-Pelaez: F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-izx} exp(t C(z)))/z dz.
inline double cdf(const Exponent& e, double t, double x,
                  const InversionOptions& opt = {}) {
  detail::verify_integrability(e, t);
  const detail::InversionValue iv = detail::inversion_integral(e, t, x, true, opt);
  if (!iv.ok || iv.error / pi > 1e-7)
    throw QuadratureFailure("cdf quadrature missed tolerance at x=" + std::to_string(x));
  const double v = 0.5 - iv.value / pi;
  return std::clamp(v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Density grids

struct GridSpec {
  int n_points = 512;
  double x_min = std::numeric_limits<double>::quiet_NaN();  // NaN = automatic
  double x_max = std::numeric_limits<double>::quiet_NaN();
  double bulk_tail_mass = 1e-3;   // cdf mass outside the uniform core
  double edge_tail_mass = 2e-5;   // cdf mass beyond the grid edge
  double cf_tol = 3e-11;          // CF panel interpolation tolerance
  int threads = 1;                // node evaluation workers; output invariant
};

struct TailModel {
  double anchor_x = 0.0;
  double mass = 0.0;      // cdf mass beyond anchor
  double exponent = 1.0;  // F-bar ~ mass * (x/anchor)^{-exponent} * exp(-rate (x-anchor))
  double rate = 0.0;
};

struct DensityGrid {
  double t = 1.0;
  std::vector<double> x;
  std::vector<double> pdf_values;
  std::vector<double> cdf_values;
  std::vector<double> cdf_slopes;  // monotone (Fritsch-Carlson) slopes
  TailModel right_tail, left_tail;
  bool one_sided = false;
  double tolerance_achieved = 0.0;
  std::string model_hash;

  double x_min() const { return x.front(); }
  double x_max() const { return x.back(); }

  // cubic through the four nearest nodes, clamped to >= 0
  double pdf_at(double xq) const;
  // monotone cubic Hermite between nodes, tails extrapolated
  double cdf_at(double xq) const;
  // inverse of cdf_at by bracketed Newton
  double quantile(double u) const;
};

namespace detail {

inline std::size_t locate(const std::vector<double>& xs, double x) {
  // largest i with xs[i] <= x, clamped to [0, n-2]
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::ptrdiff_t i = std::max<std::ptrdiff_t>(std::distance(xs.begin(), it) - 1, 0);
  return std::min<std::size_t>(i, xs.size() - 2);
}

inline double tail_cdf_beyond(const TailModel& tm, double x_abs) {
  if (tm.mass <= 0.0) return 0.0;
  return tm.mass * std::pow(x_abs / tm.anchor_x, -tm.exponent) *
         std::exp(-tm.rate * (x_abs - tm.anchor_x));
}

inline double tail_pdf_beyond(const TailModel& tm, double x_abs) {
  if (tm.mass <= 0.0) return 0.0;
  return tail_cdf_beyond(tm, x_abs) * (tm.exponent / x_abs + tm.rate);
}

// invert tail_cdf_beyond for a target mass m < tm.mass
inline double tail_quantile_beyond(const TailModel& tm, double m) {
  if (tm.rate == 0.0)
    return tm.anchor_x * std::pow(m / tm.mass, -1.0 / tm.exponent);
  double x = tm.anchor_x;
  for (int it = 0; it < 200; ++it) {
    const double f = tail_cdf_beyond(tm, x) - m;
    if (std::fabs(f) < 1e-16 * tm.mass) break;
    const double fp = -tail_pdf_beyond(tm, x);
    double step = f / fp;
    if (!std::isfinite(step)) break;
    step = std::clamp(step, -x, 10.0 * tm.anchor_x);
    x = std::max(tm.anchor_x, x - step);
  }
  return x;
}

}  // namespace detail

inline double DensityGrid::pdf_at(double xq) const {
  if (xq < x.front()) {
    if (one_sided) return 0.0;
    return detail::tail_pdf_beyond(left_tail, -xq);
  }
  if (xq > x.back()) return detail::tail_pdf_beyond(right_tail, xq);
  const std::size_t i = detail::locate(x, xq);
  const std::size_t i0 = (i == 0) ? 0 : (i + 2 < x.size() ? i - 1 : x.size() - 4);
  // interpolate log f where the stencil is strictly positive: densities span
  // many orders of magnitude (and vary super-exponentially at a one-sided
  // support edge), where value-space cubics lose all relative accuracy
  bool positive = true;
  for (std::size_t j = i0; j < i0 + 4; ++j) positive = positive && pdf_values[j] > 1e-280;
  double v = 0.0;
  for (std::size_t j = i0; j < i0 + 4; ++j) {
    double lj = positive ? std::log(pdf_values[j]) : pdf_values[j];
    for (std::size_t k = i0; k < i0 + 4; ++k)
      if (k != j) lj *= (xq - x[k]) / (x[j] - x[k]);
    v += lj;
  }
  return positive ? std::exp(v) : std::max(v, 0.0);
}

inline double DensityGrid::cdf_at(double xq) const {
  if (xq < x.front()) {
    if (one_sided) return 0.0;
    return detail::tail_cdf_beyond(left_tail, -xq);
  }
  if (xq > x.back()) return 1.0 - detail::tail_cdf_beyond(right_tail, xq);
  const std::size_t i = detail::locate(x, xq);
  const double h = x[i + 1] - x[i];
  const double s = (xq - x[i]) / h;
  const double y0 = cdf_values[i], y1 = cdf_values[i + 1];
  const double d0 = cdf_slopes[i] * h, d1 = cdf_slopes[i + 1] * h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return std::clamp(h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1, 0.0, 1.0);
}

inline double DensityGrid::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw BracketFailure("quantile: u must lie in (0,1)");
  if (u < cdf_values.front()) {
    if (one_sided) return x.front();
    return -detail::tail_quantile_beyond(left_tail, u);
  }
  if (u > cdf_values.back())
    return detail::tail_quantile_beyond(right_tail, 1.0 - u);
  // bracket on the grid
  std::size_t lo = 0, hi = cdf_values.size() - 1;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cdf_values[mid] <= u)
      lo = mid;
    else
      hi = mid;
  }
  double a = x[lo], b = x[lo + 1];
  double xq = 0.5 * (a + b);
  for (int it = 0; it < 80; ++it) {
    const double f = cdf_at(xq) - u;
    if (f > 0.0)
      b = xq;
    else
      a = xq;
    const double d = pdf_at(xq);
    double next = (d > 1e-300) ? xq - f / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::fabs(next - xq) < 1e-12 * (1.0 + std::fabs(xq))) return next;
    xq = next;
  }
  return xq;
}

namespace detail {

// Fritsch-Carlson monotone slopes for the cdf interpolant.
inline std::vector<double> monotone_slopes(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  std::vector<double> d(n, 0.0), delta(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    delta[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      d[i] = d[i + 1] = 0.0;
    } else {
      d[i] = std::clamp(d[i], 0.0, 3.0 * delta[i]);
      d[i + 1] = std::clamp(d[i + 1], 0.0, 3.0 * delta[i]);
    }
  }
  return d;
}

}  // namespace detail

// Batch grid construction through the CF panel table.
inline DensityGrid build_grid(const Exponent& exponent, double t, GridSpec spec = {}) {
  if (spec.n_points < 16) throw GridError("build_grid: n_points must be >= 16");
  detail::verify_integrability(exponent, t);
  const Exponent e = exponent.expensive_eval
                         ? tabulated_exponent(exponent, detail::cf_cutoff(exponent, t,
                                                                          1e-18))
                         : exponent;
  const double Z = detail::cf_cutoff(e, t, 1e-17);

  // CF panel table for phi_t
  auto phi = [&](double z) { return std::exp(t * e.eval(z)); };
  std::vector<detail::CFPanel> panels;
  {
    std::vector<double> seeds;
    seeds.push_back(0.0);
    for (double z = Z * 1e-7; z < Z * 0.999; z *= 3.0) seeds.push_back(z);
    seeds.push_back(Z);
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
      detail::build_panels(phi, seeds[i], seeds[i + 1], 5e-13, spec.cf_tol, 0, panels);
  }
  auto pdf_batch = [&](double x) {
    detail::cplx total(0.0, 0.0);
    for (const auto& p : panels) total += detail::filon_panel(p, x);
    return total.real() / pi;
  };

  const bool one_sided = exponent.support == Exponent::Support::positive_half;
  const double center = t * e.drift;

  // Scale probes: the central quartile width (resolves the peak), the bulk
  // edge (bulk_tail_mass outside), and the grid edge (edge_tail_mass beyond).
  double x_lo = spec.x_min, x_hi = spec.x_max;
  double bulk_lo = 0.0, bulk_hi = 0.0, w_core_r = 1.0, w_core_l = 1.0;
  {
    auto probe_scale = [&](double sign, double mass) {
      double w = 1.0;
      auto outside = [&](double ww) {
        return sign > 0 ? 1.0 - cdf(e, t, center + ww) : cdf(e, t, center - ww);
      };
      int guard = 0;
      while (outside(w) > mass && guard++ < 60) w *= 2.0;
      guard = 0;
      while (w > 1e-8 && outside(0.5 * w) <= mass && guard++ < 60) w *= 0.5;
      return w;
    };
    w_core_r = probe_scale(+1.0, 0.25);
    bulk_hi = center + probe_scale(+1.0, spec.bulk_tail_mass);
    if (std::isnan(x_hi)) x_hi = center + probe_scale(+1.0, spec.edge_tail_mass);
    if (one_sided) {
      bulk_lo = 0.0;
      w_core_l = 0.0;
      if (std::isnan(x_lo)) x_lo = 0.0;
    } else if (e.real_symmetric || exponent.real_symmetric) {
      w_core_l = w_core_r;
      bulk_lo = 2.0 * center - bulk_hi;
      if (std::isnan(x_lo)) x_lo = center - (x_hi - center);
    } else {
      w_core_l = probe_scale(-1.0, 0.25);
      bulk_lo = center - probe_scale(-1.0, spec.bulk_tail_mass);
      if (std::isnan(x_lo)) x_lo = center - probe_scale(-1.0, spec.edge_tail_mass);
    }
  }
  bulk_hi = std::min(bulk_hi, x_hi);
  bulk_lo = std::max(bulk_lo, x_lo);

  // Node layout: uniform inner core over a few central scales (trapezoid
  // error telescopes there), then ratio-controlled geometric sections through
  // the bulk and out to the grid edge.
  DensityGrid grid;
  grid.t = t;
  grid.one_sided = one_sided;
  {
    const int n = spec.n_points;
    std::vector<double>& xs = grid.x;
    xs.reserve(n + 8);
    auto geometric = [&xs](double from, double to, double anchor, int count) {
      // nodes between from and to, geometric in distance from anchor
      if (count <= 0 || to == from) return;
      const double d0 = std::fabs(from - anchor), d1 = std::fabs(to - anchor);
      const double sgn = to > from ? 1.0 : -1.0;
      for (int i = 1; i <= count; ++i)
        xs.push_back(from + sgn * (d0 * std::pow(d1 / d0, double(i) / count) - d0));
    };
    // Geometric sections get nodes in proportion to ln-range weighted by the
    // square root of the mass they carry, balancing per-section trapezoid
    // error (~ (ln-range / nodes)^2 * mass).
    auto split_geo = [&](double inner_edge, double bulk_edge, double far_edge,
                         int budget, int& n_mid, int& n_tail) {
      const double ln_mid =
          bulk_edge > inner_edge ? std::log(std::max((bulk_edge - center) /
                                                         std::max(inner_edge - center, 1e-12),
                                                     1.0 + 1e-12))
                                 : 0.0;
      const double ln_tail =
          far_edge > bulk_edge ? std::log(std::max((far_edge - center) /
                                                       std::max(bulk_edge - center, 1e-12),
                                                   1.0 + 1e-12))
                               : 0.0;
      const double w_mid = ln_mid * std::sqrt(0.25);
      const double w_tail = ln_tail * std::sqrt(spec.bulk_tail_mass);
      if (w_mid + w_tail <= 0.0) {
        n_mid = n_tail = 0;
        return;
      }
      // floor each live section so cdf/quantile interpolation stays usable
      // even where the trapezoid mass budget would starve it
      const int floor_n = std::max(4, std::min(24, budget / 5));
      n_mid = static_cast<int>(budget * w_mid / (w_mid + w_tail));
      if (ln_mid > 0.0) n_mid = std::clamp(n_mid, floor_n, budget - (ln_tail > 0.0 ? floor_n : 0));
      n_tail = budget - n_mid;
      if (ln_tail <= 0.0) n_tail = 0;
    };
    if (one_sided) {
      const double inner_hi = std::min(4.0 * w_core_r + center, bulk_hi);
      int n_mid = 0, n_tail = 0;
      split_geo(inner_hi, bulk_hi, x_hi, n / 2, n_mid, n_tail);
      const int n_inner = n - n_mid - n_tail;
      for (int i = 0; i < n_inner; ++i)
        xs.push_back(x_lo + (inner_hi - x_lo) * double(i) / (n_inner - 1));
      geometric(inner_hi, bulk_hi, center, n_mid);
      geometric(bulk_hi, x_hi, center, n_tail);
    } else {
      const int n_side = n / 2;
      const double inner_hi = std::min(center + 6.0 * w_core_r, bulk_hi);
      const double inner_lo = std::max(center - 6.0 * w_core_l, bulk_lo);
      int n_mid_r = 0, n_tail_r = 0, n_mid_l = 0, n_tail_l = 0;
      split_geo(inner_hi, bulk_hi, x_hi, n_side * 60 / 100, n_mid_r, n_tail_r);
      split_geo(2.0 * center - inner_lo, 2.0 * center - bulk_lo, 2.0 * center - x_lo,
                n_side * 60 / 100, n_mid_l, n_tail_l);
      const int n_inner = n - n_mid_r - n_tail_r - n_mid_l - n_tail_l;
      for (int i = 0; i < n_inner; ++i)
        xs.push_back(inner_lo + (inner_hi - inner_lo) * double(i) / (n_inner - 1));
      geometric(inner_hi, bulk_hi, center, n_mid_r);
      geometric(bulk_hi, x_hi, center, n_tail_r);
      geometric(inner_lo, bulk_lo, center, n_mid_l);
      geometric(bulk_lo, x_lo, center, n_tail_l);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }

  // pdf at nodes and interval midpoints (one deterministic parallel pass);
  // cdf by Simpson accumulation from an anchor
  const std::size_t n = grid.x.size();
  std::vector<double> raw(2 * n - 1);
  parallel_for(raw.size(), spec.threads, [&](std::size_t i) {
    const double x = (i < n) ? grid.x[i] : 0.5 * (grid.x[i - n] + grid.x[i - n + 1]);
    raw[i] = pdf_batch(x);
  });
  grid.pdf_values.resize(n);
  double worst_negative = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst_negative = std::min(worst_negative, raw[i]);
    grid.pdf_values[i] = std::max(raw[i], 0.0);
  }
  if (worst_negative < -1e-9)
    throw QuadratureFailure("grid pdf has a negative value beyond roundoff: " +
                            std::to_string(worst_negative));

  grid.cdf_values.resize(n);
  double anchor = one_sided ? 0.0 : cdf(e, t, grid.x.front());
  grid.cdf_values[0] = anchor;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = grid.x[i + 1] - grid.x[i];
    const double fm = std::max(raw[n + i], 0.0);
    const double inc = h / 6.0 * (grid.pdf_values[i] + 4.0 * fm + grid.pdf_values[i + 1]);
    grid.cdf_values[i + 1] = std::min(grid.cdf_values[i] + std::max(inc, 0.0), 1.0);
  }
  grid.cdf_slopes = detail::monotone_slopes(grid.x, grid.cdf_values);

  // tails anchored at the edges, shaped by the exponent metadata
  grid.right_tail.anchor_x = std::fabs(grid.x.back()) > 1e-300 ? grid.x.back() : 1.0;
  grid.right_tail.mass = std::max(1.0 - grid.cdf_values.back(), 0.0);
  grid.right_tail.exponent = exponent.tail_exponent;
  grid.right_tail.rate = exponent.tail_exp_rate;
  if (!one_sided) {
    grid.left_tail.anchor_x = std::fabs(grid.x.front());
    grid.left_tail.mass = std::max(grid.cdf_values.front(), 0.0);
    grid.left_tail.exponent = exponent.tail_exponent;
    grid.left_tail.rate = exponent.tail_exp_rate;
  }

  // normalization check: grid mass + tails must reproduce 1
  double trapz = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    trapz += 0.5 * (grid.pdf_values[i] + grid.pdf_values[i + 1]) * (grid.x[i + 1] - grid.x[i]);
  // The 1e-4 normalization invariant presumes default (512-point) resolution;
  // coarser grids record their achieved tolerance and only gross deviations
  // abort the build.
  const double mass = trapz + grid.right_tail.mass + grid.left_tail.mass;
  grid.tolerance_achieved = std::fabs(mass - 1.0);
  if (grid.tolerance_achieved > 1e-3)
    throw QuadratureFailure("grid mass deviates from 1 by " +
                            std::to_string(grid.tolerance_achieved));
  return grid;
}

// Quantile by grid inversion when available, bracketed point-cdf root search
// otherwise; the search refines to ~1e-10 in probability.
inline double quantile(const Exponent& e, double t, double u,
                       const DensityGrid* grid = nullptr,
                       const InversionOptions& opt = {}) {
  if (!(u > 0.0 && u < 1.0)) throw BracketFailure("quantile: u must lie in (0,1)");
  if (grid) return grid->quantile(u);

  const double center = t * e.drift;
  double lo = center, hi = center;
  double flo = cdf(e, t, lo, opt), fhi = flo;
  double step = 1.0;
  int guard = 0;
  while (flo > u && guard++ < 200) {
    lo -= step;
    step *= 2.0;
    flo = cdf(e, t, lo, opt);
  }
  step = 1.0;
  guard = 0;
  while (fhi < u && guard++ < 200) {
    hi += step;
    step *= 2.0;
    fhi = cdf(e, t, hi, opt);
  }
  if (!(flo <= u && fhi >= u))
    throw BracketFailure("quantile: failed to bracket u");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = cdf(e, t, mid, opt);
    if (std::fabs(fm - u) < 1e-10) return mid;
    if (fm < u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + std::fabs(mid))) return mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace templev

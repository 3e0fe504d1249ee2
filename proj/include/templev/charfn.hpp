// Characteristic exponents C(z) of the stable base law, the tempered law,
// and the removed-jump compound Poisson part, plus the decomposition
// identity check C = C~ + rho_hat.
#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "templev/common.hpp"
#include "templev/model.hpp"
#include "templev/quadrature.hpp"

namespace templev {

// A characteristic exponent z -> C(z) with the metadata the Fourier-inversion
// machinery needs: symmetry, support side, CF decay envelope
// |exp(t C(z))| <= exp(t*(eta_pad - decay_coef*|z|^alpha)), small-z smoothness
// (kink), and cdf tail extrapolation hints.
struct Exponent {
  std::function<std::complex<double>(double)> eval;
  bool real_symmetric = false;
  enum class Support { two_sided, positive_half } support = Support::two_sided;
  double alpha = 0.5;
  double decay_coef = 0.0;
  double eta_pad = 0.0;
  double kink = 2.0;
  double drift = 0.0;
  double tail_exponent = 0.5;   // cdf tail ~ x^{-tail_exponent}
  double tail_exp_rate = 0.0;   // optional exponential factor exp(-rate*x)
  bool expensive_eval = false;  // eval is quadrature-backed; worth tabulating

  std::complex<double> operator()(double z) const { return eval(z); }
};

namespace detail {

// K(alpha) = int_0^inf (1-cos u) u^{-1-alpha} du, by quadrature.
inline double cosine_constant_by_quadrature(double alpha) {
  QuadOptions opt;
  auto w_over_r2 = [](double r) {
    return r < 1e-8 ? 0.5 : (1.0 - std::cos(r)) / (r * r);
  };
  QuadResult corner = integrate_singular_corner(w_over_r2, alpha, 2.0, opt);
  // int_1^inf (1-cos u) u^{-1-alpha} du = 1/alpha - int_1^inf cos(u) u^{-1-alpha} du
  auto g = [&](double r) { return std::pow(r, -1.0 - alpha); };
  QuadResult osc = integrate_oscillatory_cos(g, 1.0, 0.0, 1.0, g, opt);
  if (!corner.converged || !osc.converged)
    throw QuadratureFailure("cosine constant quadrature failed");
  return corner.value + 1.0 / alpha - osc.value;
}

// Validated K(alpha): quadrature value cross-checked against the analytic
// Gamma(1-alpha) cos(pi alpha/2) / alpha.
inline double cosine_constant(double alpha) {
  const double quad = cosine_constant_by_quadrature(alpha);
  const double analytic = stable_cosine_constant(alpha);
  if (!nearly_equal(quad, analytic, 1e-8))
    throw QuadratureFailure("cosine constant quadrature disagrees with analytic value");
  return quad;
}

// int_0^inf (e^{izr} - 1) r^{-1-alpha} w(r) dr for z > 0, alpha in (0,2) with
// the weight w (a tempering q or 1-q); corner_order states the small-r power
// of r * w(r). Splits at r* = min(1, pi/(2z)).
template <class W>
std::complex<double> half_line_integral(const W& w, double alpha, double z,
                                        double corner_order, const QuadOptions& opt) {
  const double rstar = std::min(1.0, 0.5 * pi / z);

  // corner: (e^{izr}-1) w(r), |integrand| ~ r^{corner_order - 1 - alpha}
  auto corner_re = [&](double r) {
    const double c = (std::cos(z * r) - 1.0) * w(r);
    return c / std::pow(r, corner_order);
  };
  auto corner_im = [&](double r) {
    return std::sin(z * r) * w(r) / std::pow(r, corner_order);
  };
  const double upper = std::pow(rstar, corner_order - alpha);
  const double beta = corner_order - alpha;
  if (beta <= 0.0) throw DivergentEta("half_line_integral: divergent corner");
  const double inv = 1.0 / beta;
  auto corner_quad = [&](auto&& f) {
    auto g = [&](double u) { return inv * f(std::pow(u, inv)); };
    return integrate_adaptive(g, 0.0, upper, opt);
  };
  QuadResult cr = corner_quad(corner_re);
  QuadResult ci = corner_quad(corner_im);

  // oscillatory parts on [rstar, inf)
  auto g = [&](double r) { return std::pow(r, -1.0 - alpha) * w(r); };
  auto env = [&](double r) { return std::pow(r, -1.0 - alpha); };
  QuadResult oc = integrate_oscillatory_cos(g, z, 0.0, rstar, env, opt);
  QuadResult os = integrate_oscillatory_cos(g, z, -0.5 * pi, rstar, env, opt);

  // the "-1" part on [rstar, inf): absolutely convergent
  auto tail_bound = [&](double R) { return std::pow(R, -alpha) / alpha; };
  QuadResult m1 = rstar < 1.0
                      ? [&] {
                          QuadResult head = integrate_adaptive(g, rstar, 1.0, opt);
                          QuadResult tail = integrate_upper_decaying(g, 1.0, tail_bound, opt);
                          head.value += tail.value;
                          head.error += tail.error;
                          head.converged = head.converged && tail.converged;
                          return head;
                        }()
                      : integrate_upper_decaying(g, rstar, tail_bound, opt);
  if (!cr.converged || !ci.converged || !m1.converged)
    throw QuadratureFailure("half_line_integral: quadrature did not converge");
  return {cr.value + oc.value - m1.value, ci.value + os.value};
}

// Symmetric compensated integral 2 int_0^inf (cos(zr)-1) r^{-1-alpha} w(r) dr,
// valid for alpha in (0,2) (the odd compensator cancels between directions).
template <class W>
double symmetric_cos_integral(const W& w, double alpha, double z, double corner_order,
                              const QuadOptions& opt) {
  const double rstar = std::min(1.0, 0.5 * pi / z);
  auto corner = [&](double r) {
    return (std::cos(z * r) - 1.0) * w(r) / std::pow(r, corner_order);
  };
  const double beta = corner_order - alpha;
  if (beta <= 0.0) throw DivergentEta("symmetric_cos_integral: divergent corner");
  const double inv = 1.0 / beta;
  auto gsub = [&](double u) { return inv * corner(std::pow(u, inv)); };
  QuadResult cq = integrate_adaptive(gsub, 0.0, std::pow(rstar, beta), opt);

  auto g = [&](double r) { return std::pow(r, -1.0 - alpha) * w(r); };
  auto env = [&](double r) { return std::pow(r, -1.0 - alpha); };
  QuadResult oc = integrate_oscillatory_cos(g, z, 0.0, rstar, env, opt);
  auto tail_bound = [&](double R) { return std::pow(R, -alpha) / alpha; };
  QuadResult m1 = rstar < 1.0
                      ? [&] {
                          QuadResult head = integrate_adaptive(g, rstar, 1.0, opt);
                          QuadResult tail = integrate_upper_decaying(g, 1.0, tail_bound, opt);
                          head.value += tail.value;
                          head.error += tail.error;
                          head.converged = head.converged && tail.converged;
                          return head;
                        }()
                      : integrate_upper_decaying(g, rstar, tail_bound, opt);
  if (!cq.converged || !m1.converged)
    throw QuadratureFailure("symmetric_cos_integral: quadrature did not converge");
  return 2.0 * (cq.value + oc.value - m1.value);
}

inline void require_supported_alpha(const StableParams& st) {
  if (st.alpha == 1.0)
    throw UnsupportedAlpha("alpha = 1 is not supported");
  if (st.alpha > 1.0 && !st.symmetric())
    throw UnsupportedAlpha("asymmetric models require alpha in (0,1)");
}

}  // namespace detail

// Exponent of the stable base law. Symmetric case:
//   C(z) = -(sigma_+ + sigma_-) K(alpha) |z|^alpha + i b z,
// asymmetric alpha in (0,1):
//   C(z) = i b z - K(alpha)|z|^alpha [sigma_tot - i sgn(z)(sigma_+ - sigma_-) tan(pi alpha/2)].
inline Exponent stable_exponent(const StableParams& params) {
  detail::require_supported_alpha(params);
  const double alpha = params.alpha;
  const double K = detail::cosine_constant(alpha);
  const double scale = params.sigma_total() * K;
  const double skew = (params.sigma_plus - params.sigma_minus) * K *
                      std::tan(pi * alpha / 2.0);
  const double b = params.b;

  Exponent e;
  e.real_symmetric = params.symmetric() && b == 0.0;
  e.support = (params.sigma_minus == 0.0 && alpha < 1.0 && params.sigma_plus > 0.0)
                  ? Exponent::Support::positive_half
                  : Exponent::Support::two_sided;
  e.alpha = alpha;
  e.decay_coef = scale;
  e.eta_pad = 0.0;
  e.kink = alpha;
  e.drift = b;
  e.tail_exponent = alpha;
  e.eval = [alpha, scale, skew, b](double z) {
    if (z == 0.0) return std::complex<double>(0.0, 0.0);
    const double az = std::fabs(z);
    const double mag = std::pow(az, alpha);
    const double sgn = z > 0.0 ? 1.0 : -1.0;
    return std::complex<double>(-scale * mag, sgn * skew * mag + b * z);
  };
  return e;
}

// Tempered exponent via the polar-form quadrature (the generic route):
//   C~(z) = sum_xi sigma_xi int_0^inf (e^{izr xi} - 1 - izr xi h_a(r)) r^{-1-alpha} q(r,xi) dr + i b~ z.
inline Exponent tempered_exponent(const ModelSpec& spec) {
  detail::require_supported_alpha(spec.stable);
  const double alpha = spec.stable.alpha;
  const double eta_v = eta_or_throw(spec);
  const bool plr = std::holds_alternative<PowerLawRosinski>(spec.tempering);
  const auto* ur = std::get_if<UserRadial>(&spec.tempering);
  const bool sym_q = plr || (ur && ur->symmetric_q);
  const bool symmetric = spec.stable.symmetric() && sym_q;
  if (alpha > 1.0 && !symmetric)
    throw UnsupportedAlpha("tempered exponent for alpha > 1 requires symmetry");

  Exponent e;
  e.real_symmetric = symmetric && spec.tilde_b == 0.0;
  e.support = (spec.stable.sigma_minus == 0.0 && alpha < 1.0)
                  ? Exponent::Support::positive_half
                  : Exponent::Support::two_sided;
  e.alpha = alpha;
  e.decay_coef = spec.stable.sigma_total() * stable_cosine_constant(alpha);
  e.eta_pad = 2.0 * eta_v;
  e.drift = spec.tilde_b;
  e.expensive_eval = true;
  if (const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering)) {
    e.kink = std::min(2.0, 1.0 + pl->alpha + pl->ell);
    e.tail_exponent = 1.0 + pl->alpha + pl->ell;
  } else if (std::holds_alternative<TweedieExp>(spec.tempering)) {
    e.kink = 2.0;
    e.tail_exponent = 1.0 + alpha;
    e.tail_exp_rate = std::get<TweedieExp>(spec.tempering).c;
  } else {
    e.kink = alpha;
    e.tail_exponent = alpha;
  }

  const ModelSpec s = spec;
  const double tb = spec.tilde_b;
  if (symmetric) {
    const double sigma_half = spec.stable.sigma_plus;
    e.eval = [s, sigma_half, alpha, tb](double z) -> std::complex<double> {
      if (z == 0.0) return {0.0, 0.0};
      const double az = std::fabs(z);
      QuadOptions opt;
      auto w = [&](double r) { return q_radial(s, r, +1); };
      const double v = sigma_half * detail::symmetric_cos_integral(w, alpha, az, 2.0, opt);
      return {v, tb * z};
    };
  } else {
    e.eval = [s, alpha, tb](double z) -> std::complex<double> {
      if (z == 0.0) return {0.0, 0.0};
      const double az = std::fabs(z);
      QuadOptions opt;
      std::complex<double> total(0.0, 0.0);
      if (s.stable.sigma_plus > 0.0) {
        auto w = [&](double r) { return q_radial(s, r, +1); };
        total += s.stable.sigma_plus * detail::half_line_integral(w, alpha, az, 1.0, opt);
      }
      if (s.stable.sigma_minus > 0.0) {
        auto w = [&](double r) { return q_radial(s, r, -1); };
        total += s.stable.sigma_minus *
                 std::conj(detail::half_line_integral(w, alpha, az, 1.0, opt));
      }
      total += std::complex<double>(0.0, tb * az);
      return z > 0.0 ? total : std::conj(total);
    };
  }
  return e;
}

// Closed / semi-closed tempered exponents where the family admits one:
// Tweedie analytically, the p = 1 Rosinski family through
//   C~(z) = Gamma(-alpha) int ((1-izy)^alpha - 1) R(dy) + i b~ z.
inline std::optional<Exponent> tempered_exponent_closed(const ModelSpec& spec) {
  if (const auto* tw = std::get_if<TweedieExp>(&spec.tempering)) {
    Exponent e = tempered_exponent(spec);  // reuse metadata
    e.expensive_eval = false;
    const double a = tw->a, c = tw->c, alpha = tw->alpha, tb = spec.tilde_b;
    const double gamma_neg = -std::tgamma(1.0 - alpha) / alpha;  // Gamma(-alpha)
    e.eval = [a, c, alpha, tb, gamma_neg](double z) -> std::complex<double> {
      if (z == 0.0) return {0.0, 0.0};
      const std::complex<double> lam(c, -z);
      std::complex<double> v =
          a * gamma_neg * (std::pow(lam, alpha) - std::pow(c, alpha));
      v += std::complex<double>(0.0, tb * z);
      return v;
    };
    return e;
  }
  const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering);
  if (pl && pl->p == 1.0 && pl->alpha < 1.0) {
    Exponent e = tempered_exponent(spec);
    const PowerLawRosinski f = *pl;
    const double alpha = f.alpha, tb = spec.tilde_b;
    const double gamma_neg = -std::tgamma(1.0 - alpha) / alpha;
    e.eval = [f, alpha, tb, gamma_neg](double z) -> std::complex<double> {
      if (z == 0.0) return {0.0, 0.0};
      const double az = std::fabs(z);
      QuadOptions opt;
      auto integrand = [&](double y) {
        const double w = az * y;
        const double re = std::pow(1.0 + w * w, 0.5 * alpha) * std::cos(alpha * std::atan(w));
        return (re - 1.0) * detail::plr_r_density(f, y);
      };
      QuadResult head = integrate_adaptive(integrand, 0.0, 1.0, opt);
      const double cc = f.scale * detail::plr_c_const(f);
      auto tail_bound = [&](double R) {
        return cc * (std::pow(az * R, alpha) * std::pow(R, -1.0 - f.ell) / (1.0 + f.ell) +
                     2.0 * std::pow(R, -1.0 - alpha - f.ell) / (1.0 + alpha + f.ell));
      };
      QuadResult tail = integrate_upper_decaying(integrand, 1.0, tail_bound, opt);
      if (!head.converged || !tail.converged)
        throw QuadratureFailure("rosinski-form exponent quadrature failed");
      const double v = 2.0 * gamma_neg * (head.value + tail.value);
      return {v, tb * z};
    };
    return e;
  }
  return std::nullopt;
}

// Fast route when available, generic polar quadrature otherwise.
inline Exponent tempered_exponent_auto(const ModelSpec& spec) {
  if (auto closed = tempered_exponent_closed(spec)) return *closed;
  return tempered_exponent(spec);
}

// Exponent of the compound Poisson part:
//   rho_hat(z) = sum_xi sigma_xi int_0^inf (e^{izr xi} - 1) r^{-1-alpha} (1-q(r,xi)) dr.
inline std::complex<double> removed_jump_exponent(const ModelSpec& spec, double z) {
  if (z == 0.0) return {0.0, 0.0};
  const double alpha = spec.stable.alpha;
  const double p = family_p(spec.tempering);
  const double az = std::fabs(z);
  QuadOptions opt;
  std::complex<double> total(0.0, 0.0);
  const bool plr = std::holds_alternative<PowerLawRosinski>(spec.tempering);
  const auto* urp = std::get_if<UserRadial>(&spec.tempering);
  const bool symmetric =
      spec.stable.symmetric() && (plr || (urp && urp->symmetric_q));
  if (symmetric) {
    auto w = [&](double r) { return one_minus_q_radial(spec, r, +1); };
    const double v = spec.stable.sigma_plus *
                     detail::symmetric_cos_integral(w, alpha, az, 2.0 + p, opt);
    return {v, 0.0};
  }
  if (spec.stable.sigma_plus > 0.0) {
    auto w = [&](double r) { return one_minus_q_radial(spec, r, +1); };
    total += spec.stable.sigma_plus *
             detail::half_line_integral(w, alpha, az, 1.0 + p, opt);
  }
  if (spec.stable.sigma_minus > 0.0) {
    auto w = [&](double r) { return one_minus_q_radial(spec, r, -1); };
    total += spec.stable.sigma_minus *
             std::conj(detail::half_line_integral(w, alpha, az, 1.0 + p, opt));
  }
  return z > 0.0 ? total : std::conj(total);
}

// Max over probes of |C(z) - C~(z) - rho_hat(z)|, all three by independent
// routes. Must come out below 1e-6 for a correctly assembled model.
inline double exponent_identity_check(const ModelSpec& spec,
                                      const std::vector<double>& z_probes) {
  const Exponent c_stable = stable_exponent(spec.stable);
  const Exponent c_temp = tempered_exponent(spec);
  double worst = 0.0;
  for (double z : z_probes) {
    const std::complex<double> defect =
        c_stable(z) - c_temp(z) - removed_jump_exponent(spec, z);
    worst = std::max(worst, std::abs(defect));
  }
  return worst;
}

}  // namespace templev

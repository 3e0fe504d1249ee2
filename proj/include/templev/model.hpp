// Parameter families for tempered stable models: the stable base law, the
// tempering families (Tweedie exponential, symmetric power-law Rosinski,
// user-supplied radial q), validity checks for assumptions B1-B3, and the
// measure-level quantities eta, sigma, Q and the big-jump measure rho.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "templev/common.hpp"
#include "templev/quadrature.hpp"

namespace templev {

// One-dimensional stable law: Levy density sigma({xi}) * r^{-1-alpha} per
// direction xi in {-1,+1}, drift b under the alpha-dependent h-function.
struct StableParams {
  double alpha = 0.5;
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;
  double b = 0.0;

  double sigma_total() const { return sigma_plus + sigma_minus; }
  double beta_skew() const {
    const double s = sigma_total();
    return s > 0.0 ? (sigma_plus - sigma_minus) / s : 0.0;
  }
  bool symmetric() const { return sigma_plus == sigma_minus; }
};

// q(r) = exp(-c r); Q is the point mass at c, one-sided with sigma({1}) = a.
struct TweedieExp {
  double a = 1.0;
  double c = 1.0;
  double alpha = 0.5;
};

// Symmetric family with Rosinski measure density
//   scale * C * (1+|x|)^{-2-alpha-ell},  C = .5(alpha+ell+1) alpha / Gamma(1-alpha/p).
// scale = 1 normalizes eta to 1.
struct PowerLawRosinski {
  double alpha = 0.75;
  double p = 1.0;
  double ell = 1.0;
  double scale = 1.0;
};

// Arbitrary radial tempering function q(r, xi) with declared alpha and p,
// where p states the leading small-r order of 1 - q. symmetric_q declares
// q(r,+1) == q(r,-1) so symmetric models can use the cosine shortcut.
struct UserRadial {
  std::function<double(double, int)> q;
  double alpha = 0.5;
  double p = 1.0;
  bool symmetric_q = false;
};

using TemperingFamily = std::variant<TweedieExp, PowerLawRosinski, UserRadial>;

// Finite measure R on the real line, as point masses or as a density.
struct RosinskiMeasure {
  struct PointMass {
    double x;
    double w;
  };
  std::vector<PointMass> points;
  std::function<double(double)> density;  // non-null for density form
  std::optional<double> total_mass_analytic;

  bool is_density() const { return static_cast<bool>(density); }
};

struct Violation {
  std::string code;  // "domain", "B1", "B2", "B3"
  std::string message;
};

struct ModelSpec {
  StableParams stable;
  TemperingFamily tempering;
  std::optional<double> eta_cached;  // nullopt when eta diverges
  double tilde_b = 0.0;
};

namespace detail {

inline double plr_c_const(const PowerLawRosinski& f) {
  return 0.5 * (f.alpha + f.ell + 1.0) * f.alpha / std::tgamma(1.0 - f.alpha / f.p);
}

// Density of R on the half-line (each side carries this by symmetry).
inline double plr_r_density(const PowerLawRosinski& f, double x) {
  return f.scale * plr_c_const(f) * std::pow(1.0 + std::fabs(x), -2.0 - f.alpha - f.ell);
}

// Density of the (unnormalized) measure Q on one half-line, recovered from R.
//
// R is the image of |x|^{alpha/p} Q(dx) under x -> x/|x|^{1+1/p}, which in
// d = 1 maps each half-line to itself via r -> r^{-1/p}. Inverting with
// densities: rho_Q(u) = rho_R(u^{-1/p}) * u^{-(alpha+p+1)/p} / p.
// For p = 1 this reduces to scale * C * u^ell * (1+u)^{-2-alpha-ell}.
inline double plr_q_measure_density(const PowerLawRosinski& f, double u) {
  if (u <= 0.0) return 0.0;
  const double y = std::pow(u, -1.0 / f.p);
  return plr_r_density(f, y) * std::pow(u, -(f.alpha + f.p + 1.0) / f.p) / f.p;
}

// int_0^1 r^{-1-alpha} W(r) dr where W(r)/r^p is bounded near 0.
// Substituting u = r^{p-alpha} gives (1/(p-alpha)) int_0^1 [W(r)/r^p] du
// with r = u^{1/(p-alpha)}, a bounded integrand.
template <class WOverRp>
QuadResult integrate_singular_corner(const WOverRp& w_over_rp, double alpha, double p,
                                     const QuadOptions& opt = {}) {
  const double beta = p - alpha;
  if (beta <= 0.0) {
    QuadResult r;
    r.converged = false;
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  const double inv = 1.0 / beta;
  auto g = [&](double u) { return inv * w_over_rp(std::pow(u, inv)); };
  return integrate_adaptive(g, 0.0, 1.0, opt);
}

// Tail int_1^inf f(u) du for f ~ c u^{-1-beta}, beta > 0: substituting
// u = 1/v and then v = w^{1/beta} turns the slow power tail into a bounded
// integrand on (0,1], with cost independent of beta.
template <class F>
QuadResult integrate_power_tail(const F& f, double beta, const QuadOptions& opt = {}) {
  if (beta <= 0.02) {
    QuadResult r;
    r.converged = false;
    return r;
  }
  auto h = [&](double v) { return f(1.0 / v) / (v * v); };
  return integrate_adaptive_power_sub(h, 1.0, beta, opt);
}

}  // namespace detail

// The Rosinski measure of a tempering family; UserRadial has none.
inline std::optional<RosinskiMeasure> rosinski_measure(const TemperingFamily& fam) {
  if (const auto* tw = std::get_if<TweedieExp>(&fam)) {
    RosinskiMeasure r;
    r.points.push_back({1.0 / tw->c, tw->a * std::pow(tw->c, tw->alpha)});
    r.total_mass_analytic = tw->a * std::pow(tw->c, tw->alpha);
    return r;
  }
  if (const auto* pl = std::get_if<PowerLawRosinski>(&fam)) {
    RosinskiMeasure r;
    PowerLawRosinski f = *pl;
    r.density = [f](double x) { return detail::plr_r_density(f, x); };
    r.total_mass_analytic =
        f.scale * 2.0 * detail::plr_c_const(f) / (1.0 + f.alpha + f.ell);
    return r;
  }
  return std::nullopt;
}

// sigma({+1}), sigma({-1}) recovered from R via the |x|^alpha moment per sign.
inline std::pair<double, double> sigma_from_rosinski(const RosinskiMeasure& r,
                                                     double alpha) {
  if (!r.is_density()) {
    double sp = 0.0, sm = 0.0;
    for (const auto& pm : r.points) {
      if (pm.x > 0.0)
        sp += pm.w * std::pow(pm.x, alpha);
      else if (pm.x < 0.0)
        sm += pm.w * std::pow(-pm.x, alpha);
    }
    return {sp, sm};
  }
  QuadOptions opt;
  auto half_moment = [&](int sign) {
    auto f = [&](double x) { return std::pow(x, alpha) * r.density(sign * x); };
    QuadResult head = integrate_adaptive(f, 0.0, 1.0, opt);
    // No analytic tail bound is available for a user density; require the
    // octave contributions themselves to die out.
    QuadResult tail =
        integrate_upper_decaying(f, 1.0, [](double) { return 0.0; }, opt);
    if (!head.converged || !tail.converged)
      throw DivergentSigma("sigma_from_rosinski: |x|^alpha moment of R did not converge");
    return head.value + tail.value;
  };
  return {half_moment(+1), half_moment(-1)};
}

inline double family_alpha(const TemperingFamily& fam) {
  return std::visit([](const auto& f) { return f.alpha; }, fam);
}

inline double family_p(const TemperingFamily& fam) {
  if (std::holds_alternative<TweedieExp>(fam)) return 1.0;
  if (const auto* pl = std::get_if<PowerLawRosinski>(&fam)) return pl->p;
  return std::get<UserRadial>(fam).p;
}

// Tempering value q(r, xi) in [0,1] (for valid families); limit 1 as r -> 0.
inline double q_radial(const ModelSpec& spec, double r, int xi) {
  if (const auto* tw = std::get_if<TweedieExp>(&spec.tempering)) {
    return std::exp(-tw->c * r);
  }
  if (const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering)) {
    const double sigma_half = 0.5 * (spec.stable.sigma_plus + spec.stable.sigma_minus);
    if (sigma_half <= 0.0) return 1.0;
    const double rp = std::pow(r, pl->p);
    auto f = [&](double u) {
      return std::exp(-u * rp) * detail::plr_q_measure_density(*pl, u);
    };
    QuadOptions opt;
    QuadResult head = integrate_adaptive(f, 0.0, 1.0, opt);
    // rho_Q(u) ~ scale*C/p * u^{-(alpha+p+1)/p} for large u
    QuadResult tail = detail::integrate_power_tail(f, (pl->alpha + 1.0) / pl->p, opt);
    return (head.value + tail.value) / sigma_half;
  }
  const auto& ur = std::get<UserRadial>(spec.tempering);
  return ur.q(r, xi);
}

// 1 - q(r, xi) computed stably (expm1-based) for the measure-level integrals.
inline double one_minus_q_radial(const ModelSpec& spec, double r, int xi) {
  if (const auto* tw = std::get_if<TweedieExp>(&spec.tempering)) {
    return -std::expm1(-tw->c * r);
  }
  if (const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering)) {
    const double sigma_half = 0.5 * (spec.stable.sigma_plus + spec.stable.sigma_minus);
    if (sigma_half <= 0.0) return 0.0;
    const double rp = std::pow(r, pl->p);
    auto f = [&](double u) {
      return -std::expm1(-u * rp) * detail::plr_q_measure_density(*pl, u);
    };
    QuadOptions opt;
    QuadResult head = integrate_adaptive(f, 0.0, 1.0, opt);
    QuadResult tail = detail::integrate_power_tail(f, (pl->alpha + 1.0) / pl->p, opt);
    return (head.value + tail.value) / sigma_half;
  }
  const auto& ur = std::get<UserRadial>(spec.tempering);
  return 1.0 - ur.q(r, xi);
}

// (1 - q(r,xi)) / r^p evaluated as one well-scaled quantity; the limit as
// r -> 0 is the first moment of the direction's Q measure. Composing
// one_minus_q_radial with a division would lose all relative accuracy there.
inline double one_minus_q_over_rp(const ModelSpec& spec, double r, int xi) {
  const double p = family_p(spec.tempering);
  const double rp = std::pow(r, p);
  if (const auto* tw = std::get_if<TweedieExp>(&spec.tempering)) {
    return rp < 1e-280 ? tw->c : -std::expm1(-tw->c * r) / rp;
  }
  if (const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering)) {
    const double sigma_half = 0.5 * (spec.stable.sigma_plus + spec.stable.sigma_minus);
    if (sigma_half <= 0.0) return 0.0;
    auto f = [&](double u) {
      const double x = u * rp;
      const double factor = x < 1e-280 ? u : u * (-std::expm1(-x) / x);
      return factor * detail::plr_q_measure_density(*pl, u);
    };
    QuadOptions opt;
    QuadResult head = integrate_adaptive(f, 0.0, 1.0, opt);
    // u * rho_Q(u) ~ u^{-(alpha+1)/p}: the Q first moment exists iff
    // p < alpha + 1, which also bounds the substituted tail below
    QuadResult tail =
        detail::integrate_power_tail(f, (pl->alpha + 1.0) / pl->p - 1.0, opt);
    if (!head.converged || !tail.converged)
      throw QuadratureFailure("one_minus_q_over_rp: Q first-moment quadrature failed");
    return (head.value + tail.value) / sigma_half;
  }
  const auto& ur = std::get<UserRadial>(spec.tempering);
  return (1.0 - ur.q(r, xi)) / std::max(rp, 1e-300);
}

// Direction mass: sigma({xi}) * int_0^inf r^{-1-alpha} (1-q(r,xi)) dr.
// Splits at r = 1; the corner uses the u = r^{p-alpha} substitution, the tail
// uses octave extension with the envelope bound (1-q) <= 1.
inline double removed_mass_one_direction(const ModelSpec& spec, int xi) {
  const double alpha = spec.stable.alpha;
  const double p = family_p(spec.tempering);
  const double sigma_xi = (xi > 0) ? spec.stable.sigma_plus : spec.stable.sigma_minus;
  if (sigma_xi == 0.0) return 0.0;

  QuadOptions opt;
  auto w_over_rp = [&](double r) { return one_minus_q_over_rp(spec, r, xi); };
  QuadResult corner = detail::integrate_singular_corner(w_over_rp, alpha, p, opt);
  if (!corner.converged)
    throw DivergentEta("eta: small-jump integral diverges (alpha >= p?)");

  auto f = [&](double r) {
    return std::pow(r, -1.0 - alpha) * one_minus_q_radial(spec, r, xi);
  };
  // 1 - q -> 1 at infinity, so the tail decays exactly like r^{-1-alpha}
  QuadResult tail = detail::integrate_power_tail(f, alpha, opt);
  if (!tail.converged) throw DivergentEta("eta: large-jump integral did not converge");
  return sigma_xi * (corner.value + tail.value);
}

// eta by direct quadrature of the polar integral (the route independent of
// the Gamma(1-alpha/p)/alpha * R(R) identity).
inline double eta_direct_quadrature(const ModelSpec& spec) {
  return removed_mass_one_direction(spec, +1) + removed_mass_one_direction(spec, -1);
}

// Total removed-jump mass eta. Rosinski-form families use
// Gamma(1-alpha/p)/alpha * R(R); UserRadial falls back to quadrature.
inline double eta(const ModelSpec& spec) {
  const double alpha = family_alpha(spec.tempering);
  const double p = family_p(spec.tempering);
  if (auto rm = rosinski_measure(spec.tempering)) {
    if (alpha >= p)
      throw DivergentEta("eta: assumption B2 fails, alpha >= p");
    double mass;
    if (rm->total_mass_analytic) {
      mass = *rm->total_mass_analytic;
    } else if (rm->is_density()) {
      QuadOptions opt;
      QuadResult head = integrate_adaptive([&](double x) { return rm->density(x) + rm->density(-x); },
                                           0.0, 1.0, opt);
      QuadResult tail = integrate_upper_decaying(
          [&](double x) { return rm->density(x) + rm->density(-x); }, 1.0,
          [](double) { return 0.0; }, opt);
      if (!head.converged || !tail.converged)
        throw DivergentEta("eta: R total mass did not converge");
      mass = head.value + tail.value;
    } else {
      mass = 0.0;
      for (const auto& pm : rm->points) mass += pm.w;
    }
    return std::tgamma(1.0 - alpha / p) / alpha * mass;
  }
  return eta_direct_quadrature(spec);
}

// Unnormalized radial density of the removed-jump measure rho, per direction.
struct RadialJumpMeasure {
  double alpha = 0.5;
  std::function<double(double)> density_pos;  // sigma(+1) r^{-1-alpha} (1-q(r,+1))
  std::function<double(double)> density_neg;
  double mass_pos = 0.0;
  double mass_neg = 0.0;

  double total_mass() const { return mass_pos + mass_neg; }
};

inline RadialJumpMeasure big_jump_measure(const ModelSpec& spec) {
  RadialJumpMeasure m;
  m.alpha = spec.stable.alpha;
  const ModelSpec s = spec;  // captured by value: measures outlive the spec
  m.density_pos = [s](double r) {
    return s.stable.sigma_plus * std::pow(r, -1.0 - s.stable.alpha) *
           one_minus_q_radial(s, r, +1);
  };
  m.density_neg = [s](double r) {
    return s.stable.sigma_minus * std::pow(r, -1.0 - s.stable.alpha) *
           one_minus_q_radial(s, r, -1);
  };
  m.mass_pos = removed_mass_one_direction(spec, +1);
  m.mass_neg = removed_mass_one_direction(spec, -1);
  return m;
}

// Assumption checks; violations are data, not failures.
inline std::vector<Violation> validate(const ModelSpec& spec) {
  std::vector<Violation> out;
  const double alpha = spec.stable.alpha;
  // Rosinski-form families with alpha >= p have no derivable sigma; report
  // the B2 breach alone rather than the downstream artifacts
  const bool rosinski_b2_breach =
      !std::holds_alternative<UserRadial>(spec.tempering) &&
      alpha >= family_p(spec.tempering);
  if (!(alpha > 0.0 && alpha < 2.0))
    out.push_back({"domain", "alpha must lie in (0,2)"});
  if (!rosinski_b2_breach) {
    if (spec.stable.sigma_plus < 0.0 || spec.stable.sigma_minus < 0.0)
      out.push_back({"domain", "sigma masses must be nonnegative"});
    if (!(spec.stable.sigma_total() > 0.0))
      out.push_back({"B3", "sigma is identically zero"});
  }
  if (const auto* tw = std::get_if<TweedieExp>(&spec.tempering)) {
    if (!(tw->a > 0.0) || !(tw->c > 0.0))
      out.push_back({"domain", "Tweedie requires a > 0 and c > 0"});
    if (!(tw->alpha > 0.0 && tw->alpha < 1.0))
      out.push_back({"domain", "Tweedie requires alpha in (0,1)"});
  } else if (const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering)) {
    if (!(pl->p > 0.0) || !(pl->ell > 0.0) || !(pl->scale > 0.0))
      out.push_back({"domain", "PowerLawRosinski requires p, ell, scale > 0"});
  }

  // B1 on a log-spaced probe grid spanning the r -> 0 limit and the tail.
  if (!rosinski_b2_breach && (out.empty() || out.front().code != "domain")) {
    const int n_probes = 64;
    const double lo = 1e-6, hi = 1e6;
    bool b1_bad = false;
    double bad_r = 0.0, bad_q = 0.0;
    for (int i = 0; i < n_probes && !b1_bad; ++i) {
      const double r = lo * std::pow(hi / lo, i / double(n_probes - 1));
      for (int xi : {+1, -1}) {
        const double q = q_radial(spec, r, xi);
        if (q < -1e-8 || q > 1.0 + 1e-8) {
          b1_bad = true;
          bad_r = r;
          bad_q = q;
          break;
        }
      }
    }
    if (b1_bad)
      out.push_back({"B1", "q(" + std::to_string(bad_r) + ") = " + std::to_string(bad_q) +
                               " outside [0,1]"});
  }

  // B2: eta must be finite.
  try {
    (void)eta(spec);
  } catch (const DivergentEta& e) {
    out.push_back({"B2", e.what()});
  }
  return out;
}

namespace detail {

// Corollary shift integral; vanishes for alpha in (0,1) (h == 0) and for
// symmetric models (directions cancel).
inline double tilde_b_shift(const ModelSpec& spec) {
  const double alpha = spec.stable.alpha;
  if (alpha <= 1.0) return 0.0;
  if (spec.stable.symmetric()) return 0.0;
  double shift = 0.0;
  QuadOptions opt;
  for (int xi : {+1, -1}) {
    const double sigma_xi = (xi > 0) ? spec.stable.sigma_plus : spec.stable.sigma_minus;
    if (sigma_xi == 0.0) continue;
    auto f = [&](double r) {
      return std::pow(r, -alpha) * one_minus_q_radial(spec, r, xi);
    };
    QuadResult head = integrate_adaptive(f, 0.0, 1.0, opt);
    auto tail_bound = [&](double R) { return std::pow(R, 1.0 - alpha) / (alpha - 1.0); };
    QuadResult tail = integrate_upper_decaying(f, 1.0, tail_bound, opt);
    shift += xi * sigma_xi * (head.value + tail.value);
  }
  return shift;
}

}  // namespace detail

inline ModelSpec finalize_model(StableParams stable, TemperingFamily fam) {
  ModelSpec spec;
  spec.stable = stable;
  spec.tempering = std::move(fam);
  try {
    spec.eta_cached = eta(spec);
  } catch (const DivergentEta&) {
    spec.eta_cached = std::nullopt;
  }
  spec.tilde_b = stable.b - detail::tilde_b_shift(spec);
  return spec;
}

inline ModelSpec make_model(const TweedieExp& tw, double b = 0.0) {
  StableParams st;
  st.alpha = tw.alpha;
  st.sigma_plus = tw.a;
  st.sigma_minus = 0.0;
  st.b = b;
  return finalize_model(st, tw);
}

inline ModelSpec make_model(const PowerLawRosinski& pl, double b = 0.0) {
  StableParams st;
  st.alpha = pl.alpha;
  st.b = b;
  // alpha >= p violates B2 and makes the family's normalizing constant
  // meaningless; leave sigma unset so validate reports only the B2 breach
  if (pl.alpha < pl.p) {
    if (auto rm = rosinski_measure(TemperingFamily{pl})) {
      auto [sp, sm] = sigma_from_rosinski(*rm, pl.alpha);
      st.sigma_plus = sp;
      st.sigma_minus = sm;
    }
  }
  return finalize_model(st, pl);
}

inline ModelSpec make_model(const StableParams& st, const UserRadial& ur) {
  return finalize_model(st, ur);
}

// Cached eta with the divergence signalled as an exception.
inline double eta_or_throw(const ModelSpec& spec) {
  if (!spec.eta_cached) throw DivergentEta("eta: assumption B2 fails for this model");
  return *spec.eta_cached;
}

}  // namespace templev

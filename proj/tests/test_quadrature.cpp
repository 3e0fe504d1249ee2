#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "templev/quadrature.hpp"

using namespace templev;

TEST_CASE("adaptive GK reproduces elementary integrals") {
  auto r1 = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
  REQUIRE(r1.converged);
  CHECK_THAT(r1.value, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));

  auto r2 = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, pi);
  CHECK_THAT(r2.value, Catch::Matchers::WithinAbs(2.0, 1e-11));

  auto r3 = integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK_THAT(r3.value, Catch::Matchers::WithinAbs(std::sqrt(pi), 1e-10));
}

TEST_CASE("power substitution handles endpoint singularities") {
  // int_0^1 x^{-1/2} dx = 2: integrand ~ z^{gamma-1} with gamma = 1/2
  auto r = integrate_adaptive_power_sub([](double x) { return 1.0 / std::sqrt(x); },
                                        1.0, 0.5);
  REQUIRE(r.converged);
  CHECK_THAT(r.value, Catch::Matchers::WithinAbs(2.0, 1e-10));

  // int_0^2 x^{-0.25} dx = 2^{0.75}/0.75
  auto r2 = integrate_adaptive_power_sub([](double x) { return std::pow(x, -0.25); },
                                         2.0, 0.75);
  CHECK_THAT(r2.value, Catch::Matchers::WithinAbs(std::pow(2.0, 0.75) / 0.75, 1e-10));
}

TEST_CASE("semi-infinite octave integration with tail bounds") {
  auto r1 = integrate_upper_decaying([](double x) { return 1.0 / (x * x); }, 1.0,
                                     [](double R) { return 1.0 / R; });
  REQUIRE(r1.converged);
  CHECK_THAT(r1.value, Catch::Matchers::WithinAbs(1.0, 1e-8));

  auto r2 = integrate_upper_decaying([](double x) { return std::exp(-x); }, 0.0,
                                     [](double R) { return std::exp(-R); });
  CHECK_THAT(r2.value, Catch::Matchers::WithinAbs(1.0, 1e-10));
}

TEST_CASE("oscillatory cosine tail integration") {
  // int_0^inf cos(x)/(1+x^2) dx = pi/(2e)
  auto g = [](double x) { return 1.0 / (1.0 + x * x); };
  auto r = integrate_oscillatory_cos(g, 1.0, 0.0, 0.0, g);
  REQUIRE(r.converged);
  CHECK_THAT(r.value, Catch::Matchers::WithinAbs(pi / (2.0 * std::exp(1.0)), 1e-9));

  // int_1^inf sin(x)/x dx = pi/2 - Si(1)
  auto h = [](double x) { return 1.0 / x; };
  auto r2 = integrate_oscillatory_cos(h, 1.0, -0.5 * pi, 1.0, h);
  const double si1 = 0.9460830703671830;
  CHECK_THAT(r2.value, Catch::Matchers::WithinAbs(pi / 2.0 - si1, 1e-8));

  // higher frequency: int_0^inf cos(7x) e^{-x} dx = 1/(1+49)
  auto e = [](double x) { return std::exp(-x); };
  auto r3 = integrate_oscillatory_cos(e, 7.0, 0.0, 0.0, e);
  CHECK_THAT(r3.value, Catch::Matchers::WithinAbs(1.0 / 50.0, 1e-9));
}

TEST_CASE("adaptive quadrature reports unresolvable integrands") {
  // non-integrable singularity: must not claim convergence
  QuadOptions opt;
  opt.max_segments = 128;
  auto r = integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, opt);
  CHECK_FALSE(r.converged);
}

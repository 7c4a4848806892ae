#include <cmath>
#include <numbers>

#include "doctest.h"
#include "misanthrope/burgers.hpp"
#include "misanthrope/errors.hpp"

using namespace misanthrope;

namespace {
Profile sine(double amp, std::size_t m = 4096) {
  return Profile::sample([amp](double x) { return amp * std::sin(2 * std::numbers::pi * x); }, m);
}
}  // namespace

TEST_CASE("shock time of 0.5 sin(2 pi x) with c0 = -2") {
  CHECK(shock_time(sine(0.5), -2.0) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-9));
  CHECK(std::isinf(shock_time(Profile::sample([](double) { return 0.3; }, 64), -2.0)));
}

TEST_CASE("characteristics satisfy the implicit relation") {
  const CharacteristicSolution sol(sine(0.5), -2.0);
  const auto u0 = [](double x) { return 0.5 * std::sin(2 * std::numbers::pi * x); };
  for (double t : {0.02, 0.08, 0.14}) {
    for (double x : {0.0, 0.13, 0.5, 0.77}) {
      const double u = sol(t, x);
      CHECK(u == doctest::Approx(u0(x - (-2.0) * u * t)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(sol(0.96 / (2 * std::numbers::pi), 0.1), HorizonError);
}

TEST_CASE("dx matches a finite difference") {
  const CharacteristicSolution sol(sine(0.5), -2.0);
  const double t = 0.1, h = 1e-5;
  for (double x : {0.05, 0.4, 0.9}) {
    CHECK(sol.dx(t, x) == doctest::Approx((sol(t, x + h) - sol(t, x - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("Godunov flux") {
  const auto f = [](double u, double c0) { return 0.5 * c0 * u * u; };
  for (double c0 : {-2.0, 1.0}) {
    for (double u : {-0.4, 0.0, 0.7}) CHECK(godunov_flux(u, u, c0) == doctest::Approx(f(u, c0)));
  }
  // Transonic rarefaction for convex flux: f(0).
  CHECK(godunov_flux(-1.0, 1.0, 1.0) == doctest::Approx(0.0));
  // Shock for convex flux: the larger of the two.
  CHECK(godunov_flux(1.0, -0.5, 1.0) == doctest::Approx(0.5));
  // Concave flux (c0 < 0): rarefaction when uL > uR, the extremum f(0) = 0 is the max.
  CHECK(godunov_flux(0.5, -0.5, -2.0) == doctest::Approx(0.0));
}

TEST_CASE("Godunov agrees with characteristics before the shock") {
  const auto u0 = sine(0.5);
  const double t = 0.05;
  const std::size_t m = 4096;
  const auto god = solve_godunov(u0, -2.0, t, m);
  const auto ch = solve_characteristics(u0, -2.0, t, m);
  CHECK(l1_distance(god, ch) <= 2e-4);
  CHECK(god.integral() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(solve_godunov(u0, -2.0, t, m, 1.2), std::invalid_argument);
}

TEST_CASE("Godunov converges at first order") {
  const auto u0 = sine(0.5);
  const double t = 0.08;
  const auto e1 = l1_distance(solve_godunov(u0, -2.0, t, 256), solve_characteristics(u0, -2.0, t, 256));
  const auto e2 = l1_distance(solve_godunov(u0, -2.0, t, 512), solve_characteristics(u0, -2.0, t, 512));
  const auto e3 = l1_distance(solve_godunov(u0, -2.0, t, 1024), solve_characteristics(u0, -2.0, t, 1024));
  CHECK(std::log2(e1 / e2) > 0.8);
  CHECK(std::log2(e2 / e3) > 0.8);
}

TEST_CASE("constant data is stationary") {
  const auto c = Profile::sample([](double) { return 0.25; }, 128);
  const auto g = solve_godunov(c, -2.0, 0.3, 128);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(0.25));
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "misanthrope/errors.hpp"
#include "misanthrope/equilibrium.hpp"

using namespace misanthrope;

TEST_CASE("tasep flux oracle") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  for (int i = 0; i <= 20; ++i) {
    const double v = 0.025 + 0.95 * i / 20.0;
    CHECK(std::abs(fam.flux_hat(v) - v * (1 - v)) <= 1e-10);
  }
  const auto fc = fam.flux_derivatives(0.5);
  CHECK(std::abs(fc.a0 - 0.25) <= 1e-6);
  CHECK(std::abs(fc.b0) <= 1e-6);
  CHECK(std::abs(fc.c0 + 2.0) <= 1e-6);
  CHECK_FALSE(fc.degenerate);
}

TEST_CASE("zero-range flux oracle") {
  const auto fam = EquilibriumFamily::build(catalog::zero_range(RFunction::linear()));
  for (int i = 0; i <= 20; ++i) {
    const double v = 0.1 + 0.2 * i;
    CHECK(std::abs(fam.flux_hat(v) - v) <= 1e-10);
  }
  const auto fc = fam.flux_derivatives(1.0);
  CHECK(fc.degenerate);
}

TEST_CASE("Poisson tilt for r(x) = x") {
  const auto fam = EquilibriumFamily::build(catalog::zero_range(RFunction::linear()));
  for (double theta : {-1.0, 0.0, 0.7}) {
    const auto m = fam.moments(theta);
    CHECK(m.mean == doctest::Approx(std::exp(theta)).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(std::exp(theta)).epsilon(1e-10));
    CHECK(m.F == doctest::Approx(std::exp(theta) - 1.0).epsilon(1e-10));
  }
}

TEST_CASE("theta round trip across the catalog") {
  std::mt19937_64 rng(11);
  for (const auto& m : {catalog::tasep(), catalog::k_exclusion(2), catalog::k_exclusion(3), catalog::k_exclusion2(1.0, 0.5, 0.7),
                        catalog::zero_range(RFunction::linear()), catalog::bricklayers(RFunction::linear())}) {
    CAPTURE(m.name());
    const auto fam = EquilibriumFamily::build(m);
    const auto [lo, hi] = fam.density_range();
    const double a = std::isfinite(lo) ? lo : -5.0, b = std::min(hi, a + 10.0);
    std::uniform_real_distribution<double> u(a + 0.01 * (b - a), b - 0.01 * (b - a));
    for (int i = 0; i < 100; ++i) {
      const double v = u(rng);
      CHECK(std::abs(fam.v_of_theta(fam.theta_of_v(v)) - v) <= 1e-12 * std::max(1.0, std::abs(v)));
    }
  }
}

TEST_CASE("F derivatives by finite differences") {
  const auto fam = EquilibriumFamily::build(catalog::k_exclusion(3));
  const double h = 1e-4;
  for (double th : {-1.0, 0.0, 0.8}) {
    const auto m = fam.moments(th);
    CHECK((fam.F(th + h) - fam.F(th - h)) / (2 * h) == doctest::Approx(m.mean).epsilon(1e-7));
    CHECK((fam.v_of_theta(th + h) - fam.v_of_theta(th - h)) / (2 * h) == doctest::Approx(m.variance).epsilon(1e-7));
  }
}

TEST_CASE("site entropy equals the direct sum") {
  const auto fam = EquilibriumFamily::build(catalog::k_exclusion(2));
  const double t1 = -0.3, t2 = 0.9;
  const auto p1 = fam.tilted_pmf(t1), p2 = fam.tilted_pmf(t2);
  double direct = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) direct += p2[i] * std::log(p2[i] / p1[i]);
  CHECK(fam.site_entropy(t2, t1) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(fam.site_entropy(t1, t1) == doctest::Approx(0.0));
}

TEST_CASE("domain errors") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  CHECK_THROWS_AS(fam.theta_of_v(1.5), DomainError);
  CHECK_THROWS_AS(fam.theta_of_v(-0.1), DomainError);
  CHECK_THROWS_AS(EquilibriumFamily::build(catalog::zero_range(RFunction::constant(1.0))), DivergenceError);
}

TEST_CASE("K = 1 exclusion coincides with tasep") {
  const auto a = EquilibriumFamily::build(catalog::tasep());
  const auto b = EquilibriumFamily::build(catalog::k_exclusion(1));
  for (double v : {0.1, 0.5, 0.8}) CHECK(a.flux_hat(v) == doctest::Approx(b.flux_hat(v)).epsilon(1e-13));
}

TEST_CASE("tilted cdf ends at one") {
  const auto fam = EquilibriumFamily::build(catalog::zero_range(RFunction::linear()));
  const auto cdf = fam.tilted_cdf(0.5);
  CHECK(cdf.back() == 1.0);
  for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i] >= cdf[i - 1]);
}

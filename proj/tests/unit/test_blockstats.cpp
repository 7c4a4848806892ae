#include <cmath>
#include <numbers>

#include "doctest.h"
#include "misanthrope/blockstats.hpp"
#include "misanthrope/errors.hpp"

using namespace misanthrope;

TEST_CASE("corollary statistic") {
  // z_j = v0 + 1{j even} - 1/2 style checks: a flat half-filled lattice gives zero.
  std::vector<int> z(1000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = i % 2;
  const auto c = Configuration::from_spins(z);
  CHECK(std::abs(corollary_statistic(c, TrigPolynomial::constant(1.0), 0.15, 0.5, 0.0, 0.0)) < 1e-12);
  // A single extra particle at site 0: N^{-1+beta} phi(0) (1 - v0) minus the uniform part.
  std::vector<int> one(100, 0);
  one[25] = 1;
  const double s = corollary_statistic(Configuration::from_spins(one), TrigPolynomial::sine(1.0, 1), 0.1, 0.0, 0.0, 0.0);
  CHECK(s == doctest::Approx(std::pow(100.0, -0.9) * 1.0));
  // Frame shift: b0 t N^{1+beta} = 25 sites moves site 25 to x = 0.
  const double shifted =
      corollary_statistic(Configuration::from_spins(one), TrigPolynomial::cosine(1.0, 1), 0.1, 0.0, 1.0,
                          25.0 / std::pow(100.0, 1.1));
  CHECK(shifted == doctest::Approx(std::pow(100.0, -0.9)));
}

TEST_CASE("entropy expansion") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  const auto zero = [](double) { return 0.0; };
  const auto u2 = [](double x) { return 0.3 * std::sin(2 * std::numbers::pi * x); };
  const auto same = entropy_between_profiles(fam, 1000, 0.15, 0.5, u2, u2);
  CHECK(same.exact == 0.0);
  CHECK(same.expansion == doctest::Approx(0.0));
  const auto e = entropy_between_profiles(fam, 10000, 0.15, 0.5, zero, u2);
  // Leading term: N^{1-2beta} theta0' int u2^2 / 2 with theta0' = 4.
  const double lead = std::pow(1e4, 0.7) * 4.0 * 0.045 * 0.5;
  CHECK(e.expansion == doctest::Approx(lead).epsilon(1e-6));
  CHECK(e.exact == doctest::Approx(lead).epsilon(0.02));
}

TEST_CASE("theta profile obeys the transport identity") {
  const auto fam = EquilibriumFamily::build(catalog::k_exclusion(2));
  const double v0 = 0.7;
  const auto fc = fam.flux_derivatives(v0);
  const CharacteristicSolution sol(
      Profile::sample([](double x) { return 0.4 * std::sin(2 * std::numbers::pi * x); }, 4096), fc.c0);
  const std::size_t n = 500;
  const double beta = 0.1, t = 0.05, h = 1e-6;
  const auto p = theta_profile(fam, sol, n, beta, v0, fc.b0, t);
  const auto pp = theta_profile(fam, sol, n, beta, v0, fc.b0, t + h);
  const auto pm = theta_profile(fam, sol, n, beta, v0, fc.b0, t - h);
  const auto rhs = theta_time_derivative(p, sol);
  const double eps = std::pow(double(n), -beta);
  for (std::size_t j = 0; j < n; j += 37) {
    const double lhs = (pp.theta[j] - pm.theta[j]) / (2 * h);
    // The identity holds up to the O(eps) curvature of theta(v).
    CHECK(std::abs(lhs - rhs[j]) <= 0.5 * eps * std::abs(rhs[j]) + 1e-3);
  }
}

TEST_CASE("zeta laws") {
  Rng rng(1);
  const auto z = ZetaDistribution::rademacher();
  CHECK(z.variance() == 1.0);
  CHECK(z.log_mgf(0.3) == doctest::Approx(std::log(std::cosh(0.3))));
  double s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double s = z.sample_sum(100, rng);
    CHECK(std::fmod(std::abs(s), 2.0) == 0.0);
    s2 += s * s;
  }
  CHECK(s2 / n == doctest::Approx(100.0).epsilon(0.05));
  CHECK_THROWS_AS(ZetaDistribution::discrete({0.0, 1.0}, {0.5, 0.5}), ConfigError);
  const auto d = ZetaDistribution::discrete({-2.0, 1.0}, {1.0 / 3, 2.0 / 3});
  CHECK(d.variance() == doctest::Approx(2.0));
  CHECK(ZetaDistribution::gaussian(2.0).log_mgf(1.0) == doctest::Approx(2.0));
}

TEST_CASE("kurschak probe") {
  KurschakSpec spec;
  spec.g = GFunction::zero();
  spec.samples = 1000;
  CHECK(kurschak_probe(spec).estimate == 1.0);

  spec.g = GFunction::quadratic_cap();
  spec.gamma = 1.2;
  CHECK_THROWS_AS(kurschak_probe(spec), ConfigError);

  spec.gamma = 0.3;
  spec.g = {[](double x) { return x * x; }, 2.0, 1.0};
  CHECK_THROWS_AS(kurschak_probe(spec), ConfigError);

  spec.g = GFunction::quadratic_cap();
  CHECK(kurschak_limit(spec.zeta, spec.g, 0.3) == doctest::Approx(1.0 / std::sqrt(0.7)));
  spec.l = 256;
  spec.samples = 100000;
  const auto est = kurschak_probe(spec);
  CHECK(std::abs(est.estimate - est.limit) < 4 * est.stderr_ + 0.01);
}

#include <cmath>

#include "doctest.h"
#include "misanthrope/errors.hpp"
#include "misanthrope/rng.hpp"
#include "misanthrope/spectral.hpp"

using namespace misanthrope;

namespace {
const auto kTasep = catalog::tasep();
const auto kTasepFam = EquilibriumFamily::build(kTasep);
const auto kK2 = catalog::k_exclusion(2);
const auto kK2Fam = EquilibriumFamily::build(kK2);

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = 2 * uniform01(rng) - 1;
  return v;
}
}  // namespace

TEST_CASE("tasep l = 2, k = 1") {
  const auto e = enumerate_sector(kTasep, kTasepFam, 2, 1);
  REQUIRE(e.size() == 2);
  CHECK(e.pi[0] == doctest::Approx(0.5));
  CHECK(e.mass == doctest::Approx(0.5));
  const auto a = *e.index_of({1, 0});
  std::vector<double> f(2, 0.0);
  f[a] = 1.0;
  CHECK(dirichlet(e, f) == doctest::Approx(0.25));
  CHECK(dirichlet_reversed(e, f) == doctest::Approx(0.25));
  CHECK(spectral_gap(e).gap == doctest::Approx(1.0));
  for (double amp : {0.1, 1.0}) {
    std::vector<double> v(2);
    v[a] = amp;
    v[1 - a] = -amp;
    CHECK(sigma_bar(e, v).value == doctest::Approx(-0.5 + 0.5 * std::sqrt(1 + 4 * amp * amp)).epsilon(1e-12));
    CHECK(sigma_bar(e, v).variational == doctest::Approx(sigma_bar(e, v).value).epsilon(1e-10));
  }
  std::vector<double> v(2);
  v[a] = 1.0;
  v[1 - a] = -1.0;
  const auto g = check_gappert(e, v, 0.2);
  CHECK(g.rho == doctest::Approx(1.0));
  CHECK(g.rhs == doctest::Approx(0.04 / 0.6));
  CHECK(g.holds);
  CHECK_THROWS_AS(check_gappert(e, v, 0.6), DomainError);
}

TEST_CASE("sector edge cases") {
  CHECK_THROWS_AS(enumerate_sector(kTasep, kTasepFam, 3, 5), SectorError);
  CHECK_THROWS_AS(enumerate_sector(kTasep, kTasepFam, 11, 5), DomainError);
  const auto one = enumerate_sector(kK2, kK2Fam, 1, 2);
  CHECK(one.size() == 1);
  CHECK(one.pi[0] == 1.0);
  CHECK(std::isinf(spectral_gap(one).gap));
  const auto zr = catalog::zero_range(RFunction::linear());
  const auto zf = EquilibriumFamily::build(zr);
  CHECK_THROWS_AS(enumerate_sector(zr, zf, 3, 2), DomainError);
  const auto clipped = enumerate_sector(zr, zf, 3, 2, SpinWindow{0, 2});
  CHECK(clipped.size() == 6);
  double total = 0.0;
  for (int k = 0; k <= 6; ++k) total += enumerate_sector(zr, zf, 3, k, SpinWindow{0, 2}).mass;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("forward and reversed Dirichlet forms agree") {
  const auto e = enumerate_sector(kK2, kK2Fam, 4, 3);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_vec(e.size(), rng);
    CHECK(std::abs(dirichlet(e, f) - dirichlet_reversed(e, f)) <= 1e-12);
    CHECK(dirichlet(e, f) >= 0.0);
  }
  const std::vector<double> c(e.size(), 3.0);
  CHECK(dirichlet(e, c) == 0.0);
  CHECK_THROWS_AS(dirichlet(e, std::vector<double>(2, 1.0)), std::invalid_argument);
}

TEST_CASE("generator structure") {
  for (int k = 1; k <= 7; ++k) {
    const auto e = enumerate_sector(kK2, kK2Fam, 4, k);
    CAPTURE(k);
    CHECK(row_sum_residual(generator_matrix(e)) <= 1e-12);
    CHECK(row_sum_residual(reversed_generator_matrix(e)) <= 1e-12);
    CHECK(irreducible(e));
    // The symmetrized and the ring dynamics keep pi^l_k.
    CHECK(stationarity_residual(e, 0.5 * (generator_matrix(e) + reversed_generator_matrix(e))) <= 1e-12);
    CHECK(stationarity_residual(e, periodic_generator_matrix(e)) <= 1e-12);
    const auto g = spectral_gap(e);
    CHECK(std::abs(g.ground) <= 1e-10);
    CHECK(g.rayleigh == doctest::Approx(g.gap).epsilon(1e-8));
  }
}

TEST_CASE("free-boundary generator is not pi-stationary") {
  // Only the bond inside the segment moves mass to the right; nothing returns it.
  const auto e = enumerate_sector(kTasep, kTasepFam, 2, 1);
  CHECK(stationarity_residual(e, generator_matrix(e)) == doctest::Approx(0.5));
}

TEST_CASE("sigma_bar properties") {
  const auto e = enumerate_sector(kK2, kK2Fam, 4, 4);
  const std::vector<double> zero(e.size(), 0.0), c(e.size(), 0.7);
  CHECK(std::abs(sigma_bar(e, zero).value) <= 1e-12);
  CHECK(sigma_bar(e, c).value == doctest::Approx(0.7));
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const auto v = random_vec(e.size(), rng);
    const auto s = sigma_bar(e, v);
    CHECK(s.value >= mean(e, v) - 1e-12);
    CHECK(std::abs(s.value - s.variational) <= 1e-8);
  }
}

TEST_CASE("gappert on random potentials") {
  const auto e = enumerate_sector(kK2, kK2Fam, 4, 4);
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    auto v = random_vec(e.size(), rng);
    const double m = mean(e, v);
    for (auto& x : v) x -= m;
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    const double eps = 0.5 / (2 * sup * (1.0 / spectral_gap(e).gap));
    CHECK(check_gappert(e, v, eps).holds);
  }
}

TEST_CASE("canonical expectations") {
  const auto e = enumerate_sector(kK2, kK2Fam, 5, 4);
  CHECK(canonical_expectation(e, Cylinder::spin()).mean == doctest::Approx(0.8));
  const auto f = Cylinder::flux(kK2);
  const auto e2 = enumerate_sector(kK2, kK2Fam, 2, 3);
  double direct = 0.0;
  for (std::size_t a = 0; a < e2.size(); ++a) direct += e2.pi[a] * kK2.rate(e2.states[a][1], e2.states[a][0]);
  CHECK(canonical_expectation(e2, f).mean == doctest::Approx(direct));
  const auto e1 = enumerate_sector(kK2, kK2Fam, 1, 1);
  CHECK_THROWS_AS(canonical_expectation(e1, f), DomainError);
  // Tasep at half filling: E^l_k(Phi) = l / (4 (l - 1)).
  for (int l : {2, 4, 6, 8}) {
    const auto t = enumerate_sector(kTasep, kTasepFam, l, l / 2);
    CHECK(canonical_expectation(t, Cylinder::flux(kTasep)).mean == doctest::Approx(l / (4.0 * (l - 1))));
  }
  CHECK(grand_canonical_expectation(kTasepFam, Cylinder::flux(kTasep), 0.5) == doctest::Approx(0.25));
}

TEST_CASE("dirsum and convexity on the tasep torus") {
  const auto rep = check_dirsum_convex(kTasep, kTasepFam, 4, 2, 50, 123);
  CHECK(rep.max_dirsum_violation < 1e-10);
  CHECK(rep.convex_violations == 0);
  CHECK(rep.constant_lhs == doctest::Approx(0.0));
  CHECK(rep.constant_rhs == doctest::Approx(0.0));
  CHECK(rep.product_direct == doctest::Approx(rep.product_closed).epsilon(1e-12));
  const auto k2 = check_dirsum_convex(kK2, kK2Fam, 4, 3, 10, 7);
  CHECK(k2.max_dirsum_violation < 1e-10);
  CHECK(k2.convex_violations == 0);
  CHECK(k2.product_direct == doctest::Approx(k2.product_closed).epsilon(1e-12));
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1, 2, 4, 8}, y{1, 0.5, 0.25, 0.125};
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.0));
}

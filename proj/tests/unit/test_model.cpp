#include "doctest.h"
#include "misanthrope/errors.hpp"
#include "misanthrope/equilibrium.hpp"
#include "misanthrope/model.hpp"

using namespace misanthrope;

TEST_CASE("tasep passes A-C") {
  const auto m = catalog::tasep();
  const auto rep = validate_conditions(m);
  CHECK(rep.all_passed());
  REQUIRE(rep.find("A") != nullptr);
  CHECK(rep.find("B")->passed);
  CHECK(rep.find("C")->passed);
  CHECK(m.rate(1, 0) == 1.0);
  CHECK(m.rate(0, 1) == 0.0);
  CHECK(m.rate(1, 1) == 0.0);
}

TEST_CASE("catalog models validate") {
  for (const auto& m : {catalog::k_exclusion(2), catalog::k_exclusion(3, 0.5), catalog::k_exclusion2(1.0, 0.5, 0.7),
                        catalog::zero_range(RFunction::linear()), catalog::zero_range(RFunction::affine(1.0, 0.5)),
                        catalog::bricklayers(RFunction::linear())}) {
    CAPTURE(m.name());
    const auto rep = validate_conditions(m, 32);
    CHECK(rep.all_passed());
  }
}

TEST_CASE("condition A failure names a counterexample") {
  // c(0, y) must vanish at z_min = 0.
  const auto m = RateModel::from_table(0, 1, {0.3, 0.0, 1.0, 0.0});
  const auto rep = validate_conditions(m);
  CHECK_FALSE(rep.all_passed());
  REQUIRE(rep.find("A")->counterexample.has_value());
}

TEST_CASE("structural errors") {
  CHECK_THROWS_AS(RateModel::from_table(0, 1, {}), ModelError);
  CHECK_THROWS_AS(validate_conditions(RateModel::from_table(0, 1, {0.0, 0.0, -1.0, 0.0})), ModelError);
}

TEST_CASE("derive_r recovers the K-exclusion ratios") {
  // c(x, y) = x (K - y) gives r(x) proportional to x / (K - x + 1), normalized by r(1) = c(1, 0) = K.
  const int K = 3;
  const auto r = derive_r(catalog::k_exclusion(K));
  CHECK(r(0) == 0.0);
  CHECK(r(1) == doctest::Approx(3.0));
  CHECK(r(2) == doctest::Approx(9.0));
  CHECK(r(3) == doctest::Approx(27.0));
  CHECK(r(4) == std::numeric_limits<double>::infinity());
}

TEST_CASE("derive_r rejects an inconsistent table") {
  auto c = catalog::k_exclusion(3).table();
  c[1 * 4 + 1] *= 1.1;  // c(1, 1)
  const auto m = RateModel::from_table(0, 3, c);
  CHECK_THROWS_AS(derive_r(m), ConsistencyError);
  CHECK_FALSE(validate_conditions(m).find("C")->passed);
}

TEST_CASE("derive_r is the identity on zero-range r") {
  const auto m = catalog::zero_range(RFunction::affine(2.0, 0.5));
  const auto r = derive_r(m, 16);
  for (int x = 1; x <= 16; ++x) CHECK(r(x) == doctest::Approx(m.defining_r(x)));
}

TEST_CASE("gauge: rescaling r leaves the tilted laws unchanged") {
  const auto base = EquilibriumFamily::build(catalog::zero_range(RFunction::linear(1.0)));
  for (double lambda : {0.5, 2.0}) {
    const auto fam = EquilibriumFamily::build(catalog::zero_range(RFunction::linear(lambda)));
    for (double v : {0.3, 1.0, 2.5}) {
      const auto p = base.tilted_pmf(base.theta_of_v(v));
      const auto q = fam.tilted_pmf(fam.theta_of_v(v));
      const std::size_t n = std::min(p.size(), q.size());
      for (std::size_t i = 0; i < n; ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-9));
      CHECK(fam.flux_hat(v) == doctest::Approx(lambda * base.flux_hat(v)).epsilon(1e-10));
    }
  }
}

TEST_CASE("bricklayers constraint") {
  const auto m = catalog::bricklayers(RFunction::linear());
  for (int z = -5; z <= 5; ++z) CHECK(m.defining_r(z) * m.defining_r(1 - z) == doctest::Approx(1.0));
  // A two-sided table that breaks r(z) r(1 - z) = 1.
  CHECK_THROWS_AS(catalog::bricklayers(RFunction::table({0.5, 3.0, 1.0, 2.0, 3.0}, -1)), ModelError);
}

TEST_CASE("growth condition D on zero-range") {
  const auto rep = validate_conditions(catalog::zero_range(RFunction::linear()), 32);
  REQUIRE(rep.find("D(i)") != nullptr);
  CHECK(rep.find("D(i)")->passed);
  CHECK(rep.find("D(ii)")->passed);
  const auto flat = validate_conditions(catalog::zero_range(RFunction::constant(1.0)), 32);
  CHECK_FALSE(flat.find("D(ii)")->passed);
}

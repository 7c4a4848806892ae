#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "doctest.h"
#include "misanthrope/errors.hpp"
#include "misanthrope/rng.hpp"
#include "misanthrope/simulate.hpp"

using namespace misanthrope;

TEST_CASE("sum tree") {
  std::vector<double> w{0.5, 0.0, 2.0, 1.5, 0.25};
  RateIndex idx(w);
  CHECK(idx.total() == doctest::Approx(4.25));
  CHECK(idx.find(0.0) == 0);
  CHECK(idx.find(0.49) == 0);
  CHECK(idx.find(0.5) == 2);
  CHECK(idx.find(2.6) == 3);
  CHECK(idx.find(4.2) == 4);
  idx.set(2, 0.0);
  CHECK(idx.total() == doctest::Approx(2.25));
  CHECK(idx.find(0.6) == 3);
}

TEST_CASE("two-site tasep matches the two-state chain") {
  // (1,0) <-> (0,1) at rate 1 both ways: P(same state at t) = (1 + e^{-2t}) / 2.
  const int runs = 40000;
  const double t = 0.5;
  int same = 0;
  for (int i = 0; i < runs; ++i) {
    KmcSimulator sim(catalog::tasep(), Configuration::from_spins({1, 0}), Rng(seed_plan(3, i, 0)));
    sim.run_until(t);
    same += sim.configuration().z[0] == 1;
  }
  const double p = 0.5 * (1 + std::exp(-2 * t));
  const double se = std::sqrt(p * (1 - p) / runs);
  CHECK(std::abs(same / double(runs) - p) < 4 * se);
}

TEST_CASE("three-site zero-range matches uniformization") {
  const auto model = catalog::zero_range(RFunction::linear());
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, int> index;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b) {
      std::vector<int> s{a, b, 2 - a - b};
      index[s] = static_cast<int>(states.size());
      states.push_back(s);
    }
  const int n = static_cast<int>(states.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < 3; ++j) {
      auto z = states[s];
      const double c = model.rate(z[j], z[(j + 1) % 3]);
      if (c <= 0) continue;
      --z[j];
      ++z[(j + 1) % 3];
      q(s, index[z]) += c;
      q(s, s) -= c;
    }
  const double t = 0.7, lam = 6.0;
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + q / lam;
  Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(n), term = Eigen::RowVectorXd::Zero(n);
  term(index[{2, 0, 0}]) = std::exp(-lam * t);
  for (int k = 0; k < 200; ++k) {
    dist += term;
    term = term * p * (lam * t / (k + 1));
  }
  const int runs = 30000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < runs; ++i) {
    KmcSimulator sim(model, Configuration::from_spins({2, 0, 0}), Rng(seed_plan(5, i, 0)));
    sim.run_until(t);
    ++counts[index[sim.configuration().z]];
  }
  for (int s = 0; s < n; ++s) {
    const double ph = counts[s] / double(runs);
    const double se = std::sqrt(dist(s) * (1 - dist(s)) / runs) + 1e-12;
    CAPTURE(s);
    CHECK(std::abs(ph - dist(s)) < 4.5 * se);
  }
}

TEST_CASE("pending jump: split runs equal one run") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  Rng r1(9);
  const auto init = sample_product(fam, 200, 0.0, r1);
  KmcSimulator a(catalog::tasep(), init, Rng(17));
  KmcSimulator b(catalog::tasep(), init, Rng(17));
  a.run_until(3.0);
  a.run_until(7.5);
  b.run_until(7.5);
  CHECK(a.configuration().z == b.configuration().z);
  CHECK(a.events() == b.events());
  CHECK(a.pending_time() == b.pending_time());
}

TEST_CASE("conservation and event rate at equilibrium") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  Rng r(21);
  const std::size_t n = 2000;
  const auto init = sample_product(fam, n, 0.0, r);
  KmcSimulator sim(catalog::tasep(), init, Rng(22));
  sim.run_until(20.0);
  CHECK(sim.configuration().total == init.total);
  long long s = 0;
  for (int z : sim.configuration().z) s += z;
  CHECK(s == init.total);
  // Expected events ~ N * Phi_hat(1/2) * t = 10000.
  const double e = static_cast<double>(sim.events());
  CHECK(std::abs(e - 10000.0) < 600.0);
}

TEST_CASE("event count scales with N and time") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  double per_site_time[2];
  int idx = 0;
  for (std::size_t n : {1000u, 4000u}) {
    Rng r(31 + n);
    KmcSimulator sim(catalog::tasep(), sample_product(fam, n, 0.0, r), Rng(32 + n));
    sim.run_until(10.0);
    per_site_time[idx++] = static_cast<double>(sim.events()) / (10.0 * n);
  }
  CHECK(per_site_time[0] == doctest::Approx(0.25).epsilon(0.06));
  CHECK(per_site_time[1] == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("initial sampling follows the perturbed profile") {
  const auto fam = EquilibriumFamily::build(catalog::tasep());
  Rng r(4);
  const std::size_t n = 200000;
  const double beta = 0.15;
  const auto c = sample_initial(fam, n, beta, 0.5, TrigPolynomial::sine(0.5, 1), r);
  const auto prof = measure_density(c, beta, 0.5, 0.0, 4000, 0.0, 20);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    // block noise sd: N^beta * 0.5 / sqrt(4000) ~ 0.05
    CHECK(std::abs(prof[i] - 0.5 * std::sin(2 * std::numbers::pi * prof.x(i))) < 0.25);
  }
}

TEST_CASE("measure_density on a flat configuration") {
  std::vector<int> z(1000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = i % 2;
  const auto prof = measure_density(Configuration::from_spins(z), 0.1, 0.5, 0.0, 20, 0.0, 50);
  for (std::size_t i = 0; i < prof.size(); ++i) CHECK(prof[i] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("seed plan is injective on a million triples") {
  std::set<std::uint64_t> seen;
  for (std::uint32_t r = 0; r < 1000; ++r)
    for (std::uint32_t c = 0; c < 1000; ++c) seen.insert(seed_plan(42, r, c));
  CHECK(seen.size() == 1000000u);
  CHECK(seed_plan(42, 0, 0) != seed_plan(42, 1, 0));
  CHECK(seed_plan(42, 3, 7) == seed_plan(42, 3, 7));
}

TEST_CASE("replicas are independent of order and threading") {
  const auto model = catalog::tasep();
  const auto fam = EquilibriumFamily::build(model);
  ExperimentConfig cfg;
  cfg.N = 400;
  cfg.times = {0.01, 0.03};
  cfg.T = 0.03;
  cfg.replicas = 4;
  cfg.seed = 99;
  cfg.profile_points = 20;
  const auto a = run_replicas(model, fam, cfg, 0.0);
  cfg.threads = 3;
  const std::vector<std::uint32_t> order{3, 1, 0, 2};
  const auto b = run_replicas(model, fam, cfg, 0.0, {}, order);
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].events == b[r].events);
    for (std::size_t s = 0; s < a[r].snapshots.size(); ++s) {
      const auto& pa = a[r].snapshots[s].u_hat;
      const auto& pb = b[r].snapshots[s].u_hat;
      for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
    }
  }
  const std::vector<std::uint32_t> bad{0, 0, 1, 2};
  CHECK_THROWS_AS(run_replicas(model, fam, cfg, 0.0, {}, bad), ConfigError);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  cfg.beta = 0.25;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.beta = 0.15;
  CHECK_NOTHROW(validate(cfg));
  CHECK(default_block_size(1000, 0.15) == 55);
  CHECK(default_block_size(4000, 0.15) == 100);
  cfg.times = {0.05, 0.02};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

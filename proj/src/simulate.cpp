#include "misanthrope/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "misanthrope/errors.hpp"

namespace misanthrope {

Configuration Configuration::from_spins(std::vector<int> spins) {
  Configuration c;
  c.total = 0;
  for (int s : spins) c.total += s;
  c.z = std::move(spins);
  return c;
}

// ---------------------------------------------------------------- RateIndex

RateIndex::RateIndex(std::span<const double> weights) : n_(weights.size()) {
  cap_ = 1;
  while (cap_ < std::max<std::size_t>(n_, 1)) cap_ <<= 1;
  tree_.assign(2 * cap_, 0.0);
  std::copy(weights.begin(), weights.end(), tree_.begin() + static_cast<std::ptrdiff_t>(cap_));
  for (std::size_t p = cap_ - 1; p >= 1; --p) tree_[p] = tree_[2 * p] + tree_[2 * p + 1];
}

void RateIndex::set(std::size_t i, double w) {
  std::size_t p = cap_ + i;
  tree_[p] = w;
  for (p >>= 1; p >= 1; p >>= 1) tree_[p] = tree_[2 * p] + tree_[2 * p + 1];
}

std::size_t RateIndex::find(double u) const {
  std::size_t p = 1;
  while (p < cap_) {
    const double left = tree_[2 * p];
    if (u < left) {
      p = 2 * p;
    } else {
      u -= left;
      p = 2 * p + 1;
    }
  }
  return p - cap_;
}

// ---------------------------------------------------------------- KmcSimulator

KmcSimulator::KmcSimulator(RateModel model, Configuration config, Rng rng)
    : model_(std::move(model)), config_(std::move(config)), rng_(std::move(rng)) {
  if (config_.size() < 2) throw std::invalid_argument("torus needs at least 2 sites");
  const auto& b = model_.bounds();
  long long total = 0;
  for (int s : config_.z) {
    if (!b.contains(s)) throw DomainError("initial spin " + std::to_string(s) + " outside S");
    total += s;
  }
  config_.total = total;
  std::vector<double> w(config_.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = bond_rate(j);
  index_ = RateIndex(w);
  clock_ = config_.micro_time;
  draw_pending();
}

double KmcSimulator::bond_rate(std::size_t j) const {
  const std::size_t next = j + 1 == config_.size() ? 0 : j + 1;
  return model_.rate(config_.z[j], config_.z[next]);
}

void KmcSimulator::draw_pending() {
  const double total = index_.total();
  if (!(total > 0.0)) {
    pending_ = std::numeric_limits<double>::infinity();
    return;
  }
  if (!std::isfinite(total)) throw DomainError("total jump rate overflow");
  const double dt = -std::log(uniform01_open_low(rng_)) / total;
  pending_ = clock_ + dt;
  pending_dt_ = dt;
}

void KmcSimulator::run_until(double target) {
  if (target < config_.micro_time) throw std::invalid_argument("run_until target is in the past");
  const std::size_t n = config_.size();
  while (pending_ <= target) {
    std::size_t j = 0;
    do {
      j = index_.find(uniform01(rng_) * index_.total());
    } while (j >= n || index_.weight(j) <= 0.0);
    const std::size_t next = j + 1 == n ? 0 : j + 1;
    config_.z[j] -= 1;
    config_.z[next] += 1;
    assert(model_.bounds().contains(config_.z[j]) && model_.bounds().contains(config_.z[next]));
    const std::size_t prev = j == 0 ? n - 1 : j - 1;
    index_.set(prev, bond_rate(prev));
    index_.set(j, bond_rate(j));
    index_.set(next, bond_rate(next));
    // Compensated clock update.
    const double y = pending_dt_ - clock_comp_;
    const double t = clock_ + y;
    clock_comp_ = (t - clock_) - y;
    clock_ = t;
    ++events_;
    draw_pending();
  }
  config_.micro_time = target;
}

// ---------------------------------------------------------------- sampling

namespace {

int draw_from_cdf(const std::vector<double>& cdf, int z_lo, Rng& rng) {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1);
  return z_lo + static_cast<int>(idx);
}

}  // namespace

Configuration sample_initial(const EquilibriumFamily& family, std::size_t n, double beta, double v0,
                             const TrigPolynomial& u0, Rng& rng) {
  const double scale = std::pow(static_cast<double>(n), -beta);
  std::vector<int> z(n);
  double last_v = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cdf;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = v0 + scale * u0(static_cast<double>(j) / static_cast<double>(n));
    if (v != last_v) {
      double theta = 0.0;
      try {
        theta = family.theta_of_v(v);
      } catch (const DomainError& e) {
        throw DomainError("initial density at site j = " + std::to_string(j) + ": " + e.what());
      }
      cdf = family.tilted_cdf(theta);
      last_v = v;
    }
    z[j] = draw_from_cdf(cdf, family.z_lo(), rng);
  }
  return Configuration::from_spins(std::move(z));
}

Configuration sample_product(const EquilibriumFamily& family, std::size_t n, double theta, Rng& rng) {
  const auto cdf = family.tilted_cdf(theta);
  std::vector<int> z(n);
  for (auto& s : z) s = draw_from_cdf(cdf, family.z_lo(), rng);
  return Configuration::from_spins(std::move(z));
}

// ---------------------------------------------------------------- experiments

std::size_t default_block_size(std::size_t n, double beta) {
  const double nn = static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(std::pow(nn, 2.0 * beta) * std::log(nn)));
}

std::size_t block_size(const ExperimentConfig& cfg) {
  return cfg.block > 0 ? cfg.block : default_block_size(cfg.N, cfg.beta);
}

void validate(const ExperimentConfig& cfg) {
  std::ostringstream os;
  if (!(cfg.beta > 0.0 && cfg.beta < 0.2)) os << "beta = " << cfg.beta << " must lie in (0, 1/5); ";
  if (cfg.N < 16) os << "N must be at least 16; ";
  const std::size_t l = block_size(cfg);
  if (l < 1 || 8 * l > cfg.N) os << "block size l = " << l << " incompatible with N = " << cfg.N << " (need l <= N/8); ";
  if (cfg.replicas < 1) os << "replicas must be >= 1; ";
  if (cfg.times.empty()) os << "no measurement times; ";
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    if (cfg.times[i] < 0.0 || cfg.times[i] > cfg.T || (i > 0 && cfg.times[i] < cfg.times[i - 1])) {
      os << "measurement times must be sorted within [0, T]; ";
      break;
    }
  }
  if (cfg.profile_points < 1) os << "profile_points must be >= 1; ";
  const auto msg = os.str();
  if (!msg.empty()) throw ConfigError(msg.substr(0, msg.size() - 2));
}

Profile measure_density(const Configuration& config, double beta, double v0, double b0, std::size_t block,
                        double t_macro, std::size_t points) {
  const std::size_t n = config.size();
  if (block < 1 || block > n) throw ConfigError("block size l = " + std::to_string(block) + " incompatible with N");
  const double nn = static_cast<double>(n);
  // prefix[i] = z_0 + ... + z_{i-1} over two periods.
  std::vector<long long> prefix(2 * n + 1, 0);
  for (std::size_t i = 0; i < 2 * n; ++i) prefix[i + 1] = prefix[i] + config.z[i % n];
  const auto half = static_cast<long long>((block - 1) / 2);
  const auto block_avg = [&](long long centre) {
    const long long nl = static_cast<long long>(n);
    const long long start = (((centre - half) % nl) + nl) % nl;
    return static_cast<double>(prefix[static_cast<std::size_t>(start) + block] - prefix[static_cast<std::size_t>(start)]) /
           static_cast<double>(block);
  };
  const double shift = std::pow(nn, 1.0 + beta) * b0 * t_macro;
  const double amp = std::pow(nn, beta);
  std::vector<double> u(points);
  for (std::size_t m = 0; m < points; ++m) {
    const double centre = nn * static_cast<double>(m) / static_cast<double>(points) + shift;
    const double base = std::floor(centre);
    const double frac = centre - base;
    const auto c = static_cast<long long>(base);
    const double avg = (1.0 - frac) * block_avg(c) + frac * block_avg(c + 1);
    u[m] = amp * (avg - v0);
  }
  return Profile(std::move(u));
}

std::vector<ReplicaResult> run_replicas(const RateModel& model, const EquilibriumFamily& family,
                                        const ExperimentConfig& cfg, double b0, const SnapshotObserver& observer,
                                        std::span<const std::uint32_t> order) {
  validate(cfg);
  const std::size_t l = block_size(cfg);
  std::vector<std::uint32_t> schedule(order.begin(), order.end());
  if (schedule.empty()) {
    schedule.resize(cfg.replicas);
    for (std::size_t r = 0; r < cfg.replicas; ++r) schedule[r] = static_cast<std::uint32_t>(r);
  }
  if (schedule.size() != cfg.replicas) throw ConfigError("replica order must list every replica once");
  {
    auto sorted = schedule;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t r = 0; r < sorted.size(); ++r) {
      if (sorted[r] != r) throw ConfigError("replica order must be a permutation");
    }
  }

  std::vector<ReplicaResult> results(cfg.replicas);
  const double micro_scale = std::pow(static_cast<double>(cfg.N), 1.0 + cfg.beta);

  const auto run_one = [&](std::uint32_t r) {
    const auto start = std::chrono::steady_clock::now();
    ReplicaResult res;
    res.replica = r;
    res.seed = seed_plan(cfg.seed, r, cfg.cell);
    Rng rng(res.seed);
    auto init = sample_initial(family, cfg.N, cfg.beta, cfg.v0, cfg.u0, rng);
    KmcSimulator sim(model, std::move(init), std::move(rng));
    for (double t : cfg.times) {
      sim.run_until(micro_scale * t);
      Snapshot snap;
      snap.t_macro = t;
      snap.u_hat = measure_density(sim.configuration(), cfg.beta, cfg.v0, b0, l, t, cfg.profile_points);
      if (observer) snap.observables = observer(sim.configuration(), t);
      res.snapshots.push_back(std::move(snap));
    }
    res.events = sim.events();
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results[r] = std::move(res);
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.replicas));
  if (threads == 1) {
    for (auto r : schedule) run_one(r);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < schedule.size(); i = next++) {
        try {
          run_one(schedule[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace misanthrope

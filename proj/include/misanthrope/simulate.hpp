#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "misanthrope/equilibrium.hpp"
#include "misanthrope/model.hpp"
#include "misanthrope/periodic.hpp"
#include "misanthrope/rng.hpp"

namespace misanthrope {

/// Spin configuration on the discrete torus Z / NZ.
struct Configuration {
  std::vector<int> z;
  long long total = 0;
  double micro_time = 0.0;

  std::size_t size() const { return z.size(); }
  static Configuration from_spins(std::vector<int> spins);
};

/// Sum tree over per-bond rates. Parents are recomputed from their children on
/// every update, so the root equals the sum of the leaves up to the rounding
/// of one balanced summation and does not drift.
class RateIndex {
 public:
  RateIndex() = default;
  explicit RateIndex(std::span<const double> weights);

  std::size_t size() const { return n_; }
  double total() const { return tree_.empty() ? 0.0 : tree_[1]; }
  double weight(std::size_t i) const { return tree_[cap_ + i]; }
  void set(std::size_t i, double w);
  /// Leaf i with prefix(i) <= u < prefix(i + 1), for u in [0, total()).
  std::size_t find(double u) const;

 private:
  std::size_t n_ = 0;
  std::size_t cap_ = 0;
  std::vector<double> tree_;
};

/// Continuous-time kinetic Monte Carlo for the generator
///   L f(z) = sum_j c(z_j, z_{j+1}) (f(Theta_j z) - f(z))
/// on the torus. A single trajectory is strictly sequential.
class KmcSimulator {
 public:
  KmcSimulator(RateModel model, Configuration config, Rng rng);

  /// Advances to micro time `target`. Jumps at times <= target are executed;
  /// the first jump past target stays pending, so the reported state is the
  /// exact state at `target` and later calls continue the same trajectory.
  void run_until(double target);

  const Configuration& configuration() const { return config_; }
  const RateIndex& rates() const { return index_; }
  std::uint64_t events() const { return events_; }
  /// Absolute time of the pending jump (+inf if the state is absorbing).
  double pending_time() const { return pending_; }

 private:
  double bond_rate(std::size_t j) const;
  void draw_pending();

  RateModel model_;
  Configuration config_;
  RateIndex index_;
  Rng rng_;
  double clock_ = 0.0;
  double clock_comp_ = 0.0;
  double pending_dt_ = 0.0;
  double pending_ = 0.0;
  std::uint64_t events_ = 0;
};

/// Independent draws z_j ~ pi_{theta(v0 + N^{-beta} u0(j/N))} by inverse CDF
/// over the truncation window. Deterministic given the engine state.
Configuration sample_initial(const EquilibriumFamily& family, std::size_t n, double beta, double v0,
                             const TrigPolynomial& u0, Rng& rng);

/// Product sample from pi_theta on every site.
Configuration sample_product(const EquilibriumFamily& family, std::size_t n, double theta, Rng& rng);

struct ExperimentConfig {
  std::size_t N = 1000;
  double beta = 0.15;
  double v0 = 0.5;
  TrigPolynomial u0 = TrigPolynomial::sine(0.5, 1);
  double T = 0.08;
  std::vector<double> times{0.02, 0.05, 0.08};
  std::size_t block = 0;  // 0 selects ceil(N^{2 beta} log N)
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  std::uint32_t cell = 0;
  std::size_t threads = 1;
  std::size_t profile_points = 200;
};

/// Block size default ceil(N^{2 beta} log N).
std::size_t default_block_size(std::size_t n, double beta);
/// Resolved block size (explicit or default).
std::size_t block_size(const ExperimentConfig& cfg);
/// Throws ConfigError unless beta in (0, 1/5), 1 <= l <= N/8, replicas >= 1 and times are sorted in [0, T].
void validate(const ExperimentConfig& cfg);

/// Empirical moving-frame profile u_hat(x) = N^beta (block average at site N x + s - v0),
/// s = N^{1+beta} b0 t, with centred blocks of length l and linear interpolation
/// between the two neighbouring integer shifts.
Profile measure_density(const Configuration& config, double beta, double v0, double b0, std::size_t block,
                        double t_macro, std::size_t points);

struct Snapshot {
  double t_macro = 0.0;
  Profile u_hat;
  std::vector<double> observables;
};

struct ReplicaResult {
  std::uint32_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<Snapshot> snapshots;
  std::uint64_t events = 0;
  double wall_seconds = 0.0;
};

/// Pure function of a configuration and the macro time; evaluated at every snapshot.
using SnapshotObserver = std::function<std::vector<double>(const Configuration&, double t_macro)>;

/// Runs cfg.replicas independent trajectories from nu_0 to each measurement
/// time (micro time N^{1+beta} t). Replica r uses stream seed_plan(seed, r, cell);
/// results are indexed by replica and do not depend on `order` or on threading.
std::vector<ReplicaResult> run_replicas(const RateModel& model, const EquilibriumFamily& family,
                                        const ExperimentConfig& cfg, double b0,
                                        const SnapshotObserver& observer = {},
                                        std::span<const std::uint32_t> order = {});

}  // namespace misanthrope

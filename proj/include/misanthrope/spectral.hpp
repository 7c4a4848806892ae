#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "misanthrope/equilibrium.hpp"
#include "misanthrope/model.hpp"

namespace misanthrope {

/// Finite per-site spin window used by the block computations.
struct SpinWindow {
  int lo = 0;
  int hi = 1;
};

/// One move z -> z' between enumerated states, with its rate.
struct BlockMove {
  std::size_t from;
  std::size_t to;
  double rate;
};

/// Canonical sector Omega^l_k = {z in S^l : sum z_i = k} with pi^l_k.
struct BlockEnsemble {
  RateModel model;
  SpinWindow window;
  int l = 0;
  int k = 0;
  /// Lexicographic order.
  std::vector<std::vector<int>> states;
  std::vector<double> pi;
  /// Grand-canonical mass pi^l(Omega^l_k), pi renormalized on the window.
  double mass = 0.0;
  /// Free-boundary moves i -> i+1 at rate c(z_i, z_{i+1}).
  std::vector<BlockMove> forward;
  /// Reversed moves i -> i-1 at rate c(z_i, z_{i-1}).
  std::vector<BlockMove> reversed;

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> index_of(const std::vector<int>& z) const;

 private:
  friend BlockEnsemble enumerate_sector(const RateModel&, const EquilibriumFamily&, int, int,
                                        std::optional<SpinWindow>);
  std::map<std::vector<int>, std::size_t> index_;
};

/// Spin window for block work: S itself when bounded, else `clip` (required).
SpinWindow block_window(const RateModel& model, std::optional<SpinWindow> clip);

/// Throws SectorError for an empty sector and DomainError for l outside [1, 10].
BlockEnsemble enumerate_sector(const RateModel& model, const EquilibriumFamily& family, int l, int k,
                               std::optional<SpinWindow> clip = std::nullopt);
/// All nonempty sectors k = l*lo .. l*hi.
std::vector<BlockEnsemble> enumerate_sectors(const RateModel& model, const EquilibriumFamily& family, int l,
                                             std::optional<SpinWindow> clip = std::nullopt);

Eigen::MatrixXd generator_matrix(const BlockEnsemble& e);
Eigen::MatrixXd reversed_generator_matrix(const BlockEnsemble& e);
/// Generator of the block on a ring (bond l -> 1 added); used as a diagnostic.
Eigen::MatrixXd periodic_generator_matrix(const BlockEnsemble& e);
/// (L + L*)/2 conjugated by diag(sqrt(pi)); symmetric up to round-off.
Eigen::MatrixXd symmetrized_matrix(const BlockEnsemble& e);

/// max_y |sum_x pi(x) Q(x, y)|.
double stationarity_residual(const BlockEnsemble& e, const Eigen::MatrixXd& q);
/// max |row sum| of Q.
double row_sum_residual(const Eigen::MatrixXd& q);
/// |<f, L g>_pi - <L* f, g>_pi|.
double adjointness_residual(const BlockEnsemble& e, std::span<const double> f, std::span<const double> g);

/// D^l_k(f) = 1/2 sum_i int c(z_i, z_{i+1}) (f(Theta_i z) - f(z))^2 dpi^l_k.
double dirichlet(const BlockEnsemble& e, std::span<const double> f);
/// The same form written with the reversed moves.
double dirichlet_reversed(const BlockEnsemble& e, std::span<const double> f);
double mean(const BlockEnsemble& e, std::span<const double> f);
double variance(const BlockEnsemble& e, std::span<const double> f);

/// True when the sector is connected under forward and reversed moves.
bool irreducible(const BlockEnsemble& e);

struct GapResult {
  /// Smallest nonzero eigenvalue of -Sym; +inf when there is nothing to relax.
  double gap = 0.0;
  /// D(f)/Var(f) on the eigenvector, f = psi / sqrt(pi).
  double rayleigh = 0.0;
  /// Eigenvalue of -Sym nearest zero (should vanish).
  double ground = 0.0;
};

GapResult spectral_gap(const BlockEnsemble& e);

struct SigmaBarResult {
  /// Top eigenvalue of Sym + diag(V).
  double value = 0.0;
  /// int V h dpi - D(sqrt h) at h = psi^2 / pi.
  double variational = 0.0;
};

SigmaBarResult sigma_bar(const BlockEnsemble& e, std::span<const double> v);

struct GappertCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rho = 0.0;
  double eps_max = 0.0;
  /// V had a nonzero pi-mean and was centred.
  bool projected = false;
  bool holds = false;
};

/// sigma_bar(eps V) <= eps^2 rho / (1 - 2 |V|_inf eps rho) Var(V). Throws
/// DomainError unless eps < 1 / (2 |V|_inf rho).
GappertCheck check_gappert(const BlockEnsemble& e, std::span<const double> v, double eps);

/// Local function psi(z_1..z_m) of m consecutive spins.
struct Cylinder {
  std::string name;
  int m = 1;
  std::function<double(std::span<const int>)> fn;

  /// Phi = c(z_2, z_1).
  static Cylinder flux(const RateModel& model);
  static Cylinder spin();
};

struct CanonicalStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Psi^l = (l - m + 1)^{-1} sum of the in-block translates; exact sums over the sector.
CanonicalStats canonical_expectation(const BlockEnsemble& e, const Cylinder& psi);
/// E_{theta(v)} psi under the product law restricted to the window.
double grand_canonical_expectation(const EquilibriumFamily& family, const Cylinder& psi, double v,
                                   std::optional<SpinWindow> clip = std::nullopt);

struct EquivalencePoint {
  int l = 0;
  int k = 0;
  double psi = 0.0;
  double abs_error = 0.0;
};

struct EquivalenceSweep {
  double density = 0.0;
  double psi_hat = 0.0;
  std::vector<EquivalencePoint> points;
  /// Least-squares slope of log abs_error against log l.
  double fitted_slope = 0.0;
};

/// k = density * l must be an integer for every l.
EquivalenceSweep equivalence_sweep(const RateModel& model, const EquilibriumFamily& family, const Cylinder& psi,
                                   double density, std::span<const int> ls,
                                   std::optional<SpinWindow> clip = std::nullopt);

double loglog_slope(std::span<const double> x, std::span<const double> y);

struct GapRow {
  int l = 0;
  int k = 0;
  std::size_t sector_size = 0;
  double gap = 0.0;
  double gap_times_l2 = 0.0;
  double rayleigh = 0.0;
  double stationarity = 0.0;
  double sym_stationarity = 0.0;
  double periodic_stationarity = 0.0;
};

/// Every sector for each l (l = 1 rows carry gap = +inf and are skipped).
std::vector<GapRow> gap_sweep(const RateModel& model, const EquilibriumFamily& family, std::span<const int> ls,
                              std::optional<SpinWindow> clip = std::nullopt);

struct DirsumReport {
  int N = 0;
  int l = 0;
  int trials = 0;
  /// Largest |D^l(sqrt h^l) - sum_k w_k D^l_k(sqrt h^l_k)| over trials and block positions.
  double max_dirsum_violation = 0.0;
  /// Count of trials with D^N(sqrt h) < (1/l) sum_j D^l(sqrt h^{N,l,j}).
  int convex_violations = 0;
  /// Smallest D^N - (1/l) sum_j D^l seen.
  double min_convex_margin = 0.0;
  /// Product-form density: D^N by enumeration and in closed form.
  double product_direct = 0.0;
  double product_closed = 0.0;
  /// h = 1: both sides of the block identity.
  double constant_lhs = 0.0;
  double constant_rhs = 0.0;
};

/// Random densities h on the torus Omega^N (pi product, untilted), N <= 8.
DirsumReport check_dirsum_convex(const RateModel& model, const EquilibriumFamily& family, int n, int l, int trials,
                                 std::uint64_t seed, std::optional<SpinWindow> clip = std::nullopt);

}  // namespace misanthrope

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "misanthrope/burgers.hpp"
#include "misanthrope/equilibrium.hpp"
#include "misanthrope/periodic.hpp"
#include "misanthrope/simulate.hpp"

namespace misanthrope {

using PeriodicFn = std::function<double(double)>;

/// S_N(phi, t) = N^{-1+beta} sum_j phi((j - N^{1+beta} b0 t)/N mod 1) (z_j - v0),
/// with the exact real-valued frame shift.
double corollary_statistic(const Configuration& config, const TrigPolynomial& phi, double beta, double v0, double b0,
                           double t_macro);

struct EntropyComparison {
  /// Lattice sum of single-site relative entropies.
  double exact = 0.0;
  /// N^{1-2beta} theta0' int (u2 - u1)(u2 - (F0'' theta0'/2)(u2 + u1)) dx, integral as an N-point lattice sum.
  double expansion = 0.0;
};

/// Relative entropy between the product measures with densities v0 + N^{-beta} u_i(j/N).
EntropyComparison entropy_between_profiles(const EquilibriumFamily& family, std::size_t n, double beta, double v0,
                                           const PeriodicFn& u1, const PeriodicFn& u2);

/// Lattice fields theta^N(t, j/N) and theta^N_x(t, j/N).
struct ThetaProfile {
  std::size_t N = 0;
  double beta = 0.0;
  double v0 = 0.0;
  double b0 = 0.0;
  double t = 0.0;
  std::vector<double> theta;
  std::vector<double> theta_x;
};

/// theta^N(t, x) = N^beta (theta(v0 + N^{-beta} u(t, x - N^beta b0 t)) - theta(v0)).
ThetaProfile theta_profile(const EquilibriumFamily& family, const CharacteristicSolution& u, std::size_t n, double beta,
                           double v0, double b0, double t);

/// Right-hand side of the transport identity d/dt theta^N = -theta^N_x (c0 u(t, x - N^beta b0 t) + N^beta b0).
std::vector<double> theta_time_derivative(const ThetaProfile& profile, const CharacteristicSolution& u);

/// Law of the i.i.d. summands zeta (mean zero).
class ZetaDistribution {
 public:
  static ZetaDistribution rademacher();
  /// Finite law; the mean must vanish to 1e-12.
  static ZetaDistribution discrete(std::vector<double> values, std::vector<double> probs);
  static ZetaDistribution gaussian(double sigma);

  /// Lambda''(0) = Var(zeta).
  double variance() const;
  /// Lambda(lambda) = log E exp(lambda zeta).
  double log_mgf(double lambda) const;
  /// Exact draw of zeta_1 + ... + zeta_l.
  double sample_sum(std::size_t l, Rng& rng) const;

 private:
  enum class Kind { rademacher, discrete, gaussian };
  Kind kind_ = Kind::rademacher;
  std::vector<double> values_;
  std::vector<double> cdf_;
  double sigma_ = 1.0;
};

/// Nonnegative G with G(x) <= C1 (|x| ∧ x^2/2).
struct GFunction {
  std::function<double(double)> fn;
  double second_derivative_at_zero = 0.0;
  double c1 = 1.0;

  /// G(x) = scale * min(|x|, x^2/2).
  static GFunction quadratic_cap(double scale = 1.0);
  static GFunction zero();
};

struct KurschakSpec {
  ZetaDistribution zeta = ZetaDistribution::rademacher();
  GFunction g = GFunction::quadratic_cap();
  double gamma = 0.3;
  /// Upper bound on gamma; 0 selects 1 / (C1 Var(zeta)).
  double gamma0 = 0.0;
  std::size_t l = 64;
  std::uint64_t samples = 1'000'000;
  /// Stop early once stderr / estimate falls below this (0 disables).
  double target_rel_stderr = 0.0;
  std::uint64_t seed = 1;
};

struct KurschakEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
  /// (1 - gamma Lambda''(0) G''(0))^{-1/2}.
  double limit = 0.0;
};

double kurschak_limit(const ZetaDistribution& zeta, const GFunction& g, double gamma);

/// Plain Monte Carlo estimate of E exp{gamma l G((zeta_1 + ... + zeta_l)/l)}.
KurschakEstimate kurschak_probe(const KurschakSpec& spec);

}  // namespace misanthrope

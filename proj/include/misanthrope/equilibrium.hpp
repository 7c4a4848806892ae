#pragma once

#include <span>
#include <vector>

#include "misanthrope/model.hpp"

namespace misanthrope {

struct TruncationPolicy {
  /// Discarded tilted mass allowed at the edges of the window, in (0, 1e-6].
  double eps_tail = 1e-14;
  /// Window growth stops here; unbounded models whose tail is still heavy diverge.
  int max_half_width = 4096;
  /// Window grows until the tilt domain covers [-theta_margin, theta_margin] when possible.
  double theta_margin = 1.0;
};

/// Value, mean and variance of the tilted one-site law: F(theta), F'(theta), F''(theta).
struct TiltMoments {
  double F = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Flux value, first and second derivative at a reference density.
struct FluxCharacteristics {
  double v0 = 0.0;
  double a0 = 0.0;
  double b0 = 0.0;
  double c0 = 0.0;
  /// Richardson estimate of the error in c0.
  double c0_error = 0.0;
  /// |c0| below 1e-8: the Burgers limit is degenerate.
  bool degenerate = false;
};

/// Sampled flux curve with its characteristic triple at v0.
struct FluxCurve {
  std::vector<double> v;
  std::vector<double> flux;
  std::vector<double> b;
  std::vector<double> c;
  FluxCharacteristics at_v0;
};

/// One-site stationary law pi and its exponential tilts pi_theta on a finite
/// spin window. Immutable after build.
class EquilibriumFamily {
 public:
  static EquilibriumFamily build(const RateModel& model, const TruncationPolicy& policy = {});

  const RateModel& model() const { return model_; }
  int z_lo() const { return z_lo_; }
  int z_hi() const { return z_hi_; }
  double theta_min() const { return theta_min_; }
  double theta_max() const { return theta_max_; }
  double eps_tail() const { return eps_tail_; }

  /// log pi(z) on the window (normalized over the window).
  double log_pi(int z) const;
  double pi(int z) const;

  double F(double theta) const;
  TiltMoments moments(double theta) const;
  double v_of_theta(double theta) const { return moments(theta).mean; }
  /// Open interval of attainable densities (F' at the ends of the numeric tilt domain).
  std::pair<double, double> density_range() const { return {v_min_, v_max_}; }
  /// Inverse of F'. Safeguarded Newton with bisection fallback; |F'(theta) - v| <= 1e-12.
  double theta_of_v(double v) const;
  /// theta'(v) = 1 / F''(theta(v)).
  double dtheta_dv(double v) const;

  /// pi_theta over [z_lo, z_hi].
  std::vector<double> tilted_pmf(double theta) const;
  /// Cumulative distribution of pi_theta over [z_lo, z_hi]; last entry is 1.
  std::vector<double> tilted_cdf(double theta) const;

  /// Expected jump rate across a bond under the product law at density v.
  double flux_hat(double v) const;
  /// Richardson-extrapolated fourth-order central differences of flux_hat.
  FluxCharacteristics flux_derivatives(double v0, double h = 0.0) const;
  FluxCurve flux_curve(double v0, std::span<const double> v_grid) const;

  /// H(pi_theta2 | pi_theta1) = (theta2 - theta1) F'(theta2) - F(theta2) + F(theta1).
  double site_entropy(double theta2, double theta1) const;

 private:
  void require_theta(double theta) const;
  double tail_mass(double theta) const;

  RateModel model_;
  int z_lo_ = 0;
  int z_hi_ = 0;
  std::vector<double> log_pi_;
  double theta_min_ = 0.0;
  double theta_max_ = 0.0;
  double v_min_ = 0.0;
  double v_max_ = 0.0;
  double eps_tail_ = 0.0;
  // Log of the ratio bound beyond the window (unbounded sides only).
  double log_r_above_ = 0.0;
  double log_r_below_ = 0.0;
};

}  // namespace misanthrope

#include "misanthrope/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "misanthrope/errors.hpp"

namespace misanthrope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tilt cap on a bounded side; F is finite for every theta there.
constexpr double kBoundedThetaCap = 50.0;

double logsumexp(std::span<const double> a) {
  double m = -kInf;
  for (double x : a) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : a) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

EquilibriumFamily EquilibriumFamily::build(const RateModel& model, const TruncationPolicy& policy) {
  if (!(policy.eps_tail > 0.0) || policy.eps_tail > 1e-6) throw DomainError("eps_tail must lie in (0, 1e-6]");
  const auto& b = model.bounds();
  EquilibriumFamily fam;
  fam.model_ = model;
  fam.eps_tail_ = policy.eps_tail;

  int half = b.bounded() ? 0 : 64;
  while (true) {
    fam.z_lo_ = b.z_min ? *b.z_min : -half;
    fam.z_hi_ = b.z_max ? *b.z_max : half;
    const auto n = static_cast<std::size_t>(fam.z_hi_ - fam.z_lo_ + 1);
    fam.log_pi_.assign(n, 0.0);
    for (int x = fam.z_lo_ + 1; x <= fam.z_hi_; ++x) {
      const auto i = static_cast<std::size_t>(x - fam.z_lo_);
      fam.log_pi_[i] = fam.log_pi_[i - 1] - log_r(model, x);
    }
    const double lz = logsumexp(fam.log_pi_);
    for (double& v : fam.log_pi_) v -= lz;

    fam.log_r_above_ = b.z_max ? kInf : log_r(model, fam.z_hi_ + 1);
    fam.log_r_below_ = b.z_min ? -kInf : log_r(model, fam.z_lo_);
    // Provisional domain so that tail_mass can evaluate F.
    fam.theta_min_ = b.z_min ? -kBoundedThetaCap : fam.log_r_below_;
    fam.theta_max_ = b.z_max ? kBoundedThetaCap : fam.log_r_above_;

    const bool zero_ok = fam.tail_mass(0.0) < policy.eps_tail;
    if (zero_ok) {
      // Largest |theta| on each unbounded side with tail mass below eps_tail.
      if (!b.z_max) {
        double lo = 0.0, hi = fam.log_r_above_;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (fam.tail_mass(mid) < policy.eps_tail ? lo : hi) = mid;
        }
        fam.theta_max_ = lo;
      }
      if (!b.z_min) {
        double lo = fam.log_r_below_, hi = 0.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (fam.tail_mass(mid) < policy.eps_tail ? hi : lo) = mid;
        }
        fam.theta_min_ = hi;
      }
    }
    const bool wide = zero_ok && fam.theta_max_ >= policy.theta_margin && fam.theta_min_ <= -policy.theta_margin;
    if (b.bounded() || wide) break;
    if (2 * half > policy.max_half_width) {
      if (!zero_ok) {
        std::ostringstream os;
        os << "one-site partition function diverges: tail mass at theta = 0 is not below " << policy.eps_tail
           << " within half-width " << half;
        throw DivergenceError(os.str());
      }
      break;
    }
    half *= 2;
  }
  fam.v_min_ = fam.moments(fam.theta_min_).mean;
  fam.v_max_ = fam.moments(fam.theta_max_).mean;
  return fam;
}

double EquilibriumFamily::tail_mass(double theta) const {
  // Geometric bound on the mass past each unbounded edge; valid because r is
  // nondecreasing away from the window under condition D.
  double tail = 0.0;
  std::vector<double> w(log_pi_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = theta * (z_lo_ + static_cast<int>(i)) + log_pi_[i];
  const double f = logsumexp(w);
  if (std::isfinite(log_r_above_)) {
    const double lq = theta - log_r_above_;
    if (lq >= 0.0) return kInf;
    const double q = std::exp(lq);
    tail += std::exp(w.back() - f) * q / (1.0 - q);
  }
  if (std::isfinite(log_r_below_)) {
    const double lq = log_r_below_ - theta;
    if (lq >= 0.0) return kInf;
    const double q = std::exp(lq);
    tail += std::exp(w.front() - f) * q / (1.0 - q);
  }
  return tail;
}

double EquilibriumFamily::log_pi(int z) const {
  if (z < z_lo_ || z > z_hi_) return -kInf;
  return log_pi_[static_cast<std::size_t>(z - z_lo_)];
}

double EquilibriumFamily::pi(int z) const { return std::exp(log_pi(z)); }

void EquilibriumFamily::require_theta(double theta) const {
  if (!(theta >= theta_min_ && theta <= theta_max_)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside the numeric tilt domain [" << theta_min_ << ", " << theta_max_ << "]";
    throw DomainError(os.str());
  }
}

double EquilibriumFamily::F(double theta) const { return moments(theta).F; }

TiltMoments EquilibriumFamily::moments(double theta) const {
  require_theta(theta);
  const std::size_t n = log_pi_.size();
  double m = -kInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, theta * (z_lo_ + static_cast<int>(i)) + log_pi_[i]);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z_lo_ + static_cast<int>(i);
    const double w = std::exp(theta * z + log_pi_[i] - m);
    s0 += w;
    s1 += w * z;
  }
  const double mean = s1 / s0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z_lo_ + static_cast<int>(i);
    const double w = std::exp(theta * z + log_pi_[i] - m);
    s2 += w * (z - mean) * (z - mean);
  }
  return {m + std::log(s0), mean, s2 / s0};
}

double EquilibriumFamily::theta_of_v(double v) const {
  if (!(v > v_min_ && v < v_max_)) {
    std::ostringstream os;
    os.precision(17);
    os << "density " << v << " not attainable; attainable interval is (" << v_min_ << ", " << v_max_ << ")";
    throw DomainError(os.str());
  }
  const double tol = 2e-14 * std::max(1.0, std::abs(v));
  double lo = theta_min_, hi = theta_max_;
  double theta = std::clamp(0.0, lo, hi);
  double best = theta, best_err = kInf;
  for (int it = 0; it < 400; ++it) {
    const auto mo = moments(theta);
    const double g = mo.mean - v;
    if (std::abs(g) < best_err) {
      best_err = std::abs(g);
      best = theta;
    }
    if (std::abs(g) <= tol) return theta;
    (g < 0.0 ? lo : hi) = theta;
    double next = mo.variance > 0.0 ? theta - g / mo.variance : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(theta))) break;
    theta = next;
  }
  return best;
}

double EquilibriumFamily::dtheta_dv(double v) const { return 1.0 / moments(theta_of_v(v)).variance; }

std::vector<double> EquilibriumFamily::tilted_pmf(double theta) const {
  const double f = F(theta);
  std::vector<double> p(log_pi_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(theta * (z_lo_ + static_cast<int>(i)) + log_pi_[i] - f);
  return p;
}

std::vector<double> EquilibriumFamily::tilted_cdf(double theta) const {
  auto p = tilted_pmf(theta);
  double acc = 0.0;
  for (double& x : p) {
    acc += x;
    x = acc;
  }
  for (double& x : p) x /= acc;
  p.back() = 1.0;
  return p;
}

double EquilibriumFamily::flux_hat(double v) const {
  const auto p = tilted_pmf(theta_of_v(v));
  double s = 0.0;
  switch (model_.kind()) {
    case ModelKind::generic_table:
      for (int x = z_lo_; x <= z_hi_; ++x) {
        const double px = p[static_cast<std::size_t>(x - z_lo_)];
        for (int y = z_lo_; y <= z_hi_; ++y) s += px * p[static_cast<std::size_t>(y - z_lo_)] * model_.rate(x, y);
      }
      break;
    case ModelKind::zero_range:
      for (int x = std::max(1, z_lo_); x <= z_hi_; ++x) s += p[static_cast<std::size_t>(x - z_lo_)] * model_.defining_r(x);
      break;
    case ModelKind::bricklayers:
      // E r(x) + E r(-y) under the product law.
      for (int x = z_lo_; x <= z_hi_; ++x) {
        const double px = p[static_cast<std::size_t>(x - z_lo_)];
        s += px * (model_.defining_r(x) + model_.defining_r(-x));
      }
      break;
  }
  return s;
}

FluxCharacteristics EquilibriumFamily::flux_derivatives(double v0, double h) const {
  if (!(v0 > v_min_ && v0 < v_max_)) theta_of_v(v0);  // throws the range error
  const double room = std::min(v0 - v_min_, v_max_ - v0);
  if (h <= 0.0) h = 0.05 * std::max(1.0, std::abs(v0));
  h = std::min(h, room / 4.0);
  const auto stencil = [&](double step) {
    const double fm2 = flux_hat(v0 - 2 * step), fm1 = flux_hat(v0 - step);
    const double f0 = flux_hat(v0);
    const double fp1 = flux_hat(v0 + step), fp2 = flux_hat(v0 + 2 * step);
    const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * step);
    const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * step * step);
    return std::array<double, 3>{f0, d1, d2};
  };
  const auto coarse = stencil(h);
  const auto fine = stencil(h / 2);
  FluxCharacteristics out;
  out.v0 = v0;
  out.a0 = fine[0];
  out.b0 = (16.0 * fine[1] - coarse[1]) / 15.0;
  out.c0 = (16.0 * fine[2] - coarse[2]) / 15.0;
  out.c0_error = std::abs(out.c0 - fine[2]);
  out.degenerate = std::abs(out.c0) < 1e-8;
  return out;
}

FluxCurve EquilibriumFamily::flux_curve(double v0, std::span<const double> v_grid) const {
  FluxCurve curve;
  for (double v : v_grid) {
    const auto fc = flux_derivatives(v);
    curve.v.push_back(v);
    curve.flux.push_back(fc.a0);
    curve.b.push_back(fc.b0);
    curve.c.push_back(fc.c0);
  }
  curve.at_v0 = flux_derivatives(v0);
  return curve;
}

double EquilibriumFamily::site_entropy(double theta2, double theta1) const {
  if (theta2 == theta1) {
    require_theta(theta1);
    return 0.0;
  }
  const auto m2 = moments(theta2);
  return (theta2 - theta1) * m2.mean - m2.F + F(theta1);
}

}  // namespace misanthrope

#include "misanthrope/blockstats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "misanthrope/errors.hpp"

namespace misanthrope {

double corollary_statistic(const Configuration& config, const TrigPolynomial& phi, double beta, double v0, double b0,
                           double t_macro) {
  const double n = static_cast<double>(config.size());
  const double shift = std::pow(n, 1.0 + beta) * b0 * t_macro;
  double s = 0.0;
  for (std::size_t j = 0; j < config.size(); ++j) {
    s += phi(wrap_unit((static_cast<double>(j) - shift) / n)) * (static_cast<double>(config.z[j]) - v0);
  }
  return std::pow(n, -1.0 + beta) * s;
}

EntropyComparison entropy_between_profiles(const EquilibriumFamily& family, std::size_t n, double beta, double v0,
                                           const PeriodicFn& u1, const PeriodicFn& u2) {
  const double nn = static_cast<double>(n);
  const double eps = std::pow(nn, -beta);
  const double theta0 = family.theta_of_v(v0);
  const double f2 = family.moments(theta0).variance;
  const double dtheta = 1.0 / f2;
  EntropyComparison out;
  double integral = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / nn;
    const double a = u1(x), b = u2(x);
    if (a != b) out.exact += family.site_entropy(family.theta_of_v(v0 + eps * b), family.theta_of_v(v0 + eps * a));
    integral += (b - a) * (b - 0.5 * f2 * dtheta * (b + a));
  }
  out.expansion = std::pow(nn, 1.0 - 2.0 * beta) * dtheta * integral / nn;
  return out;
}

ThetaProfile theta_profile(const EquilibriumFamily& family, const CharacteristicSolution& u, std::size_t n, double beta,
                           double v0, double b0, double t) {
  ThetaProfile p;
  p.N = n;
  p.beta = beta;
  p.v0 = v0;
  p.b0 = b0;
  p.t = t;
  const double nn = static_cast<double>(n);
  const double eps = std::pow(nn, -beta);
  const double theta0 = family.theta_of_v(v0);
  const double lag = std::pow(nn, beta) * b0 * t;
  p.theta.resize(n);
  p.theta_x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = wrap_unit(static_cast<double>(j) / nn - lag);
    const double v = v0 + eps * u(t, x);
    const double th = family.theta_of_v(v);
    p.theta[j] = (th - theta0) / eps;
    p.theta_x[j] = u.dx(t, x) / family.moments(th).variance;
  }
  return p;
}

std::vector<double> theta_time_derivative(const ThetaProfile& profile, const CharacteristicSolution& u) {
  const double nn = static_cast<double>(profile.N);
  const double nb = std::pow(nn, profile.beta);
  const double lag = nb * profile.b0 * profile.t;
  std::vector<double> out(profile.N);
  for (std::size_t j = 0; j < profile.N; ++j) {
    const double x = wrap_unit(static_cast<double>(j) / nn - lag);
    out[j] = -profile.theta_x[j] * (u.c0() * u(profile.t, x) + nb * profile.b0);
  }
  return out;
}

// ---------------------------------------------------------------- kurschak

ZetaDistribution ZetaDistribution::rademacher() { return ZetaDistribution{}; }

ZetaDistribution ZetaDistribution::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) throw ConfigError("discrete zeta: values and probs must match");
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw ConfigError("discrete zeta: negative probability");
    total += probs[i];
    mean += probs[i] * values[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("discrete zeta: probabilities must sum to 1");
  if (std::abs(mean) > 1e-12) throw ConfigError("zeta must have zero mean");
  ZetaDistribution d;
  d.kind_ = Kind::discrete;
  d.values_ = std::move(values);
  double acc = 0.0;
  for (double p : probs) d.cdf_.push_back(acc += p);
  d.cdf_.back() = 1.0;
  return d;
}

ZetaDistribution ZetaDistribution::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian zeta needs sigma > 0");
  ZetaDistribution d;
  d.kind_ = Kind::gaussian;
  d.sigma_ = sigma;
  return d;
}

double ZetaDistribution::variance() const {
  switch (kind_) {
    case Kind::rademacher:
      return 1.0;
    case Kind::gaussian:
      return sigma_ * sigma_;
    case Kind::discrete: {
      double s = 0.0, prev = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        s += (cdf_[i] - prev) * values_[i] * values_[i];
        prev = cdf_[i];
      }
      return s;
    }
  }
  return 0.0;
}

double ZetaDistribution::log_mgf(double lambda) const {
  switch (kind_) {
    case Kind::rademacher:
      return std::log(std::cosh(lambda));
    case Kind::gaussian:
      return 0.5 * sigma_ * sigma_ * lambda * lambda;
    case Kind::discrete: {
      double s = 0.0, prev = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        s += (cdf_[i] - prev) * std::exp(lambda * values_[i]);
        prev = cdf_[i];
      }
      return std::log(s);
    }
  }
  return 0.0;
}

double ZetaDistribution::sample_sum(std::size_t l, Rng& rng) const {
  switch (kind_) {
    case Kind::rademacher: {
      long long ones = 0;
      std::size_t left = l;
      while (left >= 64) {
        ones += std::popcount(rng());
        left -= 64;
      }
      if (left > 0) ones += std::popcount(rng() & ((std::uint64_t{1} << left) - 1));
      return static_cast<double>(2 * ones - static_cast<long long>(l));
    }
    case Kind::gaussian: {
      // Box-Muller; the sum of l normals is normal with variance l sigma^2.
      const double u1 = uniform01_open_low(rng), u2 = uniform01(rng);
      const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      return sigma_ * std::sqrt(static_cast<double>(l)) * g;
    }
    case Kind::discrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < l; ++i) {
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        s += values_[std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), values_.size() - 1)];
      }
      return s;
    }
  }
  return 0.0;
}

GFunction GFunction::quadratic_cap(double scale) {
  if (!(scale >= 0.0)) throw ConfigError("G scale must be nonnegative");
  return {[scale](double x) { return scale * std::min(std::abs(x), 0.5 * x * x); }, scale, std::max(scale, 1e-300)};
}

GFunction GFunction::zero() {
  return {[](double) { return 0.0; }, 0.0, 1.0};
}

double kurschak_limit(const ZetaDistribution& zeta, const GFunction& g, double gamma) {
  const double a = 1.0 - gamma * zeta.variance() * g.second_derivative_at_zero;
  if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(a);
}

KurschakEstimate kurschak_probe(const KurschakSpec& spec) {
  if (!spec.g.fn) throw ConfigError("G is not set");
  if (spec.l < 1) throw ConfigError("block length l must be >= 1");
  if (spec.samples < 2) throw ConfigError("need at least 2 samples");
  // G must be nonnegative and within C1 (|x| ∧ x^2/2) on the check grid.
  for (int i = -10000; i <= 10000; ++i) {
    const double x = 0.01 * i;
    const double gx = spec.g.fn(x);
    const double bound = spec.g.c1 * std::min(std::abs(x), 0.5 * x * x);
    if (!(gx >= 0.0) || gx > bound * (1.0 + 1e-12) + 1e-300) {
      std::ostringstream os;
      os << "G violates 0 <= G(x) <= C1 (|x| ^ x^2/2) at x = " << x << " (G = " << gx << ", bound = " << bound << ")";
      throw ConfigError(os.str());
    }
  }
  const double gamma0 = spec.gamma0 > 0.0 ? spec.gamma0 : 1.0 / (spec.g.c1 * spec.zeta.variance());
  if (!(spec.gamma >= 0.0 && spec.gamma < gamma0)) {
    std::ostringstream os;
    os << "gamma = " << spec.gamma << " must lie in [0, gamma0 = " << gamma0 << ")";
    throw ConfigError(os.str());
  }

  KurschakEstimate out;
  out.limit = kurschak_limit(spec.zeta, spec.g, spec.gamma);
  Rng rng(spec.seed);
  const double l = static_cast<double>(spec.l);
  double mean = 0.0, m2 = 0.0;
  std::uint64_t count = 0;
  for (; count < spec.samples;) {
    const double s = spec.zeta.sample_sum(spec.l, rng);
    const double x = std::exp(spec.gamma * l * spec.g.fn(s / l));
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
    if (spec.target_rel_stderr > 0.0 && count >= 1000 && count % 1000 == 0) {
      const double se = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
      if (se <= spec.target_rel_stderr * mean) break;
    }
  }
  out.samples = count;
  out.estimate = mean;
  out.stderr_ = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  return out;
}

}  // namespace misanthrope

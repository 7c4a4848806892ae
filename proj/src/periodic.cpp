#include "misanthrope/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace misanthrope {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigPolynomial::TrigPolynomial(double mean, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : mean_(mean), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  const auto n = std::max(cos_.size(), sin_.size());
  cos_.resize(n, 0.0);
  sin_.resize(n, 0.0);
}

TrigPolynomial TrigPolynomial::constant(double value) { return TrigPolynomial(value, {}, {}); }

TrigPolynomial TrigPolynomial::sine(double amplitude, int mode) {
  if (mode < 1) throw std::invalid_argument("sine mode must be >= 1");
  std::vector<double> s(static_cast<std::size_t>(mode), 0.0);
  s.back() = amplitude;
  return TrigPolynomial(0.0, {}, std::move(s));
}

TrigPolynomial TrigPolynomial::cosine(double amplitude, int mode) {
  if (mode < 1) throw std::invalid_argument("cosine mode must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(mode), 0.0);
  c.back() = amplitude;
  return TrigPolynomial(0.0, std::move(c), {});
}

double TrigPolynomial::operator()(double x) const {
  double acc = mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double arg = kTwoPi * static_cast<double>(k + 1) * x;
    acc += cos_[k] * std::cos(arg) + sin_[k] * std::sin(arg);
  }
  return acc;
}

double TrigPolynomial::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    acc += w * (-cos_[k] * std::sin(w * x) + sin_[k] * std::cos(w * x));
  }
  return acc;
}

int TrigPolynomial::degree() const {
  for (std::size_t k = cos_.size(); k > 0; --k) {
    if (cos_[k - 1] != 0.0 || sin_[k - 1] != 0.0) return static_cast<int>(k);
  }
  return 0;
}

double TrigPolynomial::l2_norm() const {
  double s = mean_ * mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k) s += 0.5 * (cos_[k] * cos_[k] + sin_[k] * sin_[k]);
  return std::sqrt(s);
}

double TrigPolynomial::sup_bound() const {
  double s = std::abs(mean_);
  for (std::size_t k = 0; k < cos_.size(); ++k) s += std::abs(cos_[k]) + std::abs(sin_[k]);
  return s;
}

Profile::Profile(std::vector<double> values) : values_(std::move(values)) {}

namespace {

// Cell index and fractional offset of x on an M-point periodic grid.
std::pair<long, double> locate(double x, std::size_t m) {
  const double s = wrap_unit(x) * static_cast<double>(m);
  double cell = std::floor(s);
  double frac = s - cell;
  auto i = static_cast<long>(cell);
  if (i >= static_cast<long>(m)) {
    i = 0;
    frac = 0.0;
  }
  return {i, frac};
}

}  // namespace

double Profile::operator()(double x) const {
  const std::size_t m = values_.size();
  if (m == 0) throw std::logic_error("empty profile");
  if (m < 4) {
    const auto [i, t] = locate(x, m);
    return (1.0 - t) * values_[static_cast<std::size_t>(i)] + t * values_[static_cast<std::size_t>((i + 1) % static_cast<long>(m))];
  }
  const auto [i, t] = locate(x, m);
  const auto at = [&](long j) {
    const long mm = static_cast<long>(m);
    return values_[static_cast<std::size_t>(((j % mm) + mm) % mm)];
  };
  const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  // Lagrange basis on nodes -1, 0, 1, 2.
  const double l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return l0 * p0 + l1 * p1 + l2 * p2 + l3 * p3;
}

double Profile::derivative(double x) const {
  const std::size_t m = values_.size();
  if (m < 4) throw std::logic_error("profile too small for derivative");
  const auto [i, t] = locate(x, m);
  const auto at = [&](long j) {
    const long mm = static_cast<long>(m);
    return values_[static_cast<std::size_t>(((j % mm) + mm) % mm)];
  };
  const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  const double d0 = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0;
  const double d1 = (3.0 * t * t - 4.0 * t - 1.0) / 2.0;
  const double d2 = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0;
  const double d3 = (3.0 * t * t - 1.0) / 6.0;
  return (d0 * p0 + d1 * p1 + d2 * p2 + d3 * p3) * static_cast<double>(m);
}

double Profile::grid_derivative(std::size_t i) const {
  const long m = static_cast<long>(values_.size());
  if (m < 5) throw std::logic_error("profile too small for derivative");
  const auto at = [&](long j) { return values_[static_cast<std::size_t>(((j % m) + m) % m)]; };
  const long k = static_cast<long>(i);
  return (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) * static_cast<double>(m) / 12.0;
}

double Profile::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double Profile::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Profile::max() const { return *std::max_element(values_.begin(), values_.end()); }

double l1_distance(const Profile& a, const Profile& b) {
  if (a.size() != b.size()) throw std::invalid_argument("profile grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double l2_distance(const Profile& a, const Profile& b) {
  if (a.size() != b.size()) throw std::invalid_argument("profile grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

double integrate_product(const TrigPolynomial& phi, const Profile& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += phi(u.x(i)) * u[i];
  return s / static_cast<double>(u.size());
}

double wrap_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;
  return y;
}

}  // namespace misanthrope

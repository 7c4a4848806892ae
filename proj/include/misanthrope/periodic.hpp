#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace misanthrope {

/// Real trigonometric polynomial on the unit torus:
///   f(x) = a0 + sum_k (a_k cos(2 pi k x) + b_k sin(2 pi k x)),  k = 1..degree.
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  TrigPolynomial(double mean, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

  static TrigPolynomial constant(double value);
  static TrigPolynomial sine(double amplitude, int mode);
  static TrigPolynomial cosine(double amplitude, int mode);

  double operator()(double x) const;
  double derivative(double x) const;

  int degree() const;
  double mean() const { return mean_; }
  /// L2 norm over one period.
  double l2_norm() const;
  /// sup norm bound: |a0| + sum |a_k| + |b_k|.
  double sup_bound() const;

  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }

 private:
  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Periodic grid function with values at x_i = i/M, i = 0..M-1.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<double> values);

  template <class F>
  static Profile sample(F&& f, std::size_t m) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = f(static_cast<double>(i) / static_cast<double>(m));
    return Profile(std::move(v));
  }

  std::size_t size() const { return values_.size(); }
  double x(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(values_.size()); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }

  /// Periodic four-point (cubic Lagrange) interpolation.
  double operator()(double x) const;
  /// Derivative of the interpolant, fourth-order accurate at grid points.
  double derivative(double x) const;
  /// Fourth-order central difference at grid point i.
  double grid_derivative(std::size_t i) const;

  /// Periodic trapezoid rule for the integral over one period.
  double integral() const;
  double min() const;
  double max() const;

 private:
  std::vector<double> values_;
};

/// L1 distance between two profiles on the same grid.
double l1_distance(const Profile& a, const Profile& b);
/// L2 distance between two profiles on the same grid.
double l2_distance(const Profile& a, const Profile& b);

/// Integral of phi * u over the torus by the periodic trapezoid rule on u's grid.
double integrate_product(const TrigPolynomial& phi, const Profile& u);

/// Wrap into [0, 1).
double wrap_unit(double x);

}  // namespace misanthrope

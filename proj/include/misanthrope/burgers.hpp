#pragma once

#include <cstddef>

#include "misanthrope/periodic.hpp"

namespace misanthrope {

/// Classical shock time of du/dt + (c0/2) d(u^2)/dx = 0 from u0:
/// 1 / max_x(-c0 u0'(x)), or +inf when that maximum is not positive.
double shock_time(const Profile& u0, double c0);

/// Smooth solution of the inviscid Burgers equation by the method of
/// characteristics: u(t, x) = u0(x0) with x = x0 + c0 u0(x0) t.
/// Valid for t < margin * T*.
class CharacteristicSolution {
 public:
  CharacteristicSolution(Profile u0, double c0, double margin = 0.95);

  double c0() const { return c0_; }
  double shock_time() const { return t_star_; }
  double margin() const { return margin_; }
  const Profile& initial() const { return u0_; }

  /// Foot of the characteristic through (t, x), in [x - A, x + A] with A = |c0| t max|u0|.
  double foot(double t, double x) const;
  double operator()(double t, double x) const;
  /// du/dx(t, x) = u0'(x0) / (1 + c0 t u0'(x0)).
  double dx(double t, double x) const;
  Profile sample(double t, std::size_t m_out) const;

 private:
  void require_time(double t) const;

  Profile u0_;
  double c0_;
  double margin_;
  double t_star_;
  double sup_u0_;
};

Profile solve_characteristics(const Profile& u0, double c0, double t, std::size_t m_out);

/// First-order Godunov scheme with the exact Riemann solver for f(u) = (c0/2) u^2.
/// Cells are centred on x_i = i/M; u0 is sampled there. cfl must lie in (0, 1).
Profile solve_godunov(const Profile& u0, double c0, double t, std::size_t m, double cfl = 0.5);

/// Godunov numerical flux for f(u) = (c0/2) u^2.
double godunov_flux(double u_left, double u_right, double c0);

}  // namespace misanthrope

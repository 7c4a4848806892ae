#include "misanthrope/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "misanthrope/errors.hpp"

namespace misanthrope {

double shock_time(const Profile& u0, double c0) {
  double peak = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) peak = std::max(peak, -c0 * u0.grid_derivative(i));
  // Round-off in the stencil must not turn flat data into a finite shock time.
  if (!(peak > 1e-12)) return std::numeric_limits<double>::infinity();
  return 1.0 / peak;
}

CharacteristicSolution::CharacteristicSolution(Profile u0, double c0, double margin)
    : u0_(std::move(u0)), c0_(c0), margin_(margin) {
  if (u0_.size() < 5) throw std::invalid_argument("initial profile needs at least 5 points");
  t_star_ = misanthrope::shock_time(u0_, c0_);
  sup_u0_ = std::max(std::abs(u0_.min()), std::abs(u0_.max()));
}

void CharacteristicSolution::require_time(double t) const {
  if (t < 0.0) throw HorizonError("negative time");
  if (std::isfinite(t_star_) && t >= margin_ * t_star_) {
    std::ostringstream os;
    os << "t = " << t << " is beyond " << margin_ << " T* (shock time T* = " << t_star_ << ")";
    throw HorizonError(os.str());
  }
}

double CharacteristicSolution::foot(double t, double x) const {
  require_time(t);
  if (t == 0.0 || c0_ == 0.0) return x;
  const double speed = c0_ * t;
  const auto g = [&](double x0) { return x0 + speed * u0_(x0) - x; };
  const double reach = std::abs(speed) * sup_u0_ + 1e-12;
  // Monotone cell sweep: g is increasing pre-shock, so binary search over the
  // input grid cells that can hold the foot, then bisect inside the cell.
  const double m = static_cast<double>(u0_.size());
  long lo_cell = static_cast<long>(std::floor((x - reach) * m)) - 1;
  long hi_cell = static_cast<long>(std::ceil((x + reach) * m)) + 1;
  while (hi_cell - lo_cell > 1) {
    const long mid = lo_cell + (hi_cell - lo_cell) / 2;
    (g(static_cast<double>(mid) / m) <= 0.0 ? lo_cell : hi_cell) = mid;
  }
  double a = static_cast<double>(lo_cell) / m, b = static_cast<double>(hi_cell) / m;
  double ga = g(a), gb = g(b);
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    // Regula falsi; every third step bisects.
    double c = (ga != gb) ? a - ga * (b - a) / (gb - ga) : 0.5 * (a + b);
    if (!(c > a && c < b) || it % 3 == 2) c = 0.5 * (a + b);
    const double gc = g(c);
    if (gc == 0.0) return c;
    if (gc < 0.0) {
      a = c;
      ga = gc;
    } else {
      b = c;
      gb = gc;
    }
    if (std::abs(gc) < 1e-15) return c;
  }
  return 0.5 * (a + b);
}

double CharacteristicSolution::operator()(double t, double x) const { return u0_(foot(t, x)); }

double CharacteristicSolution::dx(double t, double x) const {
  const double x0 = foot(t, x);
  const double d = u0_.derivative(x0);
  return d / (1.0 + c0_ * t * d);
}

Profile CharacteristicSolution::sample(double t, std::size_t m_out) const {
  require_time(t);
  return Profile::sample([&](double x) { return (*this)(t, x); }, m_out);
}

Profile solve_characteristics(const Profile& u0, double c0, double t, std::size_t m_out) {
  return CharacteristicSolution(u0, c0).sample(t, m_out);
}

double godunov_flux(double u_left, double u_right, double c0) {
  const auto f = [c0](double u) { return 0.5 * c0 * u * u; };
  double a = f(u_left), b = f(u_right);
  if (u_left <= u_right) {
    double best = std::min(a, b);
    if (u_left <= 0.0 && 0.0 <= u_right) best = std::min(best, 0.0);
    return best;
  }
  double best = std::max(a, b);
  if (u_right <= 0.0 && 0.0 <= u_left) best = std::max(best, 0.0);
  return best;
}

Profile solve_godunov(const Profile& u0, double c0, double t, std::size_t m, double cfl) {
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0, 1)");
  if (m < 2) throw std::invalid_argument("need at least 2 cells");
  std::vector<double> u(m), flux(m);
  for (std::size_t i = 0; i < m; ++i) u[i] = u0(static_cast<double>(i) / static_cast<double>(m));
  const double dx = 1.0 / static_cast<double>(m);
  double now = 0.0;
  while (now < t) {
    double smax = 0.0;
    for (double v : u) smax = std::max(smax, std::abs(c0 * v));
    if (smax == 0.0) break;
    const double dt = std::min(cfl * dx / smax, t - now);
    // flux[i] is the flux through the right face of cell i.
    for (std::size_t i = 0; i < m; ++i) flux[i] = godunov_flux(u[i], u[(i + 1) % m], c0);
    const double lam = dt / dx;
    for (std::size_t i = 0; i < m; ++i) u[i] -= lam * (flux[i] - flux[(i + m - 1) % m]);
    now += dt;
    if (t - now < 1e-15 * std::max(1.0, t)) break;
  }
  return Profile(std::move(u));
}

}  // namespace misanthrope

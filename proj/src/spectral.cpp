#include "misanthrope/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "misanthrope/errors.hpp"
#include "misanthrope/rng.hpp"

namespace misanthrope {

namespace {

constexpr int kMaxBlock = 10;

// log pi renormalized on the window.
std::vector<double> window_log_pi(const EquilibriumFamily& family, const SpinWindow& w) {
  std::vector<double> lp;
  for (int z = w.lo; z <= w.hi; ++z) lp.push_back(family.log_pi(z));
  const double mx = *std::max_element(lp.begin(), lp.end());
  double s = 0.0;
  for (double x : lp) s += std::exp(x - mx);
  const double lz = mx + std::log(s);
  for (double& x : lp) x -= lz;
  return lp;
}

// Visits every z in [lo, hi]^n in lexicographic order.
template <class F>
void for_each_tuple(int n, const SpinWindow& w, F&& visit) {
  std::vector<int> z(static_cast<std::size_t>(n), w.lo);
  while (true) {
    visit(z);
    int i = n - 1;
    while (i >= 0 && z[static_cast<std::size_t>(i)] == w.hi) z[static_cast<std::size_t>(i--)] = w.lo;
    if (i < 0) return;
    ++z[static_cast<std::size_t>(i)];
  }
}

Eigen::MatrixXd moves_to_matrix(std::size_t n, const std::vector<BlockMove>& moves) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& mv : moves) {
    q(static_cast<Eigen::Index>(mv.from), static_cast<Eigen::Index>(mv.to)) += mv.rate;
    q(static_cast<Eigen::Index>(mv.from), static_cast<Eigen::Index>(mv.from)) -= mv.rate;
  }
  return q;
}

double form(const BlockEnsemble& e, const std::vector<BlockMove>& moves, std::span<const double> f) {
  if (f.size() != e.size()) throw std::invalid_argument("function size does not match the sector");
  double d = 0.0;
  for (const auto& mv : moves) {
    const double df = f[mv.to] - f[mv.from];
    d += e.pi[mv.from] * mv.rate * df * df;
  }
  return 0.5 * d;
}

double sym_form(const BlockEnsemble& e, std::span<const double> f) {
  return 0.5 * (form(e, e.forward, f) + form(e, e.reversed, f));
}

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& s) { return 0.5 * (s + s.transpose()); }

}  // namespace

std::optional<std::size_t> BlockEnsemble::index_of(const std::vector<int>& z) const {
  const auto it = index_.find(z);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SpinWindow block_window(const RateModel& model, std::optional<SpinWindow> clip) {
  const auto& b = model.bounds();
  SpinWindow w;
  if (clip) {
    w = *clip;
    if (b.z_min) w.lo = std::max(w.lo, *b.z_min);
    if (b.z_max) w.hi = std::min(w.hi, *b.z_max);
  } else {
    if (!b.bounded()) throw DomainError("unbounded spin alphabet: block computations need a clip window");
    w = {*b.z_min, *b.z_max};
  }
  if (w.lo > w.hi) throw DomainError("empty spin window");
  return w;
}

BlockEnsemble enumerate_sector(const RateModel& model, const EquilibriumFamily& family, int l, int k,
                               std::optional<SpinWindow> clip) {
  if (l < 1 || l > kMaxBlock) throw DomainError("block length must lie in [1, 10]");
  const SpinWindow w = block_window(model, clip);
  if (k < l * w.lo || k > l * w.hi) {
    std::ostringstream os;
    os << "empty sector: k = " << k << " outside [" << l * w.lo << ", " << l * w.hi << "] for l = " << l;
    throw SectorError(os.str());
  }
  const auto lp = window_log_pi(family, w);

  BlockEnsemble e;
  e.model = model;
  e.window = w;
  e.l = l;
  e.k = k;
  std::vector<double> logw;
  for_each_tuple(l, w, [&](const std::vector<int>& z) {
    if (std::accumulate(z.begin(), z.end(), 0) != k) return;
    double s = 0.0;
    for (int x : z) s += lp[static_cast<std::size_t>(x - w.lo)];
    e.index_.emplace(z, e.states.size());
    e.states.push_back(z);
    logw.push_back(s);
  });
  const double mx = *std::max_element(logw.begin(), logw.end());
  double tot = 0.0;
  for (double x : logw) tot += std::exp(x - mx);
  e.mass = std::exp(mx + std::log(tot));
  for (double x : logw) e.pi.push_back(std::exp(x - mx) / tot);

  for (std::size_t a = 0; a < e.states.size(); ++a) {
    const auto& z = e.states[a];
    for (int i = 0; i + 1 < l; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      // forward: i -> i+1
      if (z[ui] - 1 >= w.lo && z[ui + 1] + 1 <= w.hi) {
        const double c = model.rate(z[ui], z[ui + 1]);
        if (c > 0.0) {
          auto y = z;
          --y[ui];
          ++y[ui + 1];
          e.forward.push_back({a, e.index_.at(y), c});
        }
      }
      // reversed: i+1 -> i
      if (z[ui + 1] - 1 >= w.lo && z[ui] + 1 <= w.hi) {
        const double c = model.rate(z[ui + 1], z[ui]);
        if (c > 0.0) {
          auto y = z;
          ++y[ui];
          --y[ui + 1];
          e.reversed.push_back({a, e.index_.at(y), c});
        }
      }
    }
  }
  return e;
}

std::vector<BlockEnsemble> enumerate_sectors(const RateModel& model, const EquilibriumFamily& family, int l,
                                             std::optional<SpinWindow> clip) {
  const SpinWindow w = block_window(model, clip);
  std::vector<BlockEnsemble> out;
  for (int k = l * w.lo; k <= l * w.hi; ++k) out.push_back(enumerate_sector(model, family, l, k, clip));
  return out;
}

Eigen::MatrixXd generator_matrix(const BlockEnsemble& e) { return moves_to_matrix(e.size(), e.forward); }

Eigen::MatrixXd reversed_generator_matrix(const BlockEnsemble& e) { return moves_to_matrix(e.size(), e.reversed); }

Eigen::MatrixXd periodic_generator_matrix(const BlockEnsemble& e) {
  auto moves = e.forward;
  const auto last = static_cast<std::size_t>(e.l - 1);
  if (e.l >= 2) {
    for (std::size_t a = 0; a < e.size(); ++a) {
      const auto& z = e.states[a];
      if (z[last] - 1 < e.window.lo || z[0] + 1 > e.window.hi) continue;
      const double c = e.model.rate(z[last], z[0]);
      if (c <= 0.0) continue;
      auto y = z;
      --y[last];
      ++y[0];
      moves.push_back({a, *e.index_of(y), c});
    }
  }
  return moves_to_matrix(e.size(), moves);
}

Eigen::MatrixXd symmetrized_matrix(const BlockEnsemble& e) {
  const Eigen::MatrixXd q = 0.5 * (generator_matrix(e) + reversed_generator_matrix(e));
  Eigen::VectorXd sq(static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i) sq(static_cast<Eigen::Index>(i)) = std::sqrt(e.pi[i]);
  return sq.asDiagonal() * q * sq.cwiseInverse().asDiagonal();
}

double stationarity_residual(const BlockEnsemble& e, const Eigen::MatrixXd& q) {
  Eigen::RowVectorXd p(static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i) p(static_cast<Eigen::Index>(i)) = e.pi[i];
  return (p * q).cwiseAbs().maxCoeff();
}

double row_sum_residual(const Eigen::MatrixXd& q) { return q.rowwise().sum().cwiseAbs().maxCoeff(); }

double adjointness_residual(const BlockEnsemble& e, std::span<const double> f, std::span<const double> g) {
  const auto n = static_cast<Eigen::Index>(e.size());
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), n), gv(g.data(), n);
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = e.pi[static_cast<std::size_t>(i)];
  const Eigen::VectorXd lg = generator_matrix(e) * gv;
  const Eigen::VectorXd lsf = reversed_generator_matrix(e) * fv;
  return std::abs(p.cwiseProduct(fv).dot(lg) - p.cwiseProduct(lsf).dot(gv));
}

double dirichlet(const BlockEnsemble& e, std::span<const double> f) { return form(e, e.forward, f); }

double dirichlet_reversed(const BlockEnsemble& e, std::span<const double> f) { return form(e, e.reversed, f); }

double mean(const BlockEnsemble& e, std::span<const double> f) {
  if (f.size() != e.size()) throw std::invalid_argument("function size does not match the sector");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += e.pi[i] * f[i];
  return s;
}

double variance(const BlockEnsemble& e, std::span<const double> f) {
  const double m = mean(e, f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += e.pi[i] * (f[i] - m) * (f[i] - m);
  return s;
}

bool irreducible(const BlockEnsemble& e) {
  std::vector<std::vector<std::size_t>> adj(e.size());
  for (const auto* moves : {&e.forward, &e.reversed})
    for (const auto& mv : *moves) {
      adj[mv.from].push_back(mv.to);
      adj[mv.to].push_back(mv.from);
    }
  std::vector<char> seen(e.size(), 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto a = q.front();
    q.pop();
    for (auto b : adj[a])
      if (!seen[b]) {
        seen[b] = 1;
        ++count;
        q.push(b);
      }
  }
  return count == e.size();
}

GapResult spectral_gap(const BlockEnsemble& e) {
  GapResult r;
  if (e.size() < 2) {
    r.gap = r.rayleigh = std::numeric_limits<double>::infinity();
    return r;
  }
  if (!irreducible(e)) {
    std::ostringstream os;
    os << "sector l = " << e.l << ", k = " << e.k << " is reducible under the symmetrized moves";
    throw Error(os.str());
  }
  const Eigen::MatrixXd s = -symmetric_part(symmetrized_matrix(e));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  r.ground = es.eigenvalues()(0);
  r.gap = es.eigenvalues()(1);
  const Eigen::VectorXd psi = es.eigenvectors().col(1);
  std::vector<double> f(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) f[i] = psi(static_cast<Eigen::Index>(i)) / std::sqrt(e.pi[i]);
  r.rayleigh = sym_form(e, f) / variance(e, f);
  return r;
}

SigmaBarResult sigma_bar(const BlockEnsemble& e, std::span<const double> v) {
  if (v.size() != e.size()) throw std::invalid_argument("potential size does not match the sector");
  const auto n = static_cast<Eigen::Index>(e.size());
  Eigen::MatrixXd s = symmetric_part(symmetrized_matrix(e));
  for (Eigen::Index i = 0; i < n; ++i) s(i, i) += v[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  SigmaBarResult r;
  r.value = es.eigenvalues()(n - 1);
  const Eigen::VectorXd psi = es.eigenvectors().col(n - 1);
  std::vector<double> root_h(e.size());
  double vh = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double p = psi(static_cast<Eigen::Index>(i));
    root_h[i] = std::abs(p) / std::sqrt(e.pi[i]);
    vh += v[i] * p * p;
  }
  r.variational = vh - sym_form(e, root_h);
  return r;
}

GappertCheck check_gappert(const BlockEnsemble& e, std::span<const double> v, double eps) {
  GappertCheck c;
  std::vector<double> w(v.begin(), v.end());
  const double m = mean(e, w);
  if (std::abs(m) > 1e-14) {
    for (double& x : w) x -= m;
    c.projected = true;
  }
  double sup = 0.0;
  for (double x : w) sup = std::max(sup, std::abs(x));
  const double gap = spectral_gap(e).gap;
  c.rho = 1.0 / gap;
  c.eps_max = sup > 0.0 ? 1.0 / (2.0 * sup * c.rho) : std::numeric_limits<double>::infinity();
  if (!(eps >= 0.0 && eps < c.eps_max)) {
    std::ostringstream os;
    os << "eps = " << eps << " outside the admissible range [0, " << c.eps_max << ")";
    throw DomainError(os.str());
  }
  std::vector<double> ev(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) ev[i] = eps * w[i];
  c.lhs = e.size() < 2 ? mean(e, ev) : sigma_bar(e, ev).value;
  c.rhs = sup > 0.0 ? eps * eps * c.rho / (1.0 - 2.0 * sup * eps * c.rho) * variance(e, w) : 0.0;
  c.holds = c.lhs <= c.rhs + 1e-10;
  return c;
}

Cylinder Cylinder::flux(const RateModel& model) {
  return {"flux", 2, [model](std::span<const int> z) { return model.rate(z[1], z[0]); }};
}

Cylinder Cylinder::spin() {
  return {"spin", 1, [](std::span<const int> z) { return static_cast<double>(z[0]); }};
}

CanonicalStats canonical_expectation(const BlockEnsemble& e, const Cylinder& psi) {
  if (psi.m < 1 || psi.m > e.l) {
    std::ostringstream os;
    os << "cylinder base m = " << psi.m << " exceeds block length l = " << e.l;
    throw DomainError(os.str());
  }
  const int shifts = e.l - psi.m + 1;
  CanonicalStats st;
  double s2 = 0.0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    const std::span<const int> z(e.states[a]);
    double val = 0.0;
    for (int i = 0; i < shifts; ++i) val += psi.fn(z.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(psi.m)));
    val /= shifts;
    st.mean += e.pi[a] * val;
    s2 += e.pi[a] * val * val;
  }
  st.variance = std::max(0.0, s2 - st.mean * st.mean);
  return st;
}

double grand_canonical_expectation(const EquilibriumFamily& family, const Cylinder& psi, double v,
                                   std::optional<SpinWindow> clip) {
  SpinWindow w{family.z_lo(), family.z_hi()};
  if (clip) {
    w.lo = std::max(w.lo, clip->lo);
    w.hi = std::min(w.hi, clip->hi);
  }
  const double width = w.hi - w.lo + 1;
  if (std::pow(width, psi.m) > 1e7) throw DomainError("grand-canonical enumeration too large; pass a clip window");
  const auto pmf_all = family.tilted_pmf(family.theta_of_v(v));
  std::vector<double> pmf;
  for (int z = w.lo; z <= w.hi; ++z) pmf.push_back(pmf_all[static_cast<std::size_t>(z - family.z_lo())]);
  const double tot = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  double s = 0.0;
  for_each_tuple(psi.m, w, [&](const std::vector<int>& z) {
    double p = 1.0;
    for (int x : z) p *= pmf[static_cast<std::size_t>(x - w.lo)] / tot;
    if (p > 0.0) s += p * psi.fn(z);
  });
  return s;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs >= 2 matching points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

EquivalenceSweep equivalence_sweep(const RateModel& model, const EquilibriumFamily& family, const Cylinder& psi,
                                   double density, std::span<const int> ls, std::optional<SpinWindow> clip) {
  EquivalenceSweep sw;
  sw.density = density;
  sw.psi_hat = grand_canonical_expectation(family, psi, density, clip);
  std::vector<double> xs, ys;
  for (int l : ls) {
    const double kk = density * l;
    const int k = static_cast<int>(std::lround(kk));
    if (std::abs(kk - k) > 1e-9) {
      std::ostringstream os;
      os << "density " << density << " times l = " << l << " is not an integer";
      throw DomainError(os.str());
    }
    const auto e = enumerate_sector(model, family, l, k, clip);
    EquivalencePoint p;
    p.l = l;
    p.k = k;
    p.psi = canonical_expectation(e, psi).mean;
    p.abs_error = std::abs(p.psi - sw.psi_hat);
    sw.points.push_back(p);
    if (p.abs_error > 0.0) {
      xs.push_back(l);
      ys.push_back(p.abs_error);
    }
  }
  sw.fitted_slope = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
  return sw;
}

std::vector<GapRow> gap_sweep(const RateModel& model, const EquilibriumFamily& family, std::span<const int> ls,
                              std::optional<SpinWindow> clip) {
  std::vector<GapRow> rows;
  for (int l : ls) {
    for (const auto& e : enumerate_sectors(model, family, l, clip)) {
      if (e.size() < 2) continue;
      const auto g = spectral_gap(e);
      GapRow row;
      row.l = l;
      row.k = e.k;
      row.sector_size = e.size();
      row.gap = g.gap;
      row.gap_times_l2 = g.gap * l * l;
      row.rayleigh = g.rayleigh;
      row.stationarity = stationarity_residual(e, generator_matrix(e));
      row.sym_stationarity =
          stationarity_residual(e, 0.5 * (generator_matrix(e) + reversed_generator_matrix(e)));
      row.periodic_stationarity = stationarity_residual(e, periodic_generator_matrix(e));
      rows.push_back(row);
    }
  }
  return rows;
}

// ------------------------------------------------------------ torus checks

namespace {

struct Torus {
  int n = 0;
  SpinWindow w;
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, std::size_t> index;
  std::vector<double> pi;
};

Torus make_torus(const EquilibriumFamily& family, const SpinWindow& w, int n) {
  Torus t;
  t.n = n;
  t.w = w;
  const auto lp = window_log_pi(family, w);
  for_each_tuple(n, w, [&](const std::vector<int>& z) {
    double s = 0.0;
    for (int x : z) s += lp[static_cast<std::size_t>(x - w.lo)];
    t.index.emplace(z, t.states.size());
    t.states.push_back(z);
    t.pi.push_back(std::exp(s));
  });
  return t;
}

// 1/2 sum_z pi(z) sum_bonds c (f(Theta z) - f(z))^2 over the given bonds (i, i+1 mod n).
double torus_form(const RateModel& model, const Torus& t, const std::vector<double>& f, bool periodic) {
  double d = 0.0;
  const int bonds = periodic ? t.n : t.n - 1;
  for (std::size_t a = 0; a < t.states.size(); ++a) {
    const auto& z = t.states[a];
    for (int i = 0; i < bonds; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>((i + 1) % t.n);
      if (z[ui] - 1 < t.w.lo || z[uj] + 1 > t.w.hi) continue;
      const double c = model.rate(z[ui], z[uj]);
      if (c <= 0.0) continue;
      auto y = z;
      --y[ui];
      ++y[uj];
      const double df = f[t.index.at(y)] - f[a];
      d += t.pi[a] * c * df * df;
    }
  }
  return 0.5 * d;
}

}  // namespace

DirsumReport check_dirsum_convex(const RateModel& model, const EquilibriumFamily& family, int n, int l, int trials,
                                 std::uint64_t seed, std::optional<SpinWindow> clip) {
  if (n < 2 || n > 8) throw DomainError("torus size must lie in [2, 8]");
  if (l < 1 || l > n) throw DomainError("block length must lie in [1, N]");
  const SpinWindow w = block_window(model, clip);
  const Torus torus = make_torus(family, w, n);
  const Torus block = make_torus(family, w, l);
  std::vector<BlockEnsemble> sectors;
  for (int k = l * w.lo; k <= l * w.hi; ++k) sectors.push_back(enumerate_sector(model, family, l, k, w));

  DirsumReport rep;
  rep.N = n;
  rep.l = l;
  rep.trials = trials;
  rep.min_convex_margin = std::numeric_limits<double>::infinity();

  // Block identity and (1/l) sum_j D^l for one density h on the torus.
  auto evaluate = [&](const std::vector<double>& h, double& violation) {
    double block_sum = 0.0;
    violation = 0.0;
    for (int j = 0; j < n; ++j) {
      std::vector<double> mass(block.states.size(), 0.0);
      for (std::size_t a = 0; a < torus.states.size(); ++a) {
        std::vector<int> y(static_cast<std::size_t>(l));
        for (int i = 0; i < l; ++i)
          y[static_cast<std::size_t>(i)] = torus.states[a][static_cast<std::size_t>((j + i) % n)];
        mass[block.index.at(y)] += torus.pi[a] * h[a];
      }
      std::vector<double> root(block.states.size());
      for (std::size_t b = 0; b < root.size(); ++b) root[b] = std::sqrt(mass[b] / block.pi[b]);
      const double lhs = torus_form(model, block, root, false);
      block_sum += lhs;

      double rhs = 0.0;
      for (const auto& s : sectors) {
        std::vector<double> hk(s.size());
        double weight = 0.0;
        for (std::size_t a = 0; a < s.size(); ++a) {
          const auto b = block.index.at(s.states[a]);
          hk[a] = mass[b] / block.pi[b];
          weight += mass[b];
        }
        if (weight <= 0.0) continue;
        const double eh = weight / s.mass;
        for (double& x : hk) x = std::sqrt(x / eh);
        rhs += weight * dirichlet(s, hk);
      }
      violation = std::max(violation, std::abs(lhs - rhs));
      if (j == 0) {
        rep.constant_lhs = lhs;
        rep.constant_rhs = rhs;
      }
    }
    return block_sum / l;
  };

  auto root_of = [](const std::vector<double>& h) {
    std::vector<double> r(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) r[i] = std::sqrt(h[i]);
    return r;
  };

  {
    const std::vector<double> one(torus.states.size(), 1.0);
    double viol = 0.0;
    evaluate(one, viol);
    rep.max_dirsum_violation = viol;
  }
  const double keep_lhs = rep.constant_lhs, keep_rhs = rep.constant_rhs;

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> h(torus.states.size());
    double norm = 0.0;
    for (std::size_t a = 0; a < h.size(); ++a) {
      h[a] = 0.05 + uniform01(rng);
      norm += torus.pi[a] * h[a];
    }
    for (double& x : h) x /= norm;
    double viol = 0.0;
    const double avg = evaluate(h, viol);
    rep.max_dirsum_violation = std::max(rep.max_dirsum_violation, viol);
    const double margin = torus_form(model, torus, root_of(h), true) - avg;
    rep.min_convex_margin = std::min(rep.min_convex_margin, margin);
    if (margin < -1e-12) ++rep.convex_violations;
  }
  rep.constant_lhs = keep_lhs;
  rep.constant_rhs = keep_rhs;

  // Product-form density h = prod g(z_i) with g a tilt, normalized under pi on the window.
  const auto lp = window_log_pi(family, w);
  const double theta = 0.7;
  std::vector<double> g;
  double zg = 0.0;
  for (int z = w.lo; z <= w.hi; ++z) {
    g.push_back(std::exp(theta * z));
    zg += std::exp(lp[static_cast<std::size_t>(z - w.lo)]) * g.back();
  }
  for (double& x : g) x /= zg;
  std::vector<double> h(torus.states.size());
  for (std::size_t a = 0; a < h.size(); ++a) {
    double p = 1.0;
    for (int x : torus.states[a]) p *= g[static_cast<std::size_t>(x - w.lo)];
    h[a] = p;
  }
  rep.product_direct = torus_form(model, torus, root_of(h), true);
  double closed = 0.0;
  for (int x = w.lo + 1; x <= w.hi; ++x)
    for (int y = w.lo; y < w.hi; ++y) {
      const auto gx = [&](int z) { return g[static_cast<std::size_t>(z - w.lo)]; };
      const double px = std::exp(lp[static_cast<std::size_t>(x - w.lo)]);
      const double py = std::exp(lp[static_cast<std::size_t>(y - w.lo)]);
      const double d = std::sqrt(gx(x - 1) * gx(y + 1)) - std::sqrt(gx(x) * gx(y));
      closed += px * py * model.rate(x, y) * d * d;
    }
  rep.product_closed = 0.5 * n * closed;
  return rep;
}

}  // namespace misanthrope

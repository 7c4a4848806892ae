#include "misanthrope/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "misanthrope/errors.hpp"

namespace misanthrope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Spins of S within [-window, window].
std::pair<int, int> window_range(const RateModel& m, int window) {
  const auto& b = m.bounds();
  const int lo = b.z_min ? *b.z_min : (b.z_max ? *b.z_max - 2 * window : -window);
  const int hi = b.z_max ? *b.z_max : (b.z_min ? *b.z_min + window : window);
  return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------- RFunction

RFunction RFunction::linear(double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ModelError("linear r: slope must be positive");
  RFunction f;
  f.family_ = Family::linear;
  f.params_ = {slope};
  return f;
}

RFunction RFunction::affine(double a, double b, double cap) {
  if (!(a > 0.0) || !(b >= 0.0) || !(cap > 0.0)) throw ModelError("affine r: need a > 0, b >= 0, cap > 0");
  RFunction f;
  f.family_ = Family::affine;
  f.params_ = {a, b, cap};
  return f;
}

RFunction RFunction::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ModelError("constant r: value must be positive");
  RFunction f;
  f.family_ = Family::constant;
  f.params_ = {value};
  return f;
}

RFunction RFunction::table(std::vector<double> values, int first) {
  if (values.empty()) throw ModelError("r table is empty");
  if (first > 1) throw ModelError("r table must start at or below 1");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ModelError("r table entries must be positive and finite");
  }
  if (first + static_cast<int>(values.size()) <= 1) throw ModelError("r table must cover r(1)");
  RFunction f;
  f.family_ = Family::table;
  f.table_ = std::move(values);
  f.first_ = first;
  return f;
}

double RFunction::operator()(int x) const {
  switch (family_) {
    case Family::linear:
      return params_[0] * static_cast<double>(x);
    case Family::affine:
      return std::min(params_[0] + params_[1] * static_cast<double>(x - 1), params_[2]);
    case Family::constant:
      return params_[0];
    case Family::table: {
      const int last = first_ + static_cast<int>(table_.size()) - 1;
      if (x >= first_ && x <= last) return table_[static_cast<std::size_t>(x - first_)];
      if (x < first_) throw ModelError("r table does not define r(" + std::to_string(x) + ")");
      const double top = table_.back();
      const double step = table_.size() >= 2 ? top - table_[table_.size() - 2] : 0.0;
      return step > 0.0 ? top + step * static_cast<double>(x - last) : top;
    }
  }
  return 0.0;
}

bool RFunction::defines(int x) const {
  if (x >= 1) return true;
  return family_ == Family::table && x >= first_;
}

bool RFunction::growth_condition_known() const {
  switch (family_) {
    case Family::linear:
      return true;
    case Family::affine:
      return params_[1] > 0.0 && std::isinf(params_[2]);
    case Family::constant:
      return false;
    case Family::table:
      return table_.size() >= 2 && table_.back() - table_[table_.size() - 2] > 0.0;
  }
  return false;
}

std::string RFunction::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::linear:
      os << "linear(slope=" << params_[0] << ")";
      break;
    case Family::affine:
      os << "affine(a=" << params_[0] << ", b=" << params_[1] << ", cap=" << params_[2] << ")";
      break;
    case Family::constant:
      os << "constant(" << params_[0] << ")";
      break;
    case Family::table:
      os << "table(first=" << first_ << ", n=" << table_.size() << ")";
      break;
  }
  return os.str();
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::generic_table:
      return "generic-table";
    case ModelKind::zero_range:
      return "zero-range";
    case ModelKind::bricklayers:
      return "bricklayers";
  }
  return "?";
}

// ---------------------------------------------------------------- RateModel

RateModel RateModel::from_table(int z_min, int z_max, std::vector<double> c_row_major, std::string name) {
  if (c_row_major.empty()) throw ModelError("rate table is empty");
  if (z_min >= z_max) throw ModelError("need z_min < z_max");
  const int width = z_max - z_min + 1;
  if (c_row_major.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(width)) {
    throw ModelError("rate table has " + std::to_string(c_row_major.size()) + " entries, expected " +
                     std::to_string(width * width));
  }
  for (std::size_t i = 0; i < c_row_major.size(); ++i) {
    if (!(c_row_major[i] >= 0.0) || !std::isfinite(c_row_major[i])) {
      const int x = z_min + static_cast<int>(i) / width;
      const int y = z_min + static_cast<int>(i) % width;
      throw ModelError("negative or non-finite rate c(" + std::to_string(x) + "," + std::to_string(y) + ")");
    }
  }
  RateModel m;
  m.kind_ = ModelKind::generic_table;
  m.bounds_ = {z_min, z_max};
  m.name_ = std::move(name);
  m.table_ = std::move(c_row_major);
  m.lo_ = z_min;
  m.hi_ = z_max;
  m.width_ = width;
  return m;
}

RateModel RateModel::zero_range(RFunction r, std::string name) {
  RateModel m;
  m.kind_ = ModelKind::zero_range;
  m.bounds_ = {0, std::nullopt};
  m.name_ = std::move(name);
  m.r_ = std::move(r);
  return m;
}

RateModel RateModel::bricklayers(RFunction r, std::string name) {
  // Two-sided tables must already satisfy r(z) r(1 - z) = 1 where both sides are given.
  if (r.family() == RFunction::Family::table && r.table_first() <= 0) {
    for (int z = r.table_first(); z <= 0; ++z) {
      const double prod = r(z) * r(1 - z);
      if (!close_rel(prod, 1.0, 1e-12)) {
        throw ModelError("bricklayers r violates r(z) r(1-z) = 1 at z = " + std::to_string(z) +
                         " (product " + std::to_string(prod) + ")");
      }
    }
  }
  RateModel m;
  m.kind_ = ModelKind::bricklayers;
  m.bounds_ = {std::nullopt, std::nullopt};
  m.name_ = std::move(name);
  m.r_ = std::move(r);
  return m;
}

double RateModel::defining_r(int z) const {
  switch (kind_) {
    case ModelKind::zero_range:
      return z <= 0 ? 0.0 : r_(z);
    case ModelKind::bricklayers:
      return brick_r(z);
    case ModelKind::generic_table:
      break;
  }
  throw ModelError("table models carry no defining r; use derive_r");
}

const RFunction& RateModel::r_function() const {
  if (kind_ == ModelKind::generic_table) throw ModelError("table models carry no r function");
  return r_;
}

// ---------------------------------------------------------------- validation

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.informational || c.passed; });
}

const ConditionCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (c.informational) os << " (informational)";
    if (c.counterexample) {
      const auto& t = *c.counterexample;
      os << " at (" << t[0] << "," << t[1] << "," << t[2] << ")";
    }
    if (!c.note.empty()) os << ": " << c.note;
    os << '\n';
  }
  os << (all_passed() ? "all conditions pass\n" : "some conditions fail\n");
  return os.str();
}

namespace {

std::array<ConditionCheck, 2> check_growth(const std::vector<double>& r, const std::string& suffix, bool informational) {
  // r holds r at 1, 2, ..., W steps away from the origin.
  ConditionCheck d1{"D(i)" + suffix, true, std::nullopt, "", informational};
  double a1 = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) a1 = std::max(a1, std::abs(r[i + 1] - r[i]));
  d1.passed = std::isfinite(a1);
  d1.note = "window-verified, a1 = " + std::to_string(a1);

  ConditionCheck d2{"D(ii)" + suffix, false, std::nullopt, "no (x0, a2 > 0) found on the window", informational};
  const std::size_t w = r.size();
  for (std::size_t x0 = 1; x0 <= std::max<std::size_t>(1, w / 3); ++x0) {
    double a2 = kInf;
    for (std::size_t y = 0; y + x0 < w; ++y) {
      for (std::size_t x = y + x0; x < w; ++x) a2 = std::min(a2, r[x] - r[y]);
    }
    if (a2 > 0.0 && std::isfinite(a2)) {
      d2.passed = true;
      d2.note = "window-verified with x0 = " + std::to_string(x0) + ", a2 = " + std::to_string(a2);
      break;
    }
  }
  return {d1, d2};
}

}  // namespace

ValidationReport validate_conditions(const RateModel& model, int window) {
  if (window < 1) throw ModelError("validation window must be >= 1");
  const auto [lo, hi] = window_range(model, window);
  const auto& b = model.bounds();
  const auto c = [&](int x, int y) { return model.rate(x, y); };

  for (int x = lo; x <= hi; ++x) {
    for (int y = lo; y <= hi; ++y) {
      const double v = c(x, y);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ModelError("negative or non-finite rate c(" + std::to_string(x) + "," + std::to_string(y) + ")");
      }
    }
  }

  ValidationReport report;

  ConditionCheck a{"A", true, std::nullopt, "", false};
  for (int x = lo; x <= hi && a.passed; ++x) {
    for (int y = lo; y <= hi; ++y) {
      const bool boundary = (b.z_min && x == *b.z_min) || (b.z_max && y == *b.z_max);
      if (boundary && c(x, y) != 0.0) {
        a.passed = false;
        a.counterexample = std::array<int, 3>{x, y, 0};
        a.note = "c(z_min, y) and c(x, z_max) must vanish";
        break;
      }
      if (!boundary && !(c(x, y) > 0.0)) {
        a.passed = false;
        a.counterexample = std::array<int, 3>{x, y, 0};
        a.note = "nondegeneracy c(x, y) > 0 fails";
        break;
      }
    }
  }
  report.checks.push_back(a);

  ConditionCheck cb{"B", true, std::nullopt, "", false};
  for (int x = lo; x <= hi && cb.passed; ++x) {
    for (int y = lo; y <= hi && cb.passed; ++y) {
      for (int z = lo; z <= hi; ++z) {
        const double lhs = c(x, y) + c(y, z) + c(z, x);
        const double rhs = c(y, x) + c(z, y) + c(x, z);
        if (!close_rel(lhs, rhs)) {
          cb.passed = false;
          cb.counterexample = std::array<int, 3>{x, y, z};
          break;
        }
      }
    }
  }
  report.checks.push_back(cb);

  ConditionCheck cc{"C", true, std::nullopt, "", false};
  const int clo = b.z_min ? *b.z_min + 1 : lo + 1;
  for (int x = clo; x <= hi && cc.passed; ++x) {
    for (int y = clo; y <= hi && cc.passed; ++y) {
      for (int z = clo; z <= hi; ++z) {
        const double lhs = c(x, y - 1) * c(y, z - 1) * c(z, x - 1);
        const double rhs = c(y, x - 1) * c(z, y - 1) * c(x, z - 1);
        if (!close_rel(lhs, rhs)) {
          cc.passed = false;
          cc.counterexample = std::array<int, 3>{x, y, z};
          break;
        }
      }
    }
  }
  report.checks.push_back(cc);

  if (model.kind() == ModelKind::bricklayers) {
    ConditionCheck bc{"bricklayers r(z)r(1-z)=1", true, std::nullopt, "", false};
    for (int z = -window; z <= window; ++z) {
      if (!close_rel(model.defining_r(z) * model.defining_r(1 - z), 1.0)) {
        bc.passed = false;
        bc.counterexample = std::array<int, 3>{z, 1 - z, 0};
        break;
      }
    }
    report.checks.push_back(bc);
  }

  if (!b.bounded()) {
    std::vector<double> pos;
    for (int x = 1; x <= window; ++x) pos.push_back(model.defining_r(x));
    for (auto& d : check_growth(pos, "", false)) report.checks.push_back(d);
    if (model.kind() == ModelKind::bricklayers) {
      // Negative side read outward from the origin: r(0), r(-1), ...
      std::vector<double> neg;
      for (int x = 0; x > -window; --x) neg.push_back(model.defining_r(x));
      for (auto& d : check_growth(neg, " negative window", true)) report.checks.push_back(d);
    }
  }
  return report;
}

// ---------------------------------------------------------------- derive_r

double RTable::operator()(int z) const {
  if (bounds.z_min && z < *bounds.z_min) return 0.0;
  if (bounds.z_max && z > *bounds.z_max) return kInf;
  const int idx = z - first;
  if (idx < 0 || idx >= static_cast<int>(values.size())) throw DomainError("r not tabulated at " + std::to_string(z));
  return values[static_cast<std::size_t>(idx)];
}

RTable derive_r(const RateModel& model, int window) {
  const auto [lo, hi] = window_range(model, window);
  const auto& b = model.bounds();
  const int a = b.z_min ? *b.z_min : lo;
  RTable out;
  out.bounds = b;
  out.first = a;
  out.values.assign(static_cast<std::size_t>(hi - a + 1), 0.0);
  if (hi <= a) return out;

  const auto c = [&](int x, int y) { return model.rate(x, y); };
  // r(a) = 0 only when a is the true z_min; for a window anchor it is left unset.
  out.values[1] = c(a + 1, a);
  if (!(out.values[1] > 0.0)) throw ModelError("c(z_min+1, z_min) must be positive to normalize r");
  for (int x = a + 2; x <= hi; ++x) {
    const double den = c(x - 1, x - 1);
    if (!(den > 0.0)) {
      throw ModelError("division by zero in r recursion: c(" + std::to_string(x - 1) + "," + std::to_string(x - 1) +
                       ") = 0");
    }
    out.values[static_cast<std::size_t>(x - a)] = out.values[static_cast<std::size_t>(x - 1 - a)] * c(x, x - 2) / den;
  }
  for (int x = a + 1; x <= hi; ++x) {
    for (int y = a + 1; y <= hi; ++y) {
      const double lhs = c(x, y - 1) * out.values[static_cast<std::size_t>(y - a)];
      const double rhs = c(y, x - 1) * out.values[static_cast<std::size_t>(x - a)];
      if (!close_rel(lhs, rhs, 1e-10)) {
        throw ConsistencyError("r ratios inconsistent on the cycle (" + std::to_string(x) + "," + std::to_string(y) +
                               "," + std::to_string(a + 1) + "): c(" + std::to_string(x) + "," +
                               std::to_string(y - 1) + ")/c(" + std::to_string(y) + "," + std::to_string(x - 1) +
                               ") != r(" + std::to_string(x) + ")/r(" + std::to_string(y) + ")");
      }
    }
  }
  if (!b.z_min) out.values.erase(out.values.begin()), out.first = a + 1;
  return out;
}

double log_r(const RateModel& model, int z) {
  if (model.kind() != ModelKind::generic_table) return std::log(model.defining_r(z));
  // Table models: one step of the ratio recursion anchored at r(z_min + 1) = c(z_min + 1, z_min).
  const int a = *model.bounds().z_min;
  if (z <= a || z > *model.bounds().z_max) throw DomainError("log_r outside S above z_min");
  double acc = std::log(model.rate(a + 1, a));
  for (int x = a + 2; x <= z; ++x) acc += std::log(model.rate(x, x - 2)) - std::log(model.rate(x - 1, x - 1));
  return acc;
}

std::vector<double> inf_rate_ratio(const RateModel& model, int window) {
  const auto [lo, hi] = window_range(model, window);
  const auto& b = model.bounds();
  std::vector<double> out;
  const RTable r = derive_r(model, window);
  for (int x = lo; x <= hi; ++x) {
    if (b.z_min && x == *b.z_min) continue;
    double m = kInf;
    for (int y = lo; y <= hi; ++y) {
      if (b.z_max && y == *b.z_max) continue;
      m = std::min(m, model.rate(x, y) / r(x));
    }
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------- catalog

namespace catalog {

RateModel tasep() { return RateModel::from_table(0, 1, {0.0, 0.0, 1.0, 0.0}, "tasep"); }

RateModel k_exclusion(int K, double scale) {
  if (K < 1) throw ModelError("K-exclusion needs K >= 1");
  if (!(scale > 0.0)) throw ModelError("K-exclusion scale must be positive");
  const int w = K + 1;
  std::vector<double> c(static_cast<std::size_t>(w * w), 0.0);
  for (int x = 0; x <= K; ++x) {
    for (int y = 0; y <= K; ++y) c[static_cast<std::size_t>(x * w + y)] = scale * x * (K - y);
  }
  return RateModel::from_table(0, K, std::move(c), "k-exclusion(K=" + std::to_string(K) + ")");
}

RateModel k_exclusion2(double alpha, double delta, double eps) {
  if (!(alpha > 0.0) || !(delta > 0.0) || !(eps > 0.0)) throw ModelError("K=2 family needs positive parameters");
  // Rows x = 0, 1, 2; columns y = 0, 1, 2.
  std::vector<double> c = {0.0, 0.0, 0.0, alpha, eps, 0.0, alpha + delta, delta, 0.0};
  return RateModel::from_table(0, 2, std::move(c), "k-exclusion2");
}

RateModel zero_range(RFunction r) {
  auto name = "zero-range(" + r.describe() + ")";
  return RateModel::zero_range(std::move(r), std::move(name));
}

RateModel bricklayers(RFunction r) {
  auto name = "bricklayers(" + r.describe() + ")";
  return RateModel::bricklayers(std::move(r), std::move(name));
}

}  // namespace catalog

}  // namespace misanthrope

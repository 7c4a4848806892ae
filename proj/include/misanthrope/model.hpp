#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace misanthrope {

/// Spin alphabet S = [z_min, z_max] ∩ Z; an empty optional means an infinite bound.
struct SpinBounds {
  std::optional<int> z_min;
  std::optional<int> z_max;

  bool bounded() const { return z_min.has_value() && z_max.has_value(); }
  bool contains(int z) const { return (!z_min || z >= *z_min) && (!z_max || z <= *z_max); }
};

/// Positive rate profile r used by zero-range and bricklayers models.
///
/// The positive side r(1), r(2), ... is given by a family. For bricklayers the
/// negative side is completed through r(z) r(1 - z) = 1 unless a two-sided
/// table supplies it explicitly (in which case the constraint is checked).
class RFunction {
 public:
  enum class Family { linear, affine, constant, table };

  /// r(x) = slope * x.
  static RFunction linear(double slope = 1.0);
  /// r(x) = min(a + b (x - 1), cap) for x >= 1.
  static RFunction affine(double a, double b, double cap = std::numeric_limits<double>::infinity());
  static RFunction constant(double value);
  /// Values r(first), r(first + 1), ... Past the end the table is extended
  /// linearly with its last increment (constant if that increment is not positive).
  static RFunction table(std::vector<double> values, int first = 1);

  /// Value at x; x must be >= 1 unless the table covers it.
  double operator()(int x) const;
  /// True if the family defines r(x) explicitly (always for x >= 1).
  bool defines(int x) const;

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  int table_first() const { return first_; }
  const std::vector<double>& table_values() const { return table_; }
  /// True when the family is known to satisfy growth condition D on all of N.
  bool growth_condition_known() const;
  std::string describe() const;

 private:
  Family family_ = Family::linear;
  std::vector<double> params_;
  std::vector<double> table_;
  int first_ = 1;
};

enum class ModelKind { generic_table, zero_range, bricklayers };

std::string to_string(ModelKind kind);

/// Misanthrope rate function c(x, y): a unit of spin moves from site j to
/// j + 1 at rate c(z_j, z_{j+1}). Immutable after construction.
class RateModel {
 public:
  /// Explicit table on a bounded alphabet, row-major c[(x - z_min) * |S| + (y - z_min)].
  static RateModel from_table(int z_min, int z_max, std::vector<double> c_row_major, std::string name = "table");
  /// c(x, y) = 1{x > 0} r(x) on S = {0, 1, 2, ...}.
  static RateModel zero_range(RFunction r, std::string name = "zero-range");
  /// c(x, y) = r(x) + r(-y) on S = Z, with r(z) r(1 - z) = 1.
  static RateModel bricklayers(RFunction r, std::string name = "bricklayers");

  ModelKind kind() const { return kind_; }
  const SpinBounds& bounds() const { return bounds_; }
  const std::string& name() const { return name_; }

  /// c(x, y); zero when either argument is outside S.
  double rate(int x, int y) const {
    switch (kind_) {
      case ModelKind::generic_table:
        if (x < lo_ || x > hi_ || y < lo_ || y > hi_) return 0.0;
        return table_[static_cast<std::size_t>((x - lo_) * width_ + (y - lo_))];
      case ModelKind::zero_range:
        return (x > 0 && y >= 0) ? r_(x) : 0.0;
      case ModelKind::bricklayers:
        return brick_r(x) + brick_r(-y);
    }
    return 0.0;
  }

  /// The r supplied at construction (zero-range: r(0) = 0; bricklayers: two-sided).
  /// Throws ModelError for table models; use derive_r there.
  double defining_r(int z) const;
  const RFunction& r_function() const;

  /// Row-major table for generic models (empty otherwise).
  const std::vector<double>& table() const { return table_; }

 private:
  double brick_r(int z) const { return z >= 1 || r_.defines(z) ? r_(z) : 1.0 / r_(1 - z); }

  ModelKind kind_ = ModelKind::generic_table;
  SpinBounds bounds_;
  std::string name_;
  std::vector<double> table_;
  int lo_ = 0;
  int hi_ = 0;
  int width_ = 0;
  RFunction r_;
};

struct ConditionCheck {
  std::string name;
  bool passed = true;
  /// First violating (x, y, z); unused slots are zero.
  std::optional<std::array<int, 3>> counterexample;
  std::string note;
  /// Reported but not part of the overall verdict.
  bool informational = false;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;

  bool all_passed() const;
  const ConditionCheck* find(const std::string& name) const;
  std::string to_text() const;
};

/// Checks conditions A-C on all triples of S within [-window, window], the
/// bricklayers constraint, and condition D on [0, window] (window-verified).
/// Throws ModelError for structural problems (empty table, negative or
/// non-finite rates).
ValidationReport validate_conditions(const RateModel& model, int window = 64);

/// Tabulated r on [first, first + values.size()), extended by 0 below z_min and +inf above z_max.
struct RTable {
  int first = 0;
  std::vector<double> values;
  SpinBounds bounds;

  double operator()(int z) const;
};

/// Recovers r from the ratio recursion c(x, y-1) / c(y, x-1) = r(x) / r(y),
/// normalized by r(a + 1) := c(a + 1, a) where a = z_min (or -window when S is
/// unbounded below). Throws ConsistencyError naming the cycle when two
/// recursion paths disagree.
RTable derive_r(const RateModel& model, int window = 64);

/// log(pi(x) / pi(x - 1)) = -log r(x) for every x in S above z_min.
double log_r(const RateModel& model, int z);

/// Infimum over y of c(x, y) / r(x) on the window, per x (diagnostic only).
std::vector<double> inf_rate_ratio(const RateModel& model, int window = 16);

namespace catalog {

/// Totally asymmetric simple exclusion: S = {0, 1}, c(1, 0) = 1.
RateModel tasep();
/// Generalized K-exclusion c(x, y) = scale * x (K - y) on S = {0..K}.
RateModel k_exclusion(int K, double scale = 1.0);
/// Full three-parameter K = 2 family: c(1,0) = alpha, c(1,1) = eps, c(2,1) = delta, c(2,0) = alpha + delta.
RateModel k_exclusion2(double alpha, double delta, double eps);
RateModel zero_range(RFunction r);
RateModel bricklayers(RFunction r);

}  // namespace catalog

}  // namespace misanthrope

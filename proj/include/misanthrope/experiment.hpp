#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "misanthrope/blockstats.hpp"
#include "misanthrope/burgers.hpp"
#include "misanthrope/equilibrium.hpp"
#include "misanthrope/model.hpp"
#include "misanthrope/simulate.hpp"
#include "misanthrope/spectral.hpp"

namespace misanthrope {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSummarySchema = 1;

/// Model spec: kind in {tasep, k_exclusion, k_exclusion2, zero_range, bricklayers, table}
/// with the keys that kind needs (K, scale, alpha, delta, eps, z_min, z_max, c_table,
/// r_table, r_table_first, r_family, r_params, name). Unknown keys are rejected.
RateModel parse_model(const Json& spec);
/// Reads a JSON model spec from disk.
RateModel load_model(const std::filesystem::path& path);

/// Flattens nested objects (except `model`) to dotted keys.
Json flatten_config(const Json& raw);

/// Parsed run configuration shared by the subcommands.
struct RunConfig {
  Json echo;
  RateModel model = catalog::tasep();
  ExperimentConfig exp;
  int phi_degree = 2;
  std::size_t burgers_grid = 200;
  std::vector<double> flux_grid;
  std::vector<int> gap_l{2, 3, 4, 5, 6, 7, 8};
  std::vector<int> ensembles_l{2, 4, 6, 8};
  double ensembles_density = 0.5;
  std::vector<std::size_t> kurschak_l{64, 256, 1024};
  double kurschak_gamma = 0.3;
  std::uint64_t kurschak_samples = 1'000'000;
  std::optional<SpinWindow> clip;
  /// Lists found for sweep axes (empty when scalar).
  std::vector<std::size_t> sweep_N;
  std::vector<double> sweep_beta;
};

/// Throws ConfigError on unknown keys or malformed values. Relative model
/// paths resolve against `base_dir`.
RunConfig parse_run_config(const Json& raw, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Test functions sin(2 pi k x), cos(2 pi k x), k = 1..degree, ids "sin1", "cos1", ...
struct TestFunction {
  std::string id;
  TrigPolynomial phi;
};
std::vector<TestFunction> test_functions(int degree);

struct TimeSummary {
  double t = 0.0;
  double profile_l2_error = 0.0;
  struct PhiStats {
    std::string id;
    double target = 0.0;
    double mean_S = 0.0;
    double se_S = 0.0;
    double z_score = 0.0;
    double mean_abs_error = 0.0;
    double se_abs_error = 0.0;
  };
  std::vector<PhiStats> phis;
};

struct CompareResult {
  RunConfig cfg;
  FluxCharacteristics flux;
  double shock_time = 0.0;
  std::size_t block = 0;
  std::vector<TestFunction> phis;
  std::vector<ReplicaResult> replicas;
  /// Burgers solution on the profile grid per measurement time.
  std::vector<Profile> burgers;
  std::vector<TimeSummary> times;
  std::uint64_t total_events = 0;
  double wall_seconds = 0.0;
};

/// Refuses beta outside (0, 1/5), T >= 0.95 T* and degenerate c0.
CompareResult run_compare(const RunConfig& cfg);

Json summary_json(const CompareResult& r);

/// CSV writer that refuses non-finite cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& s);
  void end_row();
  /// Flushes and checks the stream.
  void close();

 private:
  void sep();
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

void write_density_profile(const std::filesystem::path& path, const std::vector<ReplicaResult>& reps);
void write_corollary(const std::filesystem::path& path, const CompareResult& r);
void write_burgers(const std::filesystem::path& path, const std::vector<double>& times,
                   const std::vector<Profile>& profiles);
void write_events(const std::filesystem::path& path, const ExperimentConfig& exp,
                  const std::vector<ReplicaResult>& reps, double wall_seconds);
void write_json(const std::filesystem::path& path, const Json& j);

/// Burgers solutions at each time on an m-point grid.
std::vector<Profile> burgers_profiles(const RunConfig& cfg, const FluxCharacteristics& flux, std::size_t m);

}  // namespace misanthrope

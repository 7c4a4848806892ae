#include "misanthrope/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include "misanthrope/errors.hpp"

namespace misanthrope {

namespace fs = std::filesystem;

namespace {

std::string key_list(const std::set<std::string>& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
  return s;
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where + " (allowed: " + key_list(allowed) + ")");
  }
}

template <class T>
T get(const Json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": key '" + key + "' missing or malformed (" + e.what() + ")");
  }
}

template <class T>
T get_or(const Json& obj, const std::string& key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

RFunction parse_r(const Json& spec) {
  if (spec.contains("r_table")) {
    if (spec.contains("r_family")) throw ConfigError("model: give either r_table or r_family, not both");
    return RFunction::table(get<std::vector<double>>(spec, "r_table", "model"),
                            get_or<int>(spec, "r_table_first", 1, "model"));
  }
  const auto family = get_or<std::string>(spec, "r_family", "linear", "model");
  const auto p = get_or<std::vector<double>>(spec, "r_params", {}, "model");
  const auto param = [&](std::size_t i, double fallback) { return i < p.size() ? p[i] : fallback; };
  if (family == "linear") return RFunction::linear(param(0, 1.0));
  if (family == "affine")
    return RFunction::affine(param(0, 1.0), param(1, 1.0), param(2, std::numeric_limits<double>::infinity()));
  if (family == "constant") return RFunction::constant(param(0, 1.0));
  throw ConfigError("model: unknown r_family '" + family + "' (linear, affine, constant)");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

RateModel parse_model(const Json& spec) {
  if (!spec.is_object()) throw ConfigError("model spec must be an object");
  const auto kind = get<std::string>(spec, "kind", "model");
  if (kind == "tasep") {
    reject_unknown(spec, {"kind", "name"}, "model");
    return catalog::tasep();
  }
  if (kind == "k_exclusion") {
    reject_unknown(spec, {"kind", "name", "K", "scale"}, "model");
    return catalog::k_exclusion(get<int>(spec, "K", "model"), get_or<double>(spec, "scale", 1.0, "model"));
  }
  if (kind == "k_exclusion2") {
    reject_unknown(spec, {"kind", "name", "alpha", "delta", "eps"}, "model");
    return catalog::k_exclusion2(get<double>(spec, "alpha", "model"), get<double>(spec, "delta", "model"),
                                 get<double>(spec, "eps", "model"));
  }
  if (kind == "zero_range" || kind == "bricklayers") {
    reject_unknown(spec, {"kind", "name", "r_table", "r_table_first", "r_family", "r_params"}, "model");
    const auto r = parse_r(spec);
    return kind == "zero_range" ? catalog::zero_range(r) : catalog::bricklayers(r);
  }
  if (kind == "table") {
    reject_unknown(spec, {"kind", "name", "z_min", "z_max", "c_table"}, "model");
    return RateModel::from_table(get<int>(spec, "z_min", "model"), get<int>(spec, "z_max", "model"),
                                 get<std::vector<double>>(spec, "c_table", "model"),
                                 get_or<std::string>(spec, "name", "table", "model"));
  }
  throw ConfigError("model: unknown kind '" + kind + "' (tasep, k_exclusion, k_exclusion2, zero_range, bricklayers, table)");
}

RateModel load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model spec " + path.string());
  try {
    return parse_model(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("model spec " + path.string() + ": " + e.what());
  }
}

Json flatten_config(const Json& raw) {
  if (!raw.is_object()) throw ConfigError("config must be a JSON object");
  Json flat = Json::object();
  Json model_parts = Json::object();
  std::function<void(const Json&, const std::string&)> walk = [&](const Json& node, const std::string& prefix) {
    for (const auto& [k, v] : node.items()) {
      const std::string key = prefix.empty() ? k : prefix + "." + k;
      if (key == "model") {
        flat["model"] = v;
      } else if (key.rfind("model.", 0) == 0) {
        model_parts[key.substr(6)] = v;
      } else if (v.is_object()) {
        walk(v, key);
      } else {
        flat[key] = v;
      }
    }
  };
  walk(raw, "");
  if (!model_parts.empty()) {
    if (flat.contains("model")) throw ConfigError("config: give either `model` or `model.*` keys, not both");
    flat["model"] = model_parts;
  }
  return flat;
}

RunConfig parse_run_config(const Json& raw, const fs::path& base_dir) {
  const Json flat = flatten_config(raw);
  static const std::set<std::string> allowed = {
      "model",          "N",           "beta",           "v0",           "u0.amplitude", "u0.mode",
      "u0.shape",       "T",           "times",          "replicas",     "l",            "seed",
      "phi.degree",     "profile_points", "threads",     "burgers.grid", "flux.grid",    "gap.l",
      "ensembles.l",    "ensembles.density", "kurschak.l", "kurschak.gamma", "kurschak.samples", "clip.lo",
      "clip.hi"};
  reject_unknown(flat, allowed, "config");
  const std::string where = "config";

  RunConfig c;
  c.echo = raw;
  if (flat.contains("model")) {
    const auto& m = flat["model"];
    if (m.is_string()) {
      fs::path p = m.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.model = load_model(p);
    } else {
      c.model = parse_model(m);
    }
  }
  auto& e = c.exp;
  if (flat.contains("N")) {
    if (flat["N"].is_array()) {
      c.sweep_N = get<std::vector<std::size_t>>(flat, "N", where);
      if (c.sweep_N.empty()) throw ConfigError("config: N list is empty");
      e.N = c.sweep_N.front();
    } else {
      e.N = get<std::size_t>(flat, "N", where);
    }
  }
  if (flat.contains("beta")) {
    if (flat["beta"].is_array()) {
      c.sweep_beta = get<std::vector<double>>(flat, "beta", where);
      if (c.sweep_beta.empty()) throw ConfigError("config: beta list is empty");
      e.beta = c.sweep_beta.front();
    } else {
      e.beta = get<double>(flat, "beta", where);
    }
  }
  e.v0 = get_or<double>(flat, "v0", e.v0, where);
  const double amp = get_or<double>(flat, "u0.amplitude", 0.5, where);
  const int mode = get_or<int>(flat, "u0.mode", 1, where);
  const auto shape = get_or<std::string>(flat, "u0.shape", "sin", where);
  if (mode < 1) throw ConfigError("config: u0.mode must be >= 1");
  if (shape == "sin") {
    e.u0 = TrigPolynomial::sine(amp, mode);
  } else if (shape == "cos") {
    e.u0 = TrigPolynomial::cosine(amp, mode);
  } else {
    throw ConfigError("config: u0.shape must be sin or cos");
  }
  e.times = get_or<std::vector<double>>(flat, "times", e.times, where);
  e.T = flat.contains("T") ? get<double>(flat, "T", where) : (e.times.empty() ? 0.0 : e.times.back());
  e.replicas = get_or<std::size_t>(flat, "replicas", 40, where);
  e.block = get_or<std::size_t>(flat, "l", 0, where);
  e.seed = get_or<std::uint64_t>(flat, "seed", 20240601, where);
  e.profile_points = get_or<std::size_t>(flat, "profile_points", 200, where);
  e.threads = get_or<std::size_t>(flat, "threads", std::max(1u, std::thread::hardware_concurrency()), where);
  c.phi_degree = get_or<int>(flat, "phi.degree", 2, where);
  if (c.phi_degree < 1) throw ConfigError("config: phi.degree must be >= 1");
  c.burgers_grid = get_or<std::size_t>(flat, "burgers.grid", 200, where);
  c.flux_grid = get_or<std::vector<double>>(flat, "flux.grid", {}, where);
  c.gap_l = get_or<std::vector<int>>(flat, "gap.l", c.gap_l, where);
  c.ensembles_l = get_or<std::vector<int>>(flat, "ensembles.l", c.ensembles_l, where);
  c.ensembles_density = get_or<double>(flat, "ensembles.density", c.ensembles_density, where);
  c.kurschak_l = get_or<std::vector<std::size_t>>(flat, "kurschak.l", c.kurschak_l, where);
  c.kurschak_gamma = get_or<double>(flat, "kurschak.gamma", c.kurschak_gamma, where);
  c.kurschak_samples = get_or<std::uint64_t>(flat, "kurschak.samples", c.kurschak_samples, where);
  if (flat.contains("clip.lo") || flat.contains("clip.hi")) {
    c.clip = SpinWindow{get<int>(flat, "clip.lo", where), get<int>(flat, "clip.hi", where)};
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json raw;
  try {
    raw = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(raw, path.parent_path());
}

std::vector<TestFunction> test_functions(int degree) {
  std::vector<TestFunction> out;
  for (int k = 1; k <= degree; ++k) {
    out.push_back({"sin" + std::to_string(k), TrigPolynomial::sine(1.0, k)});
    out.push_back({"cos" + std::to_string(k), TrigPolynomial::cosine(1.0, k)});
  }
  return out;
}

std::vector<Profile> burgers_profiles(const RunConfig& cfg, const FluxCharacteristics& flux, std::size_t m) {
  const auto& u0 = cfg.exp.u0;
  const CharacteristicSolution sol(Profile::sample([&](double x) { return u0(x); }, 4096), flux.c0);
  std::vector<Profile> out;
  for (double t : cfg.exp.times) out.push_back(sol.sample(t, m));
  return out;
}

CompareResult run_compare(const RunConfig& cfg) {
  validate(cfg.exp);
  CompareResult r;
  r.cfg = cfg;
  const auto family = EquilibriumFamily::build(cfg.model);
  r.flux = family.flux_derivatives(cfg.exp.v0);
  if (r.flux.degenerate) {
    std::ostringstream os;
    os << "c0 = " << r.flux.c0 << " at v0 = " << cfg.exp.v0 << " is degenerate: no Burgers limit";
    throw ConfigError(os.str());
  }
  const auto& u0 = cfg.exp.u0;
  const CharacteristicSolution sol(Profile::sample([&](double x) { return u0(x); }, 4096), r.flux.c0);
  r.shock_time = sol.shock_time();
  if (cfg.exp.T >= 0.95 * r.shock_time) {
    std::ostringstream os;
    os << "T = " << cfg.exp.T << " is not below 0.95 T* = " << 0.95 * r.shock_time << " (shock time T* = "
       << r.shock_time << ")";
    throw HorizonError(os.str());
  }
  r.block = block_size(cfg.exp);
  r.phis = test_functions(cfg.phi_degree);

  const double b0 = r.flux.b0;
  const double beta = cfg.exp.beta, v0 = cfg.exp.v0;
  const auto phis = r.phis;
  const SnapshotObserver observer = [&phis, beta, v0, b0](const Configuration& c, double t) {
    std::vector<double> s;
    for (const auto& p : phis) s.push_back(corollary_statistic(c, p.phi, beta, v0, b0, t));
    return s;
  };

  const auto start = std::chrono::steady_clock::now();
  r.replicas = run_replicas(cfg.model, family, cfg.exp, b0, observer);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& rep : r.replicas) r.total_events += rep.events;

  const std::size_t m = cfg.exp.profile_points;
  const double reps = static_cast<double>(r.replicas.size());
  for (std::size_t ti = 0; ti < cfg.exp.times.size(); ++ti) {
    const double t = cfg.exp.times[ti];
    TimeSummary ts;
    ts.t = t;
    const Profile exact = sol.sample(t, m);
    const Profile fine = sol.sample(t, 2048);
    r.burgers.push_back(sol.sample(t, cfg.burgers_grid));
    std::vector<double> mean_u(m, 0.0);
    for (const auto& rep : r.replicas)
      for (std::size_t i = 0; i < m; ++i) mean_u[i] += rep.snapshots[ti].u_hat[i] / reps;
    ts.profile_l2_error = l2_distance(Profile(mean_u), exact);
    for (std::size_t p = 0; p < r.phis.size(); ++p) {
      TimeSummary::PhiStats ps;
      ps.id = r.phis[p].id;
      ps.target = integrate_product(r.phis[p].phi, fine);
      double s1 = 0, s2 = 0, a1 = 0, a2 = 0;
      for (const auto& rep : r.replicas) {
        const double s = rep.snapshots[ti].observables[p];
        const double a = std::abs(s - ps.target);
        s1 += s;
        s2 += s * s;
        a1 += a;
        a2 += a * a;
      }
      ps.mean_S = s1 / reps;
      ps.mean_abs_error = a1 / reps;
      if (reps > 1) {
        ps.se_S = std::sqrt(std::max(0.0, (s2 - reps * ps.mean_S * ps.mean_S) / (reps - 1)) / reps);
        ps.se_abs_error =
            std::sqrt(std::max(0.0, (a2 - reps * ps.mean_abs_error * ps.mean_abs_error) / (reps - 1)) / reps);
      }
      ps.z_score = ps.se_S > 0.0 ? (ps.mean_S - ps.target) / ps.se_S : 0.0;
      ts.phis.push_back(ps);
    }
    r.times.push_back(std::move(ts));
  }
  return r;
}

Json summary_json(const CompareResult& r) {
  const auto& e = r.cfg.exp;
  const double n = static_cast<double>(e.N);
  const double lower = std::pow(n, 2.0 * e.beta), upper = std::pow(n, (1.0 + e.beta) / 3.0);
  Json j;
  j["schema_version"] = kSummarySchema;
  j["software_version"] = kVersion;
  j["experiment"] = "compare";
  j["config"] = r.cfg.echo;
  j["model"] = r.cfg.model.name();
  j["N"] = e.N;
  j["beta"] = e.beta;
  j["v0"] = e.v0;
  j["a0"] = r.flux.a0;
  j["b0"] = r.flux.b0;
  j["c0"] = r.flux.c0;
  j["shock_time"] = r.shock_time;
  j["block"] = {{"l", r.block},
                {"lower_scale", lower},
                {"upper_scale", upper},
                {"within_window", static_cast<double>(r.block) > lower && static_cast<double>(r.block) < upper}};
  Json seeds = Json::array();
  for (const auto& rep : r.replicas) seeds.push_back({{"replica", rep.replica}, {"stream", rep.seed}});
  j["seeds"] = {{"base_seed", e.seed}, {"cell", e.cell}, {"streams", seeds}};
  j["total_events"] = r.total_events;
  j["wall_seconds"] = r.wall_seconds;
  Json times = Json::array();
  for (const auto& ts : r.times) {
    Json t;
    t["t"] = ts.t;
    t["profile_l2_error"] = ts.profile_l2_error;
    Json phis = Json::array();
    for (const auto& p : ts.phis) {
      phis.push_back({{"phi_id", p.id},
                      {"target_integral", p.target},
                      {"mean_S_N", p.mean_S},
                      {"stderr_S_N", p.se_S},
                      {"z_score", p.z_score},
                      {"mean_abs_error", p.mean_abs_error},
                      {"stderr_abs_error", p.se_abs_error}});
    }
    t["statistics"] = phis;
    times.push_back(t);
  }
  j["times"] = times;
  return j;
}

// ------------------------------------------------------------------ output

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw Error("cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (in_row_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double v) {
  if (!std::isfinite(v)) throw Error("non-finite value in " + path_.string());
  sep();
  out_ << fmt(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw Error("row width mismatch in " + path_.string());
  out_ << '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw Error("write failed for " + path_.string());
  out_.close();
}

void write_density_profile(const fs::path& path, const std::vector<ReplicaResult>& reps) {
  CsvWriter w(path, {"replica", "t_macro", "x", "u_hat"});
  for (const auto& rep : reps)
    for (const auto& s : rep.snapshots)
      for (std::size_t i = 0; i < s.u_hat.size(); ++i) {
        w.cell(static_cast<long long>(rep.replica)).cell(s.t_macro).cell(s.u_hat.x(i)).cell(s.u_hat[i]);
        w.end_row();
      }
  w.close();
}

void write_corollary(const fs::path& path, const CompareResult& r) {
  CsvWriter w(path, {"replica", "t", "phi_id", "S_N", "target_integral"});
  for (const auto& rep : r.replicas)
    for (std::size_t ti = 0; ti < rep.snapshots.size(); ++ti)
      for (std::size_t p = 0; p < r.phis.size(); ++p) {
        w.cell(static_cast<long long>(rep.replica))
            .cell(rep.snapshots[ti].t_macro)
            .cell(r.phis[p].id)
            .cell(rep.snapshots[ti].observables[p])
            .cell(r.times[ti].phis[p].target);
        w.end_row();
      }
  w.close();
}

void write_burgers(const fs::path& path, const std::vector<double>& times, const std::vector<Profile>& profiles) {
  CsvWriter w(path, {"t", "x", "u"});
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < profiles[k].size(); ++i) {
      w.cell(times[k]).cell(profiles[k].x(i)).cell(profiles[k][i]);
      w.end_row();
    }
  w.close();
}

void write_events(const fs::path& path, const ExperimentConfig& exp, const std::vector<ReplicaResult>& reps,
                  double wall_seconds) {
  std::uint64_t total = 0;
  for (const auto& r : reps) total += r.events;
  Json j;
  j["N"] = exp.N;
  j["beta"] = exp.beta;
  j["total_events"] = total;
  j["wall_seconds"] = wall_seconds;
  j["events_per_second"] = wall_seconds > 0.0 ? static_cast<double>(total) / wall_seconds : 0.0;
  write_json(path, j);
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace misanthrope
